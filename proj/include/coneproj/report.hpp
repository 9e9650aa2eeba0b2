#pragma once

#include <json.hpp>

#include <cstddef>
#include <optional>
#include <string>

#include "coneproj/closedform.hpp"
#include "coneproj/cone.hpp"
#include "coneproj/projector.hpp"

namespace coneproj {

enum class Mode { ClosedForm, ActiveSet, Oracle, Auto };

std::string to_string(Mode mode);
Mode mode_from_string(const std::string& text);

/// One projection request: the target plus solver knobs. Everything a report
/// echoes back, so runs are reproducible from their own output.
struct ProblemSpec {
  explicit ProblemSpec(Target t) : target(std::move(t)) {}

  Target target;
  std::size_t truncation = 12;  // generators 0..truncation for the solvers
  std::size_t j_max = 40;       // requested residual check order
  Mode mode = Mode::Auto;
};

/// Full machine-readable outcome of a projection or verification run. Exact
/// values serialize as "p/q" strings; decimal renderings ride along for
/// plotting. timing_ms is the only field allowed to differ between identical
/// runs.
struct ReportDocument {
  explicit ReportDocument(ProblemSpec p) : problem(std::move(p)) {}

  ProblemSpec problem;
  std::string mode_used;
  ActiveSetSolution solution;
  VerificationReport verification;
  std::optional<Rational> distance_sq;
  std::optional<Rational> rel_distance_sq;
  std::optional<TailCertificate> certificate;
  std::optional<Violation> rejection;
  double timing_ms = 0;
};

/// Projects the target. Auto mode prefers the certified closed form and falls
/// back to the exact active-set solver.
ReportDocument run_project(const ProblemSpec& spec);

/// Checks a user-supplied candidate against the optimality conditions.
ReportDocument run_verify(const ProblemSpec& spec, const ActiveSetSolution& candidate);

struct OracleComparison {
  ReportDocument active_set;
  ReportDocument oracle;
  bool match = false;
};

/// Runs the active-set solver and the exhaustive subset oracle on the same
/// problem and compares the exact solutions.
OracleComparison run_oracle_compare(const ProblemSpec& spec);

/// CSV table "t,w,w_star" at grid_points equispaced points across [-1, 1],
/// decimals printed with 17 significant digits. Rejects explicit moment
/// targets, which have no pointwise form.
std::string sample_csv(const ProblemSpec& spec, std::size_t grid_points);

nlohmann::json sample_json(const ProblemSpec& spec, std::size_t grid_points);

/// Runs every entry of a JSON array of problem specs; the output array keeps
/// the input order.
nlohmann::json batch_run(const nlohmann::json& specs);

nlohmann::json to_json(const Target& target);
Target target_from_json(const nlohmann::json& j);
nlohmann::json to_json(const ProblemSpec& spec);
ProblemSpec problem_spec_from_json(const nlohmann::json& j);
nlohmann::json to_json(const ReportDocument& doc);
ReportDocument report_from_json(const nlohmann::json& j);
nlohmann::json to_json(const OracleComparison& comparison);
nlohmann::json to_json(const NonClosednessWitness& witness);

/// Candidate parser for the verify subcommand: {"active_set": [...],
/// "coefficients": ["p/q", ...]} with a strictly increasing active set.
ActiveSetSolution candidate_from_json(const nlohmann::json& j);

}  // namespace coneproj
