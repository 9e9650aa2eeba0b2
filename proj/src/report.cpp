#include "coneproj/report.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <utility>

namespace coneproj {

using nlohmann::json;

std::string to_string(Mode mode) {
  switch (mode) {
    case Mode::ClosedForm:
      return "closed-form";
    case Mode::ActiveSet:
      return "active-set";
    case Mode::Oracle:
      return "oracle";
    case Mode::Auto:
      return "auto";
  }
  return "auto";
}

Mode mode_from_string(const std::string& text) {
  // Accept both hyphen and underscore spellings.
  if (text == "closed-form" || text == "closed_form") {
    return Mode::ClosedForm;
  }
  if (text == "active-set" || text == "active_set") {
    return Mode::ActiveSet;
  }
  if (text == "oracle") {
    return Mode::Oracle;
  }
  if (text == "auto") {
    return Mode::Auto;
  }
  throw std::invalid_argument("mode: expected closed-form, active-set, oracle or auto, got '" +
                              text + "'");
}

namespace {

const json& require_field(const json& j, const char* name) {
  if (!j.is_object() || !j.contains(name)) {
    throw std::invalid_argument(std::string(name) + ": field missing");
  }
  return j.at(name);
}

Rational rational_from_json(const json& j, const std::string& field) {
  if (j.is_string()) {
    try {
      return parse_rational(j.get<std::string>());
    } catch (const std::invalid_argument& e) {
      throw std::invalid_argument(field + ": " + e.what());
    }
  }
  if (j.is_number_integer()) {
    return Rational(j.get<long long>());
  }
  throw std::invalid_argument(field + ": expected an exact rational (\"p/q\" string or integer)");
}

json optional_rational_to_json(const std::optional<Rational>& value) {
  if (!value) {
    return nullptr;
  }
  return to_fraction_string(*value);
}

std::optional<Rational> optional_rational_from_json(const json& j, const std::string& field) {
  if (j.is_null()) {
    return std::nullopt;
  }
  return rational_from_json(j, field);
}

std::size_t index_from_json(const json& j, const std::string& field) {
  if (!j.is_number_integer() || j.get<long long>() < 0) {
    throw std::invalid_argument(field + ": expected a non-negative integer");
  }
  return j.get<std::size_t>();
}

Violation::Kind violation_kind_from_string(const std::string& text) {
  if (text == "positivity") {
    return Violation::Kind::Positivity;
  }
  if (text == "equality") {
    return Violation::Kind::Equality;
  }
  if (text == "inequality") {
    return Violation::Kind::Inequality;
  }
  throw std::invalid_argument("rejection.condition: unknown kind '" + text + "'");
}

json certificate_to_json(const TailCertificate& cert) {
  return json{{"family", cert.family},
              {"parameters", cert.parameters},
              {"finite_checks", cert.finite_checks},
              {"algebraic_ok", cert.algebraic_ok}};
}

TailCertificate certificate_from_json(const json& j) {
  TailCertificate cert;
  cert.family = require_field(j, "family").get<std::string>();
  cert.parameters = require_field(j, "parameters").get<std::string>();
  cert.finite_checks = index_from_json(require_field(j, "finite_checks"), "certificate.finite_checks");
  cert.algebraic_ok = require_field(j, "algebraic_ok").get<bool>();
  return cert;
}

struct Timer {
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();

  double elapsed_ms() const {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start)
        .count();
  }
};

void attach_distances(ReportDocument& doc, const ConeProblem& problem) {
  auto [dist_sq, rel_sq] = distance_info(problem, doc.solution);
  doc.distance_sq = std::move(dist_sq);
  doc.rel_distance_sq = std::move(rel_sq);
}

void attach_certificate(ReportDocument& doc, const std::optional<ClosedFormProjection>& closed) {
  if (closed && closed->solution == doc.solution) {
    doc.certificate = closed->certificate;
    doc.verification.certified_all_orders = closed->certificate.algebraic_ok;
  }
}

}  // namespace

json to_json(const Target& target) {
  const Target::Value& v = target.value();
  if (const auto* power = std::get_if<PowerTarget>(&v)) {
    return json{{"type", "power"}, {"beta", to_fraction_string(power->beta)}};
  }
  if (const auto* signed_power = std::get_if<SignedPowerTarget>(&v)) {
    return json{{"type", "signed-power"}, {"gamma", to_fraction_string(signed_power->gamma)}};
  }
  if (const auto* indicator = std::get_if<IndicatorTarget>(&v)) {
    return json{{"type", "indicator"}, {"a", to_fraction_string(indicator->threshold)}};
  }
  if (const auto* mixture = std::get_if<PowerMixtureTarget>(&v)) {
    json atoms = json::array();
    for (const PowerAtom& atom : mixture->atoms) {
      atoms.push_back(json{{"alpha", to_fraction_string(atom.alpha)},
                           {"weight", to_fraction_string(atom.weight)}});
    }
    return json{{"type", "power-mixture"}, {"m", mixture->m}, {"atoms", atoms}};
  }
  if (const auto* steps = std::get_if<MonotoneStepTarget>(&v)) {
    json atoms = json::array();
    for (const StepAtom& atom : steps->atoms) {
      atoms.push_back(
          json{{"a", to_fraction_string(atom.threshold)}, {"weight", to_fraction_string(atom.weight)}});
    }
    return json{{"type", "monotone"}, {"atoms", atoms}};
  }
  const auto& list = std::get<ExplicitMomentsTarget>(v);
  json moments = json::array();
  for (const Rational& value : list.moments) {
    moments.push_back(to_fraction_string(value));
  }
  return json{{"type", "moments"},
              {"moments", moments},
              {"norm_sq", optional_rational_to_json(list.norm_sq)}};
}

Target target_from_json(const json& j) {
  const std::string type = require_field(j, "type").get<std::string>();
  if (type == "power") {
    return Target::power(rational_from_json(require_field(j, "beta"), "beta"));
  }
  if (type == "signed-power") {
    return Target::signed_power(rational_from_json(require_field(j, "gamma"), "gamma"));
  }
  if (type == "indicator") {
    return Target::indicator(rational_from_json(require_field(j, "a"), "a"));
  }
  if (type == "power-mixture") {
    std::vector<PowerAtom> atoms;
    for (const json& atom : require_field(j, "atoms")) {
      atoms.push_back(PowerAtom{rational_from_json(require_field(atom, "alpha"), "atoms.alpha"),
                                rational_from_json(require_field(atom, "weight"), "atoms.weight")});
    }
    return Target::power_mixture(index_from_json(require_field(j, "m"), "m"), std::move(atoms));
  }
  if (type == "monotone") {
    std::vector<StepAtom> atoms;
    for (const json& atom : require_field(j, "atoms")) {
      atoms.push_back(StepAtom{rational_from_json(require_field(atom, "a"), "atoms.a"),
                               rational_from_json(require_field(atom, "weight"), "atoms.weight")});
    }
    return Target::monotone_step(std::move(atoms));
  }
  if (type == "moments") {
    std::vector<Rational> moments;
    for (const json& value : require_field(j, "moments")) {
      moments.push_back(rational_from_json(value, "moments"));
    }
    std::optional<Rational> norm_sq;
    if (j.contains("norm_sq")) {
      norm_sq = optional_rational_from_json(j.at("norm_sq"), "norm_sq");
    }
    return Target::explicit_moments(std::move(moments), std::move(norm_sq));
  }
  throw std::invalid_argument("target.type: unknown type '" + type + "'");
}

json to_json(const ProblemSpec& spec) {
  return json{{"target", to_json(spec.target)},
              {"truncation", spec.truncation},
              {"j_max", spec.j_max},
              {"mode", to_string(spec.mode)}};
}

ProblemSpec problem_spec_from_json(const json& j) {
  ProblemSpec spec(target_from_json(require_field(j, "target")));
  if (j.contains("truncation")) {
    spec.truncation = index_from_json(j.at("truncation"), "truncation");
  }
  if (j.contains("j_max")) {
    spec.j_max = index_from_json(j.at("j_max"), "j_max");
  }
  if (j.contains("mode")) {
    spec.mode = mode_from_string(j.at("mode").get<std::string>());
  }
  return spec;
}

json to_json(const ReportDocument& doc) {
  json j;
  j["problem"] = to_json(doc.problem);
  j["mode_used"] = doc.mode_used;
  j["active_set"] = doc.solution.support;

  json coefficients = json::array();
  json coefficients_decimal = json::array();
  for (const Rational& value : doc.solution.coefficients) {
    coefficients.push_back(to_fraction_string(value));
    coefficients_decimal.push_back(to_double(value));
  }
  j["coefficients"] = coefficients;
  j["coefficients_decimal"] = coefficients_decimal;

  j["distance_sq"] = optional_rational_to_json(doc.distance_sq);
  j["distance"] = doc.distance_sq ? json(std::sqrt(to_double(*doc.distance_sq))) : json(nullptr);
  j["distance_exact"] =
      doc.distance_sq ? optional_rational_to_json(exact_sqrt(*doc.distance_sq)) : json(nullptr);
  j["rel_distance_sq"] = optional_rational_to_json(doc.rel_distance_sq);
  j["rel_distance"] =
      doc.rel_distance_sq ? json(std::sqrt(to_double(*doc.rel_distance_sq))) : json(nullptr);
  j["rel_distance_exact"] =
      doc.rel_distance_sq ? optional_rational_to_json(exact_sqrt(*doc.rel_distance_sq))
                          : json(nullptr);

  j["verification"] = json{{"checked_orders", doc.verification.checked_orders},
                           {"equality_ok", doc.verification.equality_ok},
                           {"inequality_ok", doc.verification.inequality_ok},
                           {"positivity_ok", doc.verification.positivity_ok},
                           {"orthogonality_ok", doc.verification.orthogonality_ok},
                           {"accepted", doc.verification.accepted()},
                           {"certified_all_orders", doc.verification.certified_all_orders}};

  j["certificate"] = doc.certificate ? certificate_to_json(*doc.certificate) : json(nullptr);
  j["rejection"] = doc.rejection
                       ? json{{"condition", to_string(doc.rejection->kind)},
                              {"order", doc.rejection->index},
                              {"value", to_fraction_string(doc.rejection->value)}}
                       : json(nullptr);
  j["timing_ms"] = doc.timing_ms;
  return j;
}

ReportDocument report_from_json(const json& j) {
  ReportDocument doc(problem_spec_from_json(require_field(j, "problem")));
  doc.mode_used = require_field(j, "mode_used").get<std::string>();

  for (const json& index : require_field(j, "active_set")) {
    doc.solution.support.push_back(index_from_json(index, "active_set"));
  }
  for (const json& value : require_field(j, "coefficients")) {
    doc.solution.coefficients.push_back(rational_from_json(value, "coefficients"));
  }

  const json& verification = require_field(j, "verification");
  doc.verification.checked_orders =
      index_from_json(require_field(verification, "checked_orders"), "verification.checked_orders");
  doc.verification.equality_ok = require_field(verification, "equality_ok").get<bool>();
  doc.verification.inequality_ok = require_field(verification, "inequality_ok").get<bool>();
  doc.verification.positivity_ok = require_field(verification, "positivity_ok").get<bool>();
  doc.verification.orthogonality_ok = require_field(verification, "orthogonality_ok").get<bool>();
  doc.verification.certified_all_orders =
      require_field(verification, "certified_all_orders").get<bool>();

  doc.distance_sq = optional_rational_from_json(require_field(j, "distance_sq"), "distance_sq");
  doc.rel_distance_sq =
      optional_rational_from_json(require_field(j, "rel_distance_sq"), "rel_distance_sq");

  const json& certificate = require_field(j, "certificate");
  if (!certificate.is_null()) {
    doc.certificate = certificate_from_json(certificate);
  }
  const json& rejection = require_field(j, "rejection");
  if (!rejection.is_null()) {
    doc.rejection =
        Violation{violation_kind_from_string(require_field(rejection, "condition").get<std::string>()),
                  index_from_json(require_field(rejection, "order"), "rejection.order"),
                  rational_from_json(require_field(rejection, "value"), "rejection.value")};
  }
  doc.timing_ms = require_field(j, "timing_ms").get<double>();
  return doc;
}

ActiveSetSolution candidate_from_json(const json& j) {
  ActiveSetSolution candidate;
  for (const json& index : require_field(j, "active_set")) {
    const std::size_t value = index_from_json(index, "active_set");
    if (!candidate.support.empty() && value <= candidate.support.back()) {
      throw std::invalid_argument("active_set: indices must be strictly increasing");
    }
    candidate.support.push_back(value);
  }
  for (const json& value : require_field(j, "coefficients")) {
    candidate.coefficients.push_back(rational_from_json(value, "coefficients"));
  }
  if (candidate.support.size() != candidate.coefficients.size()) {
    throw std::invalid_argument("coefficients: must align with active_set");
  }
  return candidate;
}

ReportDocument run_project(const ProblemSpec& spec) {
  const Timer timer;
  const ConeProblem problem{GeneratorFamily{}, spec.target};
  ReportDocument doc(spec);

  const std::optional<ClosedFormProjection> closed = closed_form_projection(spec.target);
  Mode mode = spec.mode;
  if (mode == Mode::Auto) {
    mode = closed ? Mode::ClosedForm : Mode::ActiveSet;
  }

  switch (mode) {
    case Mode::ClosedForm: {
      if (!closed) {
        if (const auto* indicator = spec.target.get_if<IndicatorTarget>()) {
          // Raises UnresolvedRegime with the offending threshold.
          project_indicator(indicator->threshold);
        }
        throw std::invalid_argument("mode: no closed form available for this target");
      }
      doc.mode_used = to_string(Mode::ClosedForm);
      doc.solution = closed->solution;
      doc.verification = verify_candidate(problem, doc.solution, spec.j_max);
      doc.certificate = closed->certificate;
      doc.verification.certified_all_orders = closed->certificate.algebraic_ok;
      break;
    }
    case Mode::ActiveSet: {
      ProjectionReport result = nnls_active_set(problem, spec.truncation, spec.j_max);
      doc.mode_used = to_string(Mode::ActiveSet);
      doc.solution = std::move(result.solution);
      doc.verification = std::move(result.verification);
      attach_certificate(doc, closed);
      break;
    }
    case Mode::Oracle: {
      ProjectionReport result = exhaustive_oracle(problem, spec.truncation, spec.j_max);
      doc.mode_used = to_string(Mode::Oracle);
      doc.solution = std::move(result.solution);
      doc.verification = std::move(result.verification);
      attach_certificate(doc, closed);
      break;
    }
    case Mode::Auto:
      break;  // resolved above
  }

  attach_distances(doc, problem);
  if (!doc.verification.accepted()) {
    doc.rejection = first_violation(doc.verification, doc.solution);
  }
  doc.timing_ms = timer.elapsed_ms();
  return doc;
}

ReportDocument run_verify(const ProblemSpec& spec, const ActiveSetSolution& candidate) {
  const Timer timer;
  const ConeProblem problem{GeneratorFamily{}, spec.target};
  ReportDocument doc(spec);
  doc.mode_used = "verify";
  doc.solution = candidate;
  doc.verification = verify_candidate(problem, candidate, spec.j_max);
  if (doc.verification.accepted()) {
    attach_distances(doc, problem);
    attach_certificate(doc, closed_form_projection(spec.target));
  } else {
    doc.rejection = first_violation(doc.verification, candidate);
  }
  doc.timing_ms = timer.elapsed_ms();
  return doc;
}

OracleComparison run_oracle_compare(const ProblemSpec& spec) {
  ProblemSpec active_spec = spec;
  active_spec.mode = Mode::ActiveSet;
  ProblemSpec oracle_spec = spec;
  oracle_spec.mode = Mode::Oracle;

  OracleComparison comparison{run_project(active_spec), run_project(oracle_spec)};
  comparison.match = comparison.active_set.solution == comparison.oracle.solution &&
                     comparison.active_set.verification.accepted() &&
                     comparison.oracle.verification.accepted();
  return comparison;
}

json to_json(const OracleComparison& comparison) {
  return json{{"active_set", to_json(comparison.active_set)},
              {"oracle", to_json(comparison.oracle)},
              {"match", comparison.match},
              {"verdict", comparison.match ? "MATCH" : "MISMATCH"}};
}

json to_json(const NonClosednessWitness& witness) {
  return json{{"truncation", witness.truncation},
              {"norm_estimate", witness.norm_estimate},
              {"lower_bound", witness.lower_bound},
              {"separated", witness.norm_estimate >= witness.lower_bound}};
}

namespace {

std::string format_double(double value) {
  char buffer[64];
  std::snprintf(buffer, sizeof buffer, "%.17g", value);
  return buffer;
}

double target_value(const Target& target, const Rational& t) {
  const Rational abs_t = t < 0 ? -t : t;
  const Target::Value& v = target.value();

  const auto power_value = [&](const Rational& exponent) -> double {
    if (denominator(exponent) == 1) {
      return to_double(rational_pow(abs_t, numerator(exponent).convert_to<std::size_t>()));
    }
    return std::pow(to_double(abs_t), to_double(exponent));
  };

  if (const auto* power = std::get_if<PowerTarget>(&v)) {
    return power_value(power->beta);
  }
  if (const auto* signed_power = std::get_if<SignedPowerTarget>(&v)) {
    if (t == 0) {
      return 0;
    }
    return (t < 0 ? -1.0 : 1.0) * power_value(signed_power->gamma);
  }
  if (const auto* indicator = std::get_if<IndicatorTarget>(&v)) {
    return t >= indicator->threshold ? 1.0 : 0.0;
  }
  if (const auto* mixture = std::get_if<PowerMixtureTarget>(&v)) {
    double acc = 0;
    for (const PowerAtom& atom : mixture->atoms) {
      acc += to_double(atom.weight) * power_value(2 * Rational(mixture->m) + atom.alpha);
    }
    return acc;
  }
  if (const auto* steps = std::get_if<MonotoneStepTarget>(&v)) {
    double acc = 0;
    for (const StepAtom& atom : steps->atoms) {
      if (t >= atom.threshold) {
        acc += to_double(atom.weight);
      }
    }
    return acc;
  }
  throw std::invalid_argument("sample: target type moments has no pointwise form");
}

Rational evaluate_solution(const ActiveSetSolution& solution, const Rational& t) {
  Rational acc = 0;
  for (std::size_t k = 0; k < solution.support.size(); ++k) {
    acc += solution.coefficients[k] * rational_pow(t, solution.support[k]);
  }
  return acc;
}

}  // namespace

std::string sample_csv(const ProblemSpec& spec, std::size_t grid_points) {
  if (spec.target.get_if<ExplicitMomentsTarget>() != nullptr) {
    throw std::invalid_argument("sample: target type moments has no pointwise form");
  }
  if (grid_points < 2) {
    throw std::invalid_argument("grid: need at least 2 points");
  }
  const ReportDocument doc = run_project(spec);

  std::string out = "t,w,w_star\n";
  for (std::size_t i = 0; i < grid_points; ++i) {
    const Rational t = Rational(2 * i, grid_points - 1) - 1;
    out += format_double(to_double(t));
    out += ',';
    out += format_double(target_value(spec.target, t));
    out += ',';
    out += format_double(to_double(evaluate_solution(doc.solution, t)));
    out += '\n';
  }
  return out;
}

json sample_json(const ProblemSpec& spec, std::size_t grid_points) {
  if (spec.target.get_if<ExplicitMomentsTarget>() != nullptr) {
    throw std::invalid_argument("sample: target type moments has no pointwise form");
  }
  if (grid_points < 2) {
    throw std::invalid_argument("grid: need at least 2 points");
  }
  const ReportDocument doc = run_project(spec);

  json rows = json::array();
  for (std::size_t i = 0; i < grid_points; ++i) {
    const Rational t = Rational(2 * i, grid_points - 1) - 1;
    rows.push_back(json{{"t", to_double(t)},
                        {"w", target_value(spec.target, t)},
                        {"w_star", to_double(evaluate_solution(doc.solution, t))}});
  }

  json coefficients = json::array();
  for (const Rational& value : doc.solution.coefficients) {
    coefficients.push_back(to_fraction_string(value));
  }
  return json{{"problem", to_json(spec)},
              {"active_set", doc.solution.support},
              {"coefficients", coefficients},
              {"rows", rows}};
}

json batch_run(const json& specs) {
  if (!specs.is_array()) {
    throw std::invalid_argument("batch: expected a JSON array of problem specs");
  }
  json out = json::array();
  for (std::size_t i = 0; i < specs.size(); ++i) {
    try {
      out.push_back(to_json(run_project(problem_spec_from_json(specs[i]))));
    } catch (const UnresolvedRegime& e) {
      throw UnresolvedRegime("batch entry " + std::to_string(i) + ": " + e.what());
    } catch (const std::invalid_argument& e) {
      throw std::invalid_argument("batch entry " + std::to_string(i) + ": " + e.what());
    }
  }
  return out;
}

}  // namespace coneproj
