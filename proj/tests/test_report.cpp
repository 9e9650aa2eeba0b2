#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <string>
#include <vector>

#include "coneproj/report.hpp"

using namespace coneproj;
using nlohmann::json;

namespace {

std::vector<std::string> split_lines(const std::string& text) {
  std::vector<std::string> lines;
  std::size_t start = 0;
  while (start < text.size()) {
    const std::size_t end = text.find('\n', start);
    if (end == std::string::npos) {
      lines.push_back(text.substr(start));
      break;
    }
    lines.push_back(text.substr(start, end - start));
    start = end + 1;
  }
  return lines;
}

}  // namespace

TEST_CASE("mode names round trip and accept both spellings") {
  CHECK(to_string(Mode::ClosedForm) == "closed-form");
  CHECK(to_string(Mode::ActiveSet) == "active-set");
  CHECK(to_string(Mode::Oracle) == "oracle");
  CHECK(to_string(Mode::Auto) == "auto");
  CHECK(mode_from_string("closed-form") == Mode::ClosedForm);
  CHECK(mode_from_string("closed_form") == Mode::ClosedForm);
  CHECK(mode_from_string("active_set") == Mode::ActiveSet);
  CHECK(mode_from_string("oracle") == Mode::Oracle);
  CHECK(mode_from_string("auto") == Mode::Auto);
  CHECK_THROWS_AS(mode_from_string("fastest"), std::invalid_argument);
}

TEST_CASE("projecting |t|^3 produces a certified closed-form report") {
  const ProblemSpec spec(Target::power(Rational(3)));
  const ReportDocument doc = run_project(spec);

  CHECK(doc.mode_used == "closed-form");
  CHECK(doc.solution.support == std::vector<std::size_t>{2, 4});
  CHECK(doc.solution.coefficients ==
        std::vector<Rational>{Rational(35, 96), Rational(21, 32)});
  CHECK(doc.verification.accepted());
  CHECK(doc.verification.checked_orders == 40);
  CHECK(doc.verification.certified_all_orders);
  CHECK(doc.distance_sq == Rational(1, 8064));
  CHECK(doc.rel_distance_sq == Rational(1, 2304));
  REQUIRE(doc.certificate.has_value());
  CHECK(doc.certificate->family == "power");
  CHECK_FALSE(doc.rejection.has_value());

  const json j = to_json(doc);
  CHECK(j["active_set"] == json::array({2, 4}));
  CHECK(j["coefficients"] == json::array({"35/96", "21/32"}));
  CHECK(j["distance_sq"] == "1/8064");
  CHECK(j["distance_exact"].is_null());  // 8064 is not a perfect square
  CHECK(j["rel_distance_sq"] == "1/2304");
  CHECK(j["rel_distance_exact"] == "1/48");
  CHECK(j["verification"]["accepted"] == true);
  CHECK(j["verification"]["certified_all_orders"] == true);
  CHECK(j["rejection"].is_null());
  CHECK(j["certificate"]["family"] == "power");
}

TEST_CASE("report JSON round trips byte for byte") {
  const ProblemSpec spec(Target::power(Rational(3)));
  const json original = to_json(run_project(spec));
  const json rebuilt = to_json(report_from_json(original));
  CHECK(rebuilt.dump() == original.dump());
}

TEST_CASE("identical runs serialize identically apart from timing") {
  ProblemSpec spec(Target::indicator(Rational(1, 4)));
  json first = to_json(run_project(spec));
  json second = to_json(run_project(spec));
  first.erase("timing_ms");
  second.erase("timing_ms");
  CHECK(first.dump() == second.dump());
}

TEST_CASE("auto mode falls back to the active-set solver") {
  // Moment lists bound the truncation: the solver needs <w, t^j> up to j = N.
  ProblemSpec moments(Target::explicit_moments({Rational(1), Rational(1, 2)}));
  moments.truncation = 1;
  CHECK(run_project(moments).mode_used == "active-set");
  ProblemSpec starved(Target::explicit_moments({Rational(1), Rational(1, 2)}));
  CHECK_THROWS_AS(run_project(starved), MomentUnavailable);

  const ProblemSpec small_gamma(Target::signed_power(Rational(1, 2)));
  const ReportDocument doc = run_project(small_gamma);
  CHECK(doc.mode_used == "active-set");
  CHECK(doc.verification.accepted());
}

TEST_CASE("the in-cone indicator endpoint reports zero distance") {
  const ProblemSpec spec(Target::indicator(Rational(-1)));
  const ReportDocument doc = run_project(spec);
  CHECK(doc.mode_used == "closed-form");
  CHECK(doc.solution.support == std::vector<std::size_t>{0});
  CHECK(doc.distance_sq == Rational(0));
  CHECK(doc.rel_distance_sq == Rational(0));
  const json j = to_json(doc);
  CHECK(j["distance_exact"] == "0");
  CHECK(j["rel_distance_exact"] == "0");
}

TEST_CASE("closed-form mode refuses targets without one") {
  ProblemSpec unresolved(Target::indicator(Rational(3, 5)));
  unresolved.mode = Mode::ClosedForm;
  CHECK_THROWS_AS(run_project(unresolved), UnresolvedRegime);

  ProblemSpec moments(Target::explicit_moments({Rational(1)}));
  moments.mode = Mode::ClosedForm;
  CHECK_THROWS_AS(run_project(moments), std::invalid_argument);
}

TEST_CASE("explicit solver modes attach the matching certificate") {
  ProblemSpec spec(Target::power(Rational(3)));
  spec.truncation = 8;

  spec.mode = Mode::ActiveSet;
  const ReportDocument active = run_project(spec);
  CHECK(active.mode_used == "active-set");
  CHECK(active.solution.support == std::vector<std::size_t>{2, 4});
  REQUIRE(active.certificate.has_value());
  CHECK(active.verification.certified_all_orders);

  spec.mode = Mode::Oracle;
  const ReportDocument oracle = run_project(spec);
  CHECK(oracle.mode_used == "oracle");
  CHECK(oracle.solution == active.solution);
  CHECK(oracle.certificate.has_value());
}

TEST_CASE("verify accepts the true projection and echoes distances") {
  const ProblemSpec spec(Target::power(Rational(3)));
  ActiveSetSolution candidate;
  candidate.support = {2, 4};
  candidate.coefficients = {Rational(35, 96), Rational(21, 32)};
  const ReportDocument doc = run_verify(spec, candidate);
  CHECK(doc.mode_used == "verify");
  CHECK(doc.verification.accepted());
  CHECK(doc.distance_sq == Rational(1, 8064));
  CHECK(doc.certificate.has_value());
  CHECK_FALSE(doc.rejection.has_value());
}

TEST_CASE("verify rejects the short candidate with the exact violation") {
  const ProblemSpec spec(Target::power(Rational(3)));
  ActiveSetSolution candidate;
  candidate.support = {2};
  candidate.coefficients = {Rational(5, 6)};
  const ReportDocument doc = run_verify(spec, candidate);
  CHECK_FALSE(doc.verification.accepted());
  REQUIRE(doc.rejection.has_value());
  CHECK(doc.rejection->kind == Violation::Kind::Inequality);
  CHECK(doc.rejection->index == 4);
  CHECK(doc.rejection->value == Rational(-1, 84));
  CHECK_FALSE(doc.distance_sq.has_value());

  const json j = to_json(doc);
  CHECK(j["rejection"]["condition"] == "inequality");
  CHECK(j["rejection"]["order"] == 4);
  CHECK(j["rejection"]["value"] == "-1/84");
}

TEST_CASE("verify rejects three-term coefficients at a four-term threshold") {
  const ProblemSpec spec(Target::indicator(Rational(1, 2)));
  ActiveSetSolution candidate;
  candidate.support = {0, 1, 2};
  candidate.coefficients = {Rational(1, 64), Rational(9, 16), Rational(45, 64)};
  const ReportDocument doc = run_verify(spec, candidate);
  CHECK_FALSE(doc.verification.accepted());
  REQUIRE(doc.rejection.has_value());
  CHECK(doc.rejection->kind == Violation::Kind::Inequality);
  CHECK(doc.rejection->index == 3);
  CHECK(doc.rejection->value == Rational(-3, 320));
}

TEST_CASE("candidate parsing validates shape") {
  const ActiveSetSolution parsed = candidate_from_json(
      json{{"active_set", {2, 4}}, {"coefficients", {"35/96", "21/32"}}});
  CHECK(parsed.support == std::vector<std::size_t>{2, 4});
  CHECK(parsed.coefficients == std::vector<Rational>{Rational(35, 96), Rational(21, 32)});

  CHECK_THROWS_AS(
      candidate_from_json(json{{"active_set", {4, 2}}, {"coefficients", {"1", "1"}}}),
      std::invalid_argument);
  CHECK_THROWS_AS(candidate_from_json(json{{"active_set", {2}}, {"coefficients", json::array()}}),
                  std::invalid_argument);
  CHECK_THROWS_AS(candidate_from_json(json{{"coefficients", {"1"}}}), std::invalid_argument);
}

TEST_CASE("target JSON round trips every family") {
  const std::vector<Target> targets{
      Target::power(Rational(7, 2)),
      Target::signed_power(Rational(5, 2)),
      Target::indicator(Rational(-1, 4)),
      Target::power_mixture(1, {PowerAtom{Rational(1, 2), Rational(2)},
                                PowerAtom{Rational(3, 2), Rational(1, 3)}}),
      Target::monotone_step({StepAtom{Rational(1, 4), Rational(2)}}),
      Target::explicit_moments({Rational(1), Rational(-1, 2)}, Rational(5, 4)),
      Target::explicit_moments({Rational(1), Rational(-1, 2)}),
  };
  for (const Target& target : targets) {
    CHECK(target_from_json(to_json(target)) == target);
  }

  CHECK_THROWS_AS(target_from_json(json{{"type", "spline"}}), std::invalid_argument);
  CHECK_THROWS_AS(target_from_json(json{{"type", "power"}, {"beta", 0.5}}),
                  std::invalid_argument);
  CHECK_THROWS_AS(target_from_json(json{{"type", "power"}}), std::invalid_argument);
}

TEST_CASE("problem specs parse with defaults") {
  const ProblemSpec defaults =
      problem_spec_from_json(json{{"target", {{"type", "power"}, {"beta", "3"}}}});
  CHECK(defaults.truncation == 12);
  CHECK(defaults.j_max == 40);
  CHECK(defaults.mode == Mode::Auto);

  const ProblemSpec custom = problem_spec_from_json(json{{"target", {{"type", "power"}, {"beta", 3}}},
                                                        {"truncation", 8},
                                                        {"j_max", 20},
                                                        {"mode", "closed_form"}});
  CHECK(custom.truncation == 8);
  CHECK(custom.j_max == 20);
  CHECK(custom.mode == Mode::ClosedForm);
  CHECK(to_json(custom)["mode"] == "closed-form");
}

TEST_CASE("oracle comparison matches on solvable problems") {
  ProblemSpec spec(Target::power(Rational(3)));
  spec.truncation = 8;
  const OracleComparison comparison = run_oracle_compare(spec);
  CHECK(comparison.match);
  CHECK(comparison.active_set.solution == comparison.oracle.solution);
  const json j = to_json(comparison);
  CHECK(j["verdict"] == "MATCH");
  CHECK(j["match"] == true);

  ProblemSpec empty(Target::explicit_moments(
      {Rational(-1), Rational(-1), Rational(-1), Rational(-1), Rational(-1), Rational(-1)}));
  empty.truncation = 5;
  const OracleComparison trivial = run_oracle_compare(empty);
  CHECK(trivial.match);
  CHECK(trivial.active_set.solution.support.empty());
}

TEST_CASE("sampling |t|^3 on a five-point grid") {
  ProblemSpec spec(Target::power(Rational(3)));
  const std::string csv = sample_csv(spec, 5);
  const std::vector<std::string> lines = split_lines(csv);
  REQUIRE(lines.size() == 6);
  CHECK(lines[0] == "t,w,w_star");
  CHECK(lines[1] == "-1,1,1.0208333333333333");
  CHECK(lines[3] == "0,0,0");
  CHECK(lines[5] == "1,1,1.0208333333333333");
}

TEST_CASE("sampling the three-term indicator on a three-point grid") {
  ProblemSpec spec(Target::indicator(Rational(1, 4)));
  const std::string csv = sample_csv(spec, 3);
  const std::vector<std::string> lines = split_lines(csv);
  REQUIRE(lines.size() == 4);
  CHECK(lines[1] == "-1,0,-0.03515625");
  CHECK(lines[2] == "0,0,0.228515625");
  CHECK(lines[3] == "1,1,1.37109375");
}

TEST_CASE("in-cone targets sample identically in both columns") {
  ProblemSpec spec(Target::power(Rational(4)));
  const std::string csv = sample_csv(spec, 9);
  const std::vector<std::string> lines = split_lines(csv);
  REQUIRE(lines.size() == 10);
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const std::size_t first = lines[i].find(',');
    const std::size_t second = lines[i].find(',', first + 1);
    CHECK(lines[i].substr(first + 1, second - first - 1) == lines[i].substr(second + 1));
  }
}

TEST_CASE("sample JSON carries the rows and the solution") {
  ProblemSpec spec(Target::power(Rational(3)));
  const json j = sample_json(spec, 5);
  CHECK(j["active_set"] == json::array({2, 4}));
  CHECK(j["coefficients"] == json::array({"35/96", "21/32"}));
  REQUIRE(j["rows"].size() == 5);
  CHECK(j["rows"][4]["t"] == 1.0);
  CHECK(j["rows"][4]["w"] == 1.0);
  CHECK(j["rows"][4]["w_star"] == doctest::Approx(49.0 / 48.0).epsilon(1e-15));
}

TEST_CASE("sampling rejects moment lists and degenerate grids") {
  ProblemSpec moments(Target::explicit_moments({Rational(1)}));
  CHECK_THROWS_AS(sample_csv(moments, 5), std::invalid_argument);
  CHECK_THROWS_AS(sample_json(moments, 5), std::invalid_argument);
  ProblemSpec spec(Target::power(Rational(3)));
  CHECK_THROWS_AS(sample_csv(spec, 1), std::invalid_argument);
}

TEST_CASE("batch runs preserve order and prefix errors") {
  const json specs = json::array({
      json{{"target", {{"type", "power"}, {"beta", "3"}}}},
      json{{"target", {{"type", "indicator"}, {"a", "-1/4"}}}},
  });
  const json out = batch_run(specs);
  REQUIRE(out.size() == 2);
  CHECK(out[0]["problem"]["target"]["type"] == "power");
  CHECK(out[0]["coefficients"] == json::array({"35/96", "21/32"}));
  CHECK(out[1]["problem"]["target"]["type"] == "indicator");
  CHECK(out[1]["verification"]["accepted"] == true);

  CHECK_THROWS_AS(batch_run(json{{"target", "x"}}), std::invalid_argument);

  const json failing = json::array({
      json{{"target", {{"type", "power"}, {"beta", "3"}}}},
      json{{"target", {{"type", "indicator"}, {"a", "3/5"}}}, {"mode", "closed-form"}},
  });
  CHECK_THROWS_WITH_AS(batch_run(failing),
                       "batch entry 1: no closed form for indicator threshold a = 3/5",
                       UnresolvedRegime);
}

TEST_CASE("non-closedness witness serializes with the separation flag") {
  const json j = to_json(nonclosedness_witness(100));
  CHECK(j["truncation"] == 100);
  CHECK(j["separated"] == true);
  CHECK(j["norm_estimate"].get<double>() > j["lower_bound"].get<double>());
}
