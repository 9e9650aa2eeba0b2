#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

using nlohmann::json;

namespace {

struct CommandResult {
  int exit_code = -1;
  std::string output;
};

// Runs the binary under test (path in CONEPROJ_CLI) with stderr folded into
// stdout, so error messages are assertable too.
CommandResult run_cli(const std::string& arguments) {
  const char* binary = std::getenv("CONEPROJ_CLI");
  REQUIRE_MESSAGE(binary != nullptr, "CONEPROJ_CLI must point at the CLI binary");
  const std::string command = std::string(binary) + " " + arguments + " 2>&1";

  CommandResult result;
  FILE* pipe = popen(command.c_str(), "r");
  REQUIRE(pipe != nullptr);
  char buffer[4096];
  std::size_t read = 0;
  while ((read = std::fread(buffer, 1, sizeof buffer, pipe)) > 0) {
    result.output.append(buffer, read);
  }
  const int status = pclose(pipe);
  result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return result;
}

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

TEST_CASE("project emits a full report for |t|^3") {
  const CommandResult result = run_cli("project --target power --beta 3");
  REQUIRE(result.exit_code == 0);
  const json report = json::parse(result.output);
  CHECK(report["mode_used"] == "closed-form");
  CHECK(report["active_set"] == json::array({2, 4}));
  CHECK(report["coefficients"] == json::array({"35/96", "21/32"}));
  CHECK(report["rel_distance_exact"] == "1/48");
  CHECK(report["certificate"]["family"] == "power");
  CHECK(report["verification"]["accepted"] == true);
}

TEST_CASE("project validates its arguments") {
  CHECK(run_cli("project --target power --beta=-1").exit_code == 2);
  CHECK(run_cli("project --target power --beta 3 --format csv").exit_code == 2);
  CHECK(run_cli("project --target power --beta 3 --mode fastest").exit_code == 2);
  CHECK(run_cli("project --target spline").exit_code == 2);
  CHECK(run_cli("project").exit_code == 2);  // --target is required
  CHECK(run_cli("").exit_code == 2);         // a subcommand is required
  CHECK(run_cli("--help").exit_code == 0);
}

TEST_CASE("closed-form mode on an unresolved threshold exits 3") {
  const CommandResult result = run_cli("project --target indicator --a 3/5 --mode closed-form");
  CHECK(result.exit_code == 3);
  CHECK(result.output.find("error:") != std::string::npos);

  const CommandResult fallback = run_cli("project --target indicator --a 3/5");
  CHECK(fallback.exit_code == 0);
  CHECK(json::parse(fallback.output)["mode_used"] == "active-set");
}

TEST_CASE("verify exits 0 on acceptance and 5 on rejection") {
  const std::string target = "verify --target power --beta 3 --candidate ";
  const CommandResult good =
      run_cli(target + "'{\"active_set\": [2, 4], \"coefficients\": [\"35/96\", \"21/32\"]}'");
  CHECK(good.exit_code == 0);
  CHECK(json::parse(good.output)["verification"]["accepted"] == true);

  const CommandResult bad =
      run_cli(target + "'{\"active_set\": [2], \"coefficients\": [\"5/6\"]}'");
  CHECK(bad.exit_code == 5);
  const json report = json::parse(bad.output);
  CHECK(report["rejection"]["condition"] == "inequality");
  CHECK(report["rejection"]["order"] == 4);
  CHECK(report["rejection"]["value"] == "-1/84");
}

TEST_CASE("verify loads candidates from a file") {
  {
    std::ofstream file("cli_candidate.json", std::ios::binary);
    file << R"({"active_set": [2, 4], "coefficients": ["35/96", "21/32"]})";
  }
  const CommandResult result =
      run_cli("verify --target power --beta 3 --candidate cli_candidate.json");
  CHECK(result.exit_code == 0);
  std::remove("cli_candidate.json");

  CHECK(run_cli("verify --target power --beta 3 --candidate missing.json").exit_code == 2);
}

TEST_CASE("classify reports the band without failing on unresolved input") {
  const CommandResult four = run_cli("classify --a 9/20");
  REQUIRE(four.exit_code == 0);
  CHECK(json::parse(four.output) == json{{"a", "9/20"}, {"regime", "four-term"}});

  const CommandResult open = run_cli("classify --a 3/5");
  REQUIRE(open.exit_code == 0);
  CHECK(json::parse(open.output)["regime"] == "unresolved");

  CHECK(run_cli("classify --a 1").exit_code == 2);
}

TEST_CASE("oracle-compare agrees with the solver on fixtures and fuzzed moments") {
  const CommandResult fixed =
      run_cli("oracle-compare --target power --beta 3 --truncation 6");
  REQUIRE(fixed.exit_code == 0);
  CHECK(json::parse(fixed.output)["verdict"] == "MATCH");

  const CommandResult fuzzed = run_cli("oracle-compare --truncation 5 --seed 7");
  REQUIRE(fuzzed.exit_code == 0);
  const json comparison = json::parse(fuzzed.output);
  CHECK(comparison["verdict"] == "MATCH");
  CHECK(comparison["active_set"]["problem"]["target"]["type"] == "moments");

  // The seed fixes the generated moments, so reruns compare identical problems.
  const CommandResult again = run_cli("oracle-compare --truncation 5 --seed 7");
  CHECK(json::parse(again.output)["active_set"]["problem"] == comparison["active_set"]["problem"]);
}

TEST_CASE("sample defaults to CSV with exact grid endpoints") {
  const CommandResult result = run_cli("sample --target power --beta 3 --grid 5");
  REQUIRE(result.exit_code == 0);
  const std::vector<std::string> lines = split_lines(result.output);
  REQUIRE(lines.size() == 6);
  CHECK(lines[0] == "t,w,w_star");
  CHECK(lines[1] == "-1,1,1.0208333333333333");
  CHECK(lines[3] == "0,0,0");
  CHECK(lines[5] == "1,1,1.0208333333333333");

  const CommandResult as_json =
      run_cli("sample --target indicator --a 1/4 --grid 3 --format json");
  REQUIRE(as_json.exit_code == 0);
  const json doc = json::parse(as_json.output);
  REQUIRE(doc["rows"].size() == 3);
  CHECK(doc["rows"][1]["w_star"] == 0.228515625);

  CHECK(run_cli("sample --target moments --moments=1,0").exit_code == 2);
}

TEST_CASE("explicit moment lists project and carry distances when normed") {
  const CommandResult empty =
      run_cli("project --target moments --moments=-1,-1,-1 --truncation 2");
  REQUIRE(empty.exit_code == 0);
  const json report = json::parse(empty.output);
  CHECK(report["active_set"] == json::array());
  CHECK(report["verification"]["accepted"] == true);
  CHECK(report["distance_sq"].is_null());

  const CommandResult normed = run_cli(
      "project --target moments --moments=1/2,0,1/3,0,1/4 --norm-sq 2/7 --truncation 4");
  REQUIRE(normed.exit_code == 0);
  const json doc = json::parse(normed.output);
  CHECK(doc["active_set"] == json::array({2, 4}));
  CHECK(doc["distance_sq"] == "1/8064");
  CHECK(doc["rel_distance_sq"] == "1/2304");
}

TEST_CASE("nonclosed-demo tabulates the requested truncations") {
  const CommandResult result = run_cli("nonclosed-demo --truncation 10,50");
  REQUIRE(result.exit_code == 0);
  const json doc = json::parse(result.output);
  REQUIRE(doc["rows"].size() == 2);
  CHECK(doc["rows"][0]["truncation"] == 10);
  CHECK(doc["rows"][1]["truncation"] == 50);
  for (const json& row : doc["rows"]) {
    CHECK(row["separated"] == true);
    CHECK(row["norm_estimate"].get<double>() > row["lower_bound"].get<double>() - 1e-6);
  }

  const CommandResult defaults = run_cli("nonclosed-demo");
  REQUIRE(defaults.exit_code == 0);
  const json rows = json::parse(defaults.output)["rows"];
  REQUIRE(rows.size() == 4);
  CHECK(rows[3]["truncation"] == 400);
  CHECK(rows[3]["lower_bound"].get<double>() > rows[2]["lower_bound"].get<double>());
}

TEST_CASE("batch preserves input order") {
  {
    std::ofstream file("cli_batch.json", std::ios::binary);
    file << R"([{"target": {"type": "power", "beta": "3"}},)"
         << R"({"target": {"type": "indicator", "a": "-1/4"}}])";
  }
  const CommandResult result = run_cli("batch --input cli_batch.json");
  std::remove("cli_batch.json");
  REQUIRE(result.exit_code == 0);
  const json reports = json::parse(result.output);
  REQUIRE(reports.size() == 2);
  CHECK(reports[0]["problem"]["target"]["type"] == "power");
  CHECK(reports[1]["problem"]["target"]["type"] == "indicator");

  CHECK(run_cli("batch --input no_such_file.json").exit_code == 2);
}

TEST_CASE("reports are byte-identical apart from timing") {
  json first = json::parse(run_cli("project --target signed-power --gamma 5/2").output);
  json second = json::parse(run_cli("project --target signed-power --gamma 5/2").output);
  first.erase("timing_ms");
  second.erase("timing_ms");
  CHECK(first.dump() == second.dump());
}

TEST_CASE("--out writes the report to a file") {
  const CommandResult result =
      run_cli("project --target power --beta 3 --out cli_report.json");
  REQUIRE(result.exit_code == 0);
  CHECK(result.output.empty());
  std::ifstream file("cli_report.json", std::ios::binary);
  REQUIRE(file.good());
  const json report = json::parse(file);
  CHECK(report["coefficients"] == json::array({"35/96", "21/32"}));
  file.close();
  std::remove("cli_report.json");
}
