#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "coneproj/report.hpp"

namespace {

using coneproj::Rational;
using coneproj::Target;
using nlohmann::json;

struct TargetOptions {
  std::string type;
  std::string beta;
  std::string gamma;
  std::string threshold;
  std::size_t m = 0;
  std::string atoms;
  std::string moments;
  std::string norm_sq;
};

struct CommonOptions {
  std::size_t truncation = 12;
  std::size_t j_max = 40;
  std::string mode = "auto";
  std::string format = "json";
  std::string out;
  unsigned long long seed = 0;
};

void add_target_options(CLI::App* cmd, TargetOptions& opts, bool required) {
  auto* target = cmd->add_option(
      "--target", opts.type,
      "target family: power, signed-power, indicator, power-mixture, monotone, moments");
  if (required) {
    target->required();
  }
  cmd->add_option("--beta", opts.beta, "exponent for --target power (rational, e.g. 3 or 5/2)");
  cmd->add_option("--gamma", opts.gamma, "exponent for --target signed-power");
  cmd->add_option("--a", opts.threshold, "threshold for --target indicator");
  cmd->add_option("--m", opts.m, "base half-exponent for --target power-mixture (default 0)");
  cmd->add_option("--atoms", opts.atoms,
                  "atoms as a1:w1,a2:w2 for power-mixture (alpha:weight) and monotone "
                  "(threshold:weight) targets");
  cmd->add_option("--moments", opts.moments,
                  "comma-separated exact moments for --target moments, lowest order first");
  cmd->add_option("--norm-sq", opts.norm_sq,
                  "||w||^2 for --target moments; enables distance output");
}

void add_solver_options(CLI::App* cmd, CommonOptions& opts) {
  cmd->add_option("--truncation", opts.truncation,
                  "highest generator index used by the solvers (default 12)");
  cmd->add_option("--j-max", opts.j_max, "residual check order (default 40)");
  cmd->add_option("--mode", opts.mode, "closed-form, active-set, oracle or auto (default auto)");
}

void add_output_options(CLI::App* cmd, CommonOptions& opts, bool csv_available = false) {
  cmd->add_option("--format", opts.format,
                  csv_available ? "output format: csv (default) or json" : "output format: json");
  cmd->add_option("--out", opts.out, "write output to this path instead of stdout");
}

std::vector<std::string> split(const std::string& text, char separator) {
  std::vector<std::string> parts;
  std::string current;
  for (const char c : text) {
    if (c == separator) {
      parts.push_back(current);
      current.clear();
    } else {
      current += c;
    }
  }
  parts.push_back(current);
  return parts;
}

std::vector<Rational> parse_rational_list(const std::string& text, const std::string& field) {
  if (text.empty()) {
    throw std::invalid_argument(field + ": list must be non-empty");
  }
  std::vector<Rational> values;
  for (const std::string& part : split(text, ',')) {
    try {
      values.push_back(coneproj::parse_rational(part));
    } catch (const std::invalid_argument& e) {
      throw std::invalid_argument(field + ": " + e.what());
    }
  }
  return values;
}

std::vector<std::pair<Rational, Rational>> parse_atom_list(const std::string& text) {
  if (text.empty()) {
    throw std::invalid_argument("atoms: list must be non-empty");
  }
  std::vector<std::pair<Rational, Rational>> atoms;
  for (const std::string& part : split(text, ',')) {
    const std::vector<std::string> pieces = split(part, ':');
    if (pieces.size() != 2) {
      throw std::invalid_argument("atoms: expected value:weight pairs separated by commas");
    }
    try {
      atoms.emplace_back(coneproj::parse_rational(pieces[0]), coneproj::parse_rational(pieces[1]));
    } catch (const std::invalid_argument& e) {
      throw std::invalid_argument(std::string("atoms: ") + e.what());
    }
  }
  return atoms;
}

Target build_target(const TargetOptions& opts) {
  if (opts.type == "power") {
    if (opts.beta.empty()) {
      throw std::invalid_argument("beta: required for --target power");
    }
    return Target::power(coneproj::parse_rational(opts.beta));
  }
  if (opts.type == "signed-power") {
    if (opts.gamma.empty()) {
      throw std::invalid_argument("gamma: required for --target signed-power");
    }
    return Target::signed_power(coneproj::parse_rational(opts.gamma));
  }
  if (opts.type == "indicator") {
    if (opts.threshold.empty()) {
      throw std::invalid_argument("a: required for --target indicator");
    }
    return Target::indicator(coneproj::parse_rational(opts.threshold));
  }
  if (opts.type == "power-mixture") {
    if (opts.atoms.empty()) {
      throw std::invalid_argument("atoms: required for --target power-mixture");
    }
    std::vector<coneproj::PowerAtom> atoms;
    for (auto& [alpha, weight] : parse_atom_list(opts.atoms)) {
      atoms.push_back(coneproj::PowerAtom{std::move(alpha), std::move(weight)});
    }
    return Target::power_mixture(opts.m, std::move(atoms));
  }
  if (opts.type == "monotone") {
    if (opts.atoms.empty()) {
      throw std::invalid_argument("atoms: required for --target monotone");
    }
    std::vector<coneproj::StepAtom> atoms;
    for (auto& [threshold, weight] : parse_atom_list(opts.atoms)) {
      atoms.push_back(coneproj::StepAtom{std::move(threshold), std::move(weight)});
    }
    return Target::monotone_step(std::move(atoms));
  }
  if (opts.type == "moments") {
    if (opts.moments.empty()) {
      throw std::invalid_argument("moments: required for --target moments");
    }
    std::optional<Rational> norm_sq;
    if (!opts.norm_sq.empty()) {
      norm_sq = coneproj::parse_rational(opts.norm_sq);
    }
    return Target::explicit_moments(parse_rational_list(opts.moments, "moments"),
                                    std::move(norm_sq));
  }
  throw std::invalid_argument("target: unknown family '" + opts.type + "'");
}

coneproj::ProblemSpec build_spec(const TargetOptions& target, const CommonOptions& common) {
  coneproj::ProblemSpec spec(build_target(target));
  spec.truncation = common.truncation;
  spec.j_max = common.j_max;
  spec.mode = coneproj::mode_from_string(common.mode);
  return spec;
}

void require_json_format(const CommonOptions& common) {
  if (common.format != "json") {
    throw std::invalid_argument("format: csv is only available for sample");
  }
}

std::string read_file(const std::string& path) {
  std::ifstream stream(path, std::ios::binary);
  if (!stream) {
    throw std::invalid_argument("input: cannot open '" + path + "'");
  }
  std::ostringstream buffer;
  buffer << stream.rdbuf();
  return buffer.str();
}

void write_output(const std::string& text, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream stream(out_path, std::ios::binary);
  if (!stream) {
    throw std::invalid_argument("out: cannot open '" + out_path + "' for writing");
  }
  stream << text;
}

std::string pretty(const json& j) { return j.dump(2) + "\n"; }

coneproj::ActiveSetSolution load_candidate(const std::string& argument) {
  const std::string text =
      (!argument.empty() && argument.front() == '{') ? argument : read_file(argument);
  return coneproj::candidate_from_json(json::parse(text));
}

// Reproducible random moment vector for oracle fuzzing.
Target fuzz_target(unsigned long long seed, std::size_t truncation) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> numerator(-24, 24);
  std::uniform_int_distribution<int> denominator(1, 12);
  std::vector<Rational> moments(truncation + 1);
  for (Rational& value : moments) {
    value = Rational(numerator(rng), denominator(rng));
  }
  return Target::explicit_moments(std::move(moments));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Exact metric projections onto the closed convex cone of power series "
      "with non-negative coefficients in L2([-1, 1])"};
  app.require_subcommand(1);

  int exit_code = 0;

  TargetOptions project_target;
  CommonOptions project_common;
  auto* project = app.add_subcommand("project", "compute the projection and emit its report");
  add_target_options(project, project_target, /*required=*/true);
  add_solver_options(project, project_common);
  add_output_options(project, project_common);
  project->callback([&] {
    require_json_format(project_common);
    write_output(pretty(to_json(run_project(build_spec(project_target, project_common)))),
                 project_common.out);
  });

  TargetOptions verify_target;
  CommonOptions verify_common;
  std::string candidate_argument;
  auto* verify =
      app.add_subcommand("verify", "check a candidate against the optimality conditions");
  add_target_options(verify, verify_target, /*required=*/true);
  add_solver_options(verify, verify_common);
  add_output_options(verify, verify_common);
  verify
      ->add_option("--candidate", candidate_argument,
                   "candidate as inline JSON or a path to a JSON file: "
                   "{\"active_set\": [2, 4], \"coefficients\": [\"35/96\", \"21/32\"]}")
      ->required();
  verify->callback([&] {
    require_json_format(verify_common);
    const coneproj::ReportDocument doc =
        run_verify(build_spec(verify_target, verify_common), load_candidate(candidate_argument));
    write_output(pretty(to_json(doc)), verify_common.out);
    exit_code = doc.verification.accepted() ? 0 : 5;
  });

  TargetOptions compare_target;
  CommonOptions compare_common;
  auto* compare = app.add_subcommand(
      "oracle-compare", "run the active-set solver against the exhaustive subset oracle");
  add_target_options(compare, compare_target, /*required=*/false);
  add_solver_options(compare, compare_common);
  add_output_options(compare, compare_common);
  compare->add_option("--seed", compare_common.seed,
                      "seed for the generated moment vector when --target is omitted (default 0)");
  compare->callback([&] {
    require_json_format(compare_common);
    coneproj::ProblemSpec spec =
        compare_target.type.empty()
            ? [&] {
                coneproj::ProblemSpec fuzz(
                    fuzz_target(compare_common.seed, compare_common.truncation));
                fuzz.truncation = compare_common.truncation;
                fuzz.j_max = compare_common.j_max;
                return fuzz;
              }()
            : build_spec(compare_target, compare_common);
    const coneproj::OracleComparison comparison = run_oracle_compare(spec);
    write_output(pretty(to_json(comparison)), compare_common.out);
    exit_code = comparison.match ? 0 : 4;
  });

  std::string classify_threshold;
  CommonOptions classify_common;
  auto* classify =
      app.add_subcommand("classify", "report which closed-form band an indicator threshold is in");
  classify->add_option("--a", classify_threshold, "indicator threshold in [-1, 1)")->required();
  add_output_options(classify, classify_common);
  classify->callback([&] {
    require_json_format(classify_common);
    const Rational a = coneproj::parse_rational(classify_threshold);
    const json result{{"a", coneproj::to_fraction_string(a)},
                      {"regime", to_string(coneproj::classify_indicator(a))}};
    write_output(pretty(result), classify_common.out);
  });

  TargetOptions sample_target;
  CommonOptions sample_common;
  sample_common.format = "csv";
  std::size_t grid_points = 129;
  auto* sample =
      app.add_subcommand("sample", "tabulate t, w(t), w*(t) on an equispaced grid over [-1, 1]");
  add_target_options(sample, sample_target, /*required=*/true);
  add_solver_options(sample, sample_common);
  add_output_options(sample, sample_common, /*csv_available=*/true);
  sample->add_option("--grid", grid_points, "number of grid points (default 129)");
  sample->callback([&] {
    const coneproj::ProblemSpec spec = build_spec(sample_target, sample_common);
    if (sample_common.format == "csv") {
      write_output(coneproj::sample_csv(spec, grid_points), sample_common.out);
    } else if (sample_common.format == "json") {
      write_output(pretty(coneproj::sample_json(spec, grid_points)), sample_common.out);
    } else {
      throw std::invalid_argument("format: expected json or csv");
    }
  });

  CommonOptions demo_common;
  std::vector<std::size_t> demo_truncations{10, 50, 100, 400};
  auto* demo = app.add_subcommand(
      "nonclosed-demo",
      "quantify how the truncated alternating series stays away from its out-of-cone limit");
  demo->add_option("--truncation", demo_truncations,
                   "series truncation orders (default 10,50,100,400)")
      ->delimiter(',');
  add_output_options(demo, demo_common);
  demo->callback([&] {
    require_json_format(demo_common);
    json rows = json::array();
    for (const std::size_t n : demo_truncations) {
      rows.push_back(to_json(coneproj::nonclosedness_witness(n)));
    }
    write_output(pretty(json{{"rows", rows}}), demo_common.out);
  });

  std::string batch_input;
  CommonOptions batch_common;
  auto* batch = app.add_subcommand("batch", "run a JSON array of problem specs in order");
  batch->add_option("--input", batch_input, "path to a JSON array of problem specs")->required();
  add_output_options(batch, batch_common);
  batch->callback([&] {
    require_json_format(batch_common);
    write_output(pretty(coneproj::batch_run(json::parse(read_file(batch_input)))),
                 batch_common.out);
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      return app.exit(e);  // --help and friends
    }
    app.exit(e);
    return 2;
  } catch (const coneproj::UnresolvedRegime& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const json::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const coneproj::MomentUnavailable& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::domain_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 1;
  }
  return exit_code;
}
