#include "coneproj/projector.hpp"

#include <algorithm>

#include "coneproj/linalg.hpp"

namespace coneproj {

Rational ActiveSetSolution::coefficient(std::size_t index) const {
  const auto it = std::lower_bound(support.begin(), support.end(), index);
  if (it == support.end() || *it != index) {
    return 0;
  }
  return coefficients[static_cast<std::size_t>(it - support.begin())];
}

bool ActiveSetSolution::contains(std::size_t index) const {
  return std::binary_search(support.begin(), support.end(), index);
}

std::string to_string(Violation::Kind kind) {
  switch (kind) {
    case Violation::Kind::Positivity:
      return "positivity";
    case Violation::Kind::Equality:
      return "equality";
    case Violation::Kind::Inequality:
      return "inequality";
  }
  return "unknown";
}

std::optional<Violation> first_violation(const VerificationReport& report,
                                         const ActiveSetSolution& candidate) {
  for (std::size_t k = 0; k < candidate.support.size(); ++k) {
    if (candidate.coefficients[k] <= 0) {
      return Violation{Violation::Kind::Positivity, candidate.support[k],
                       candidate.coefficients[k]};
    }
  }
  for (std::size_t j = 0; j < report.residuals.size(); ++j) {
    const Rational& r = report.residuals[j];
    if (candidate.contains(j)) {
      if (r != 0) {
        return Violation{Violation::Kind::Equality, j, r};
      }
    } else if (r < 0) {
      return Violation{Violation::Kind::Inequality, j, r};
    }
  }
  return std::nullopt;
}

std::vector<Rational> solve_for_active_set(const ConeProblem& problem,
                                           std::span<const std::size_t> support) {
  const std::size_t n = support.size();
  if (n == 0) {
    return {};
  }
  RationalMatrix m(n, n);
  std::vector<Rational> rhs(n);
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = 0; b < n; ++b) {
      m(a, b) = gram_entry(problem.family, support[a], support[b]);
    }
    rhs[a] = moment(problem, support[a]);
  }
  return solve_linear_exact(m, rhs);
}

std::size_t default_check_order(const ConeProblem& problem, std::size_t truncation,
                                std::size_t j_max_request) {
  std::size_t order = std::max(2 * truncation, j_max_request);
  if (const auto available = problem.target.max_moment_index()) {
    order = std::min(order, *available);
  }
  return order;
}

VerificationReport verify_candidate(const ConeProblem& problem, const ActiveSetSolution& candidate,
                                    std::size_t j_max) {
  std::size_t order = j_max;
  if (const auto available = problem.target.max_moment_index()) {
    order = std::min(order, *available);
  }
  if (!candidate.support.empty()) {
    // Support equalities are mandatory, so the residual window must cover them.
    order = std::max(order, candidate.support.back());
  }

  VerificationReport report;
  report.checked_orders = order;
  report.residuals.resize(order + 1);
  report.equality_ok = true;
  report.inequality_ok = true;

  for (std::size_t j = 0; j <= order; ++j) {
    Rational r = -moment(problem, j);
    for (std::size_t k = 0; k < candidate.support.size(); ++k) {
      r += candidate.coefficients[k] * gram_entry(problem.family, candidate.support[k], j);
    }
    if (candidate.contains(j)) {
      if (r != 0) {
        report.equality_ok = false;
      }
    } else if (r < 0) {
      report.inequality_ok = false;
    }
    report.residuals[j] = std::move(r);
  }

  report.positivity_ok =
      std::all_of(candidate.coefficients.begin(), candidate.coefficients.end(),
                  [](const Rational& x) { return x > 0; });

  // <w - w*, w*> = sum_k x_k (y_k - (G x)_k) = -sum_{k in S} x_k r_k.
  Rational pairing = 0;
  for (std::size_t k = 0; k < candidate.support.size(); ++k) {
    pairing += candidate.coefficients[k] * report.residuals[candidate.support[k]];
  }
  report.orthogonality_ok = pairing == 0;
  return report;
}

namespace {

ProjectionReport finish_report(const ConeProblem& problem, ActiveSetSolution solution,
                               std::size_t j_max) {
  ProjectionReport report;
  report.verification = verify_candidate(problem, solution, j_max);
  report.solution = std::move(solution);
  auto [dist_sq, rel_sq] = distance_info(problem, report.solution);
  report.distance_sq = std::move(dist_sq);
  report.rel_distance_sq = std::move(rel_sq);
  return report;
}

}  // namespace

ProjectionReport nnls_active_set(const ConeProblem& problem, std::size_t truncation,
                                 std::size_t j_max_request) {
  const std::size_t n = truncation + 1;
  std::vector<Rational> y(n);
  for (std::size_t j = 0; j < n; ++j) {
    y[j] = moment(problem, j);
  }

  std::vector<bool> active(n, false);
  std::vector<Rational> x(n, Rational(0));
  std::vector<std::size_t> support;
  support.reserve(n);

  const unsigned long long cap = 1ull << std::min<std::size_t>(truncation + 2, 62);
  unsigned long long iterations = 0;
  const auto count_iteration = [&] {
    if (++iterations > cap) {
      throw NonTermination("active-set iteration cap " + std::to_string(cap) + " exceeded");
    }
  };

  const auto rebuild_support = [&] {
    support.clear();
    for (std::size_t j = 0; j < n; ++j) {
      if (active[j]) {
        support.push_back(j);
      }
    }
  };

  while (true) {
    count_iteration();

    // Most negative residual among inactive generators enters (ties go to the
    // smallest index via the strict < in the scan).
    std::optional<std::size_t> entering;
    Rational best;
    for (std::size_t j = 0; j < n; ++j) {
      if (active[j]) {
        continue;
      }
      Rational r = -y[j];
      for (const std::size_t k : support) {
        r += x[k] * gram_entry(problem.family, k, j);
      }
      if (r < 0 && (!entering || r < best)) {
        entering = j;
        best = std::move(r);
      }
    }
    if (!entering) {
      break;
    }
    active[*entering] = true;
    rebuild_support();

    while (true) {
      count_iteration();
      const std::vector<Rational> z = solve_for_active_set(problem, support);
      if (std::all_of(z.begin(), z.end(), [](const Rational& v) { return v > 0; })) {
        for (std::size_t k = 0; k < support.size(); ++k) {
          x[support[k]] = z[k];
        }
        break;
      }
      // Walk as far toward z as feasibility allows: theta_k = x_k / (x_k - z_k)
      // over the non-positive entries, with 0/0 read as 0.
      std::optional<std::size_t> leaving;
      Rational theta;
      for (std::size_t k = 0; k < support.size(); ++k) {
        if (z[k] > 0) {
          continue;
        }
        const Rational& xk = x[support[k]];
        const Rational step = (xk == 0 && z[k] == 0) ? Rational(0) : xk / (xk - z[k]);
        if (!leaving || step < theta) {
          leaving = k;
          theta = step;
        }
      }
      for (std::size_t k = 0; k < support.size(); ++k) {
        Rational& xk = x[support[k]];
        xk += theta * (z[k] - xk);
      }
      x[support[*leaving]] = 0;  // exact by construction of theta
      active[support[*leaving]] = false;
      rebuild_support();
    }
  }

  ActiveSetSolution solution;
  rebuild_support();
  solution.support = support;
  for (const std::size_t k : support) {
    solution.coefficients.push_back(x[k]);
  }
  return finish_report(problem, std::move(solution),
                       default_check_order(problem, truncation, j_max_request));
}

ProjectionReport exhaustive_oracle(const ConeProblem& problem, std::size_t truncation,
                                   std::size_t j_max_request) {
  if (truncation > 15) {
    throw std::invalid_argument("exhaustive oracle limited to truncation <= 15");
  }
  const std::size_t n = truncation + 1;
  std::vector<Rational> y(n);
  for (std::size_t j = 0; j < n; ++j) {
    y[j] = moment(problem, j);
  }

  std::size_t acceptors = 0;
  ActiveSetSolution accepted;
  std::vector<std::size_t> support;

  for (std::size_t mask = 0; mask < (std::size_t{1} << n); ++mask) {
    support.clear();
    for (std::size_t j = 0; j < n; ++j) {
      if (mask & (std::size_t{1} << j)) {
        support.push_back(j);
      }
    }
    const std::vector<Rational> z = solve_for_active_set(problem, support);
    if (!std::all_of(z.begin(), z.end(), [](const Rational& v) { return v > 0; })) {
      continue;
    }
    bool feasible = true;
    for (std::size_t j = 0; j < n && feasible; ++j) {
      if (std::binary_search(support.begin(), support.end(), j)) {
        continue;  // equality holds by construction of z
      }
      Rational r = -y[j];
      for (std::size_t k = 0; k < support.size(); ++k) {
        r += z[k] * gram_entry(problem.family, support[k], j);
      }
      feasible = r >= 0;
    }
    if (!feasible) {
      continue;
    }
    ++acceptors;
    if (acceptors == 1) {
      accepted.support = support;
      accepted.coefficients = z;
    }
  }

  if (acceptors != 1) {
    throw UniquenessViolation("expected exactly one accepting support, found " +
                              std::to_string(acceptors));
  }
  return finish_report(problem, std::move(accepted),
                       default_check_order(problem, truncation, j_max_request));
}

std::pair<std::optional<Rational>, std::optional<Rational>> distance_info(
    const ConeProblem& problem, const ActiveSetSolution& solution) {
  const std::optional<Rational> norm_sq = norm_squared(problem.target, problem.family.interval);
  if (!norm_sq) {
    return {std::nullopt, std::nullopt};
  }
  // ||w - w*||^2 = ||w||^2 - 2 <w, w*> + ||w*||^2, all terms exact.
  Rational cross = 0;
  Rational self = 0;
  for (std::size_t a = 0; a < solution.support.size(); ++a) {
    cross += solution.coefficients[a] * moment(problem, solution.support[a]);
    for (std::size_t b = 0; b < solution.support.size(); ++b) {
      self += solution.coefficients[a] * solution.coefficients[b] *
              gram_entry(problem.family, solution.support[a], solution.support[b]);
    }
  }
  Rational dist_sq = *norm_sq - 2 * cross + self;
  if (*norm_sq == 0) {
    return {std::move(dist_sq), std::nullopt};
  }
  Rational rel = dist_sq / *norm_sq;
  return {std::move(dist_sq), std::move(rel)};
}

}  // namespace coneproj
