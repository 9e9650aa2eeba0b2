#include "coneproj/closedform.hpp"

#include <array>
#include <cmath>
#include <vector>

namespace coneproj {

namespace {

Rational square(const Rational& v) { return v * v; }

void require_alpha(const Rational& alpha) {
  if (alpha < 0 || alpha > 2) {
    throw std::invalid_argument("closed form: alpha must lie in [0, 2]");
  }
}

ActiveSetSolution build_solution(std::span<const std::pair<std::size_t, Rational>> entries) {
  ActiveSetSolution solution;
  for (const auto& [exponent, value] : entries) {
    if (value != 0) {
      solution.support.push_back(exponent);
      solution.coefficients.push_back(value);
    }
  }
  return solution;
}

}  // namespace

std::string to_string(IndicatorRegime regime) {
  switch (regime) {
    case IndicatorRegime::TwoTerm:
      return "two-term";
    case IndicatorRegime::ThreeTerm:
      return "three-term";
    case IndicatorRegime::FourTerm:
      return "four-term";
    case IndicatorRegime::Unresolved:
      return "unresolved";
  }
  return "unresolved";
}

IndicatorRegime classify_indicator(const Rational& a) {
  if (a < -1 || a >= 1) {
    throw std::invalid_argument("classify_indicator: a must lie in [-1, 1)");
  }
  const Rational fifth(1, 5);
  if (a <= 0) {
    // a >= -1/sqrt(5), decided as (-a)^2 <= 1/5.
    return cmp_sqrt(-a, fifth) != std::strong_ordering::greater ? IndicatorRegime::TwoTerm
                                                                : IndicatorRegime::Unresolved;
  }
  if (cmp_sqrt(a, fifth) != std::strong_ordering::greater) {
    return IndicatorRegime::ThreeTerm;
  }
  // Upper edge a < (sqrt(105) - 5)/10, decided as (a + 1/2)^2 < 105/100.
  if (cmp_sqrt(a + Rational(1, 2), Rational(105, 100)) == std::strong_ordering::less) {
    return IndicatorRegime::FourTerm;
  }
  return IndicatorRegime::Unresolved;
}

std::optional<PowerSplit> split_even_power(const Rational& beta) {
  if (beta < 0) {
    return std::nullopt;
  }
  const BigInt half = rational_floor(beta / 2);
  PowerSplit split;
  split.m = half.convert_to<std::size_t>();
  split.alpha = beta - 2 * Rational(half);
  return split;
}

std::optional<PowerSplit> split_odd_power(const Rational& gamma) {
  if (gamma < 1) {
    return std::nullopt;
  }
  const BigInt half = rational_floor((gamma - 1) / 2);
  PowerSplit split;
  split.m = half.convert_to<std::size_t>();
  split.alpha = gamma - 1 - 2 * Rational(half);
  return split;
}

std::pair<Rational, Rational> project_power(std::size_t m, const Rational& alpha) {
  require_alpha(alpha);
  const Rational denom = (4 * Rational(m) + 1 + alpha) * (4 * Rational(m) + 3 + alpha);
  const Rational low = Rational((4 * m + 1) * (4 * m + 3)) / denom * (2 - alpha) / 2;
  const Rational high = Rational((4 * m + 3) * (4 * m + 5)) / denom * alpha / 2;
  return {low, high};
}

std::pair<Rational, Rational> power_distance(std::size_t m, const Rational& alpha) {
  require_alpha(alpha);
  const Rational p = 4 * Rational(m) + 1 + alpha;
  const Rational q = 4 * Rational(m) + 3 + alpha;
  const Rational dist_sq =
      2 * square(alpha) * square(2 - alpha) / ((4 * Rational(m) + 2 * alpha + 1) * square(p) * square(q));
  const Rational rel = alpha * (2 - alpha) / (p * q);
  return {dist_sq, rel};
}

std::pair<Rational, Rational> project_signed_power(std::size_t m, const Rational& alpha) {
  require_alpha(alpha);
  const Rational denom = (4 * Rational(m) + 3 + alpha) * (4 * Rational(m) + 5 + alpha);
  const Rational low = Rational((4 * m + 3) * (4 * m + 5)) / denom * (2 - alpha) / 2;
  const Rational high = Rational((4 * m + 5) * (4 * m + 7)) / denom * alpha / 2;
  return {low, high};
}

std::pair<Rational, Rational> signed_power_distance(std::size_t m, const Rational& alpha) {
  require_alpha(alpha);
  const Rational p = 4 * Rational(m) + 3 + alpha;
  const Rational q = 4 * Rational(m) + 5 + alpha;
  const Rational dist_sq =
      2 * square(alpha) * square(2 - alpha) / ((4 * Rational(m) + 2 * alpha + 3) * square(p) * square(q));
  const Rational rel = alpha * (2 - alpha) / (p * q);
  return {dist_sq, rel};
}

IndicatorProjection project_indicator(const Rational& a) {
  IndicatorRegime regime = classify_indicator(a);
  if (regime == IndicatorRegime::Unresolved) {
    if (a == -1) {
      // 1(t >= -1) is the constant generator itself; the two-term formulas
      // reproduce it exactly ((1-a)/2 = 1, 3(1-a^2)/4 = 0).
      regime = IndicatorRegime::TwoTerm;
    } else {
      throw UnresolvedRegime("no closed form for indicator threshold a = " +
                             to_fraction_string(a));
    }
  }

  const Rational a2 = a * a;
  std::vector<std::pair<std::size_t, Rational>> entries;
  switch (regime) {
    case IndicatorRegime::TwoTerm:
      entries = {{0, (1 - a) / 2}, {1, 3 * (1 - a2) / 4}};
      break;
    case IndicatorRegime::ThreeTerm:
      entries = {{0, (4 - 9 * a + 5 * a * a2) / 8},
                 {1, 3 * (1 - a2) / 4},
                 {2, 15 * (a - a * a2) / 8}};
      break;
    case IndicatorRegime::FourTerm:
      entries = {{0, (1 - a) * (4 - 5 * a - 5 * a2) / 8},
                 {1, 15 * (1 - a2) * (3 - 7 * a2) / 32},
                 {2, 15 * a * (1 - a2) / 8},
                 {3, 35 * (1 - a2) * (5 * a2 - 1) / 32}};
      break;
    case IndicatorRegime::Unresolved:
      break;  // unreachable
  }

  IndicatorProjection result;
  result.regime = regime;
  result.solution = build_solution(entries);
  return result;
}

std::pair<Rational, Rational> project_power_mixture(std::size_t m,
                                                    std::span<const PowerAtom> atoms) {
  Rational low = 0;
  Rational high = 0;
  for (const PowerAtom& atom : atoms) {
    const auto [a, b] = project_power(m, atom.alpha);
    low += atom.weight * a;
    high += atom.weight * b;
  }
  return {low, high};
}

MonotoneQuadratic project_monotone(std::span<const StepAtom> atoms) {
  MonotoneQuadratic result{0, 0, 0};
  for (const StepAtom& atom : atoms) {
    if (atom.weight < 0) {
      throw std::invalid_argument("monotone projection: atom weight must be >= 0");
    }
    if (atom.threshold < 0 ||
        cmp_sqrt(atom.threshold, Rational(1, 5)) == std::strong_ordering::greater) {
      throw AtomOutOfRange("monotone projection: atom a = " + to_fraction_string(atom.threshold) +
                           " outside [0, 1/sqrt(5)]");
    }
    // Three-term indicator formulas; at a = 0 the quadratic part vanishes and
    // they reduce to the two-term pair.
    const Rational& a = atom.threshold;
    const Rational a2 = a * a;
    result.constant += atom.weight * (4 - 9 * a + 5 * a * a2) / 8;
    result.linear += atom.weight * 3 * (1 - a2) / 4;
    result.quadratic += atom.weight * 15 * (a - a * a2) / 8;
  }
  return result;
}

namespace {

// Shared tail-certificate core for the two power families. The scaled
// residual at order index k is a quadratic in k; matching it against
// 2 alpha (2 - alpha) [(2k - 2m - 1)^2 - 1] at 21 points pins the identity,
// and certify_quadratic_nonneg settles the sign for every integer k >= 0.
TailCertificate certify_power_family(std::size_t m, const Rational& alpha, bool odd_orders) {
  require_alpha(alpha);
  TailCertificate cert;
  cert.family = odd_orders ? "signed-power" : "power";
  cert.parameters = "m=" + std::to_string(m) + ", alpha=" + to_fraction_string(alpha);
  cert.finite_checks = 21;

  const auto [low, high] =
      odd_orders ? project_signed_power(m, alpha) : project_power(m, alpha);
  const std::size_t offset = odd_orders ? 3 : 1;  // first inner-product denominator
  const Rational scale_head = odd_orders
                                  ? (4 * Rational(m) + 3 + alpha) * (4 * Rational(m) + 5 + alpha)
                                  : (4 * Rational(m) + 1 + alpha) * (4 * Rational(m) + 3 + alpha);

  bool ok = true;
  for (std::size_t k = 0; k <= 20 && ok; ++k) {
    const Rational da(2 * m + 2 * k + offset);
    const Rational db(2 * m + 2 * k + offset + 2);
    const Rational dc = Rational(2 * m + 2 * k + offset) + alpha;
    const Rational direct =
        scale_head * da * db * dc * (2 * low / da + 2 * high / db - 2 / dc);
    const long long shifted = 2 * static_cast<long long>(k) - 2 * static_cast<long long>(m) - 1;
    const Rational reduced = 2 * alpha * (2 - alpha) * (shifted * shifted - 1);
    ok = direct == reduced;
  }

  const Rational s = 2 * alpha * (2 - alpha);
  const long long center = 2 * static_cast<long long>(m) + 1;
  IntQuadratic q{4 * s, -4 * s * center, s * (center * center - 1)};
  cert.algebraic_ok = ok && certify_quadratic_nonneg(q, 0);
  return cert;
}

}  // namespace

TailCertificate certify_power_tail(std::size_t m, const Rational& alpha) {
  return certify_power_family(m, alpha, /*odd_orders=*/false);
}

TailCertificate certify_signed_tail(std::size_t m, const Rational& alpha) {
  return certify_power_family(m, alpha, /*odd_orders=*/true);
}

TailCertificate certify_indicator_tail(const Rational& a, IndicatorRegime regime) {
  if (regime == IndicatorRegime::Unresolved) {
    throw UnresolvedRegime("cannot certify an unresolved indicator threshold a = " +
                           to_fraction_string(a));
  }
  TailCertificate cert;
  cert.family = "indicator";
  cert.parameters = "a=" + to_fraction_string(a) + ", regime=" + to_string(regime);
  cert.finite_checks = 41;

  const IndicatorProjection projection = project_indicator(a);
  const ConeProblem problem{GeneratorFamily{}, Target::indicator(a)};
  const VerificationReport window = verify_candidate(problem, projection.solution, 40);

  bool algebraic = false;
  if (a == -1) {
    // In-cone target: the residuals vanish identically, nothing left to bound.
    algebraic = true;
  } else {
    switch (regime) {
      case IndicatorRegime::TwoTerm:
      case IndicatorRegime::ThreeTerm:
        // Tail bound applies for a^2 <= 1/5 on either side of zero.
        algebraic = cmp_sqrt(a < 0 ? -a : a, Rational(1, 5)) != std::strong_ordering::greater;
        break;
      case IndicatorRegime::FourTerm: {
        const Rational a2 = a * a;
        algebraic = 3 - 5 * a2 > 0 && 3 - 10 * a2 > 0 && 3 - 35 * a2 * a2 > 0 &&
                    -1 + 15 * a2 - 35 * a2 * a2 >= 0;
        break;
      }
      case IndicatorRegime::Unresolved:
        break;  // unreachable
    }
  }
  cert.algebraic_ok = algebraic && window.accepted();
  return cert;
}

namespace {

struct QuadratureRule {
  std::array<double, 64> nodes{};
  std::array<double, 64> weights{};
};

// 64-point Gauss-Legendre rule on [-1, 1]; nodes by Newton iteration on P_64.
const QuadratureRule& gauss_rule() {
  static const QuadratureRule rule = [] {
    QuadratureRule r;
    constexpr int n = 64;
    for (int i = 0; i < n / 2; ++i) {
      double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
      double dp = 0;
      for (int iter = 0; iter < 100; ++iter) {
        double prev = 0.0;
        double p = 1.0;
        for (int j = 1; j <= n; ++j) {
          const double next = ((2 * j - 1) * x * p - (j - 1) * prev) / j;
          prev = p;
          p = next;
        }
        dp = n * (x * p - prev) / (x * x - 1.0);
        const double dx = p / dp;
        x -= dx;
        if (std::abs(dx) < 1e-15) {
          break;
        }
      }
      const double w = 2.0 / ((1.0 - x * x) * dp * dp);
      r.nodes[i] = x;
      r.weights[i] = w;
      r.nodes[n - 1 - i] = -x;
      r.weights[n - 1 - i] = w;
    }
    return r;
  }();
  return rule;
}

// Truncated alternating series sum_{k=0}^{N} (k+1)(-t)^k, Horner form.
double partial_sum(double t, std::size_t n) {
  double acc = static_cast<double>(n + 1);
  for (std::size_t k = n; k-- > 0;) {
    acc = acc * (-t) + static_cast<double>(k + 1);
  }
  return acc;
}

}  // namespace

NonClosednessWitness nonclosedness_witness(std::size_t truncation) {
  const QuadratureRule& rule = gauss_rule();
  constexpr int panels = 8;
  double integral = 0;
  for (int p = 0; p < panels; ++p) {
    const double lo = static_cast<double>(p) / panels;
    const double hi = static_cast<double>(p + 1) / panels;
    const double mid = 0.5 * (lo + hi);
    const double half = 0.5 * (hi - lo);
    for (int i = 0; i < 64; ++i) {
      const double t = mid + half * rule.nodes[i];
      const double limit = 1.0 / ((1.0 + t) * (1.0 + t));
      const double diff = partial_sum(t, truncation) - limit;
      integral += half * rule.weights[i] * diff * diff;
    }
  }

  NonClosednessWitness witness;
  witness.truncation = truncation;
  witness.norm_estimate = std::sqrt(integral);
  witness.lower_bound =
      (static_cast<double>(truncation) + 2.0) / (2.0 * std::sqrt(2.0 * truncation + 3.0)) - 1.0;
  return witness;
}

std::optional<ClosedFormProjection> closed_form_projection(const Target& target) {
  if (const auto* power = target.get_if<PowerTarget>()) {
    const auto split = split_even_power(power->beta);
    if (!split) {
      return std::nullopt;
    }
    const auto [low, high] = project_power(split->m, split->alpha);
    ClosedFormProjection result;
    const std::pair<std::size_t, Rational> entries[] = {{2 * split->m, low},
                                                        {2 * split->m + 2, high}};
    result.solution = build_solution(entries);
    result.certificate = certify_power_tail(split->m, split->alpha);
    return result;
  }
  if (const auto* signed_power = target.get_if<SignedPowerTarget>()) {
    const auto split = split_odd_power(signed_power->gamma);
    if (!split) {
      return std::nullopt;  // gamma < 1: no two-generator closed form
    }
    const auto [low, high] = project_signed_power(split->m, split->alpha);
    ClosedFormProjection result;
    const std::pair<std::size_t, Rational> entries[] = {{2 * split->m + 1, low},
                                                        {2 * split->m + 3, high}};
    result.solution = build_solution(entries);
    result.certificate = certify_signed_tail(split->m, split->alpha);
    return result;
  }
  if (const auto* indicator = target.get_if<IndicatorTarget>()) {
    const Rational& a = indicator->threshold;
    if (classify_indicator(a) == IndicatorRegime::Unresolved && a != -1) {
      return std::nullopt;
    }
    const IndicatorProjection projection = project_indicator(a);
    ClosedFormProjection result;
    result.solution = projection.solution;
    result.certificate = certify_indicator_tail(a, projection.regime);
    return result;
  }
  if (const auto* mixture = target.get_if<PowerMixtureTarget>()) {
    const auto [low, high] = project_power_mixture(mixture->m, mixture->atoms);
    ClosedFormProjection result;
    const std::pair<std::size_t, Rational> entries[] = {{2 * mixture->m, low},
                                                        {2 * mixture->m + 2, high}};
    result.solution = build_solution(entries);
    result.certificate.family = "power-mixture";
    result.certificate.parameters =
        "m=" + std::to_string(mixture->m) + ", atoms=" + std::to_string(mixture->atoms.size());
    result.certificate.finite_checks = 21;
    result.certificate.algebraic_ok = true;
    for (const PowerAtom& atom : mixture->atoms) {
      // Every atom shares the support {t^2m, t^(2m+2)} and its equalities, so
      // atom-wise certificates cover the weighted sum.
      result.certificate.algebraic_ok =
          result.certificate.algebraic_ok && certify_power_tail(mixture->m, atom.alpha).algebraic_ok;
    }
    return result;
  }
  if (const auto* steps = target.get_if<MonotoneStepTarget>()) {
    const MonotoneQuadratic quad = project_monotone(steps->atoms);
    ClosedFormProjection result;
    const std::pair<std::size_t, Rational> entries[] = {
        {0, quad.constant}, {1, quad.linear}, {2, quad.quadratic}};
    result.solution = build_solution(entries);
    result.certificate.family = "monotone";
    result.certificate.parameters = "atoms=" + std::to_string(steps->atoms.size());
    result.certificate.finite_checks = 41;
    bool atoms_ok = true;
    for (const StepAtom& atom : steps->atoms) {
      atoms_ok = atoms_ok &&
                 cmp_sqrt(atom.threshold, Rational(1, 5)) != std::strong_ordering::greater;
    }
    const ConeProblem problem{GeneratorFamily{}, target};
    const VerificationReport window = verify_candidate(problem, result.solution, 40);
    result.certificate.algebraic_ok = atoms_ok && window.accepted();
    return result;
  }
  return std::nullopt;  // explicit moment lists carry no closed form
}

}  // namespace coneproj
