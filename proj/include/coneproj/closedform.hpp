#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>

#include "coneproj/cone.hpp"
#include "coneproj/projector.hpp"

namespace coneproj {

/// Requested a closed form for a step threshold outside the classified bands.
class UnresolvedRegime : public std::runtime_error {
 public:
  explicit UnresolvedRegime(const std::string& what) : std::runtime_error(what) {}
};

/// Which closed-form band an indicator threshold a falls in:
///   TwoTerm    a in [-1/sqrt(5), 0]        support {1, t}
///   ThreeTerm  a in (0, 1/sqrt(5)]         support {1, t, t^2}
///   FourTerm   a in (1/sqrt(5), (sqrt(105)-5)/10)   support {1, t, t^2, t^3}
/// Everything else is Unresolved. Band membership is decided exactly by
/// squaring against the rational radicands (cmp_sqrt), never by floating point.
enum class IndicatorRegime { TwoTerm, ThreeTerm, FourTerm, Unresolved };

std::string to_string(IndicatorRegime regime);

IndicatorRegime classify_indicator(const Rational& a);

/// beta = 2m + alpha with integer m >= 0 and alpha in [0, 2).
struct PowerSplit {
  std::size_t m = 0;
  Rational alpha;
};

/// Decomposition of an even-power exponent; empty only for beta < 0.
std::optional<PowerSplit> split_even_power(const Rational& beta);

/// gamma = 2m + 1 + alpha with alpha in [0, 2); empty for gamma < 1, where the
/// two-generator closed form does not apply.
std::optional<PowerSplit> split_odd_power(const Rational& gamma);

/// Projection of |t|^(2m+alpha) onto the cone: coefficients (x_2m, x_2m+2).
/// Valid for alpha in [0, 2]; both endpoints land in the cone and return an
/// exact representation.
std::pair<Rational, Rational> project_power(std::size_t m, const Rational& alpha);

/// (squared distance, relative distance) for the power projection. The
/// relative distance ||w - w*|| / ||w|| is itself rational.
std::pair<Rational, Rational> power_distance(std::size_t m, const Rational& alpha);

/// Projection of sgn(t)|t|^(2m+1+alpha): coefficients (x_2m+1, x_2m+3).
std::pair<Rational, Rational> project_signed_power(std::size_t m, const Rational& alpha);

std::pair<Rational, Rational> signed_power_distance(std::size_t m, const Rational& alpha);

struct IndicatorProjection {
  IndicatorRegime regime = IndicatorRegime::Unresolved;
  ActiveSetSolution solution;  // exponents ascending from 0, zeros dropped
};

/// Closed-form projection of 1(t >= a) in the classified bands. a = -1 is the
/// constant generator itself and projects to itself; other thresholds outside
/// the bands throw UnresolvedRegime.
IndicatorProjection project_indicator(const Rational& a);

/// Projection of sum_i w_i |t|^(2m+alpha_i): combined coefficients (A, B) on
/// {t^2m, t^(2m+2)}. Linear in the atoms because every atom shares that
/// support and its equalities.
std::pair<Rational, Rational> project_power_mixture(std::size_t m,
                                                    std::span<const PowerAtom> atoms);

struct MonotoneQuadratic {
  Rational constant;
  Rational linear;
  Rational quadratic;
};

/// Projection of a non-decreasing step function with thresholds in
/// [0, 1/sqrt(5)]: a quadratic with non-negative coefficients.
MonotoneQuadratic project_monotone(std::span<const StepAtom> atoms);

/// Outcome of an algebraic residual-tail check. finite_checks counts the
/// directly verified orders; algebraic_ok extends them to every order.
struct TailCertificate {
  std::string family;
  std::string parameters;
  std::size_t finite_checks = 0;
  bool algebraic_ok = false;
};

/// Certifies the power projection at every even order: the scaled residual
/// equals the quadratic 2a(2-a)[(2k-2m-1)^2 - 1] in the order index k (checked
/// at 21 points, which pins a quadratic), and that quadratic is certified
/// non-negative over all integers k >= 0.
TailCertificate certify_power_tail(std::size_t m, const Rational& alpha);

/// Same scheme at odd orders for the signed power projection.
TailCertificate certify_signed_tail(std::size_t m, const Rational& alpha);

/// Certifies the indicator projection's residual tail: the band's polynomial
/// conditions hold exactly at a, plus a residual window through order 40.
TailCertificate certify_indicator_tail(const Rational& a, IndicatorRegime regime);

/// Numerical witness that the infinite-generator cone fails to be closed: the
/// truncated alternating series sum_(k<=N) (k+1)(-t)^k stays far from its
/// cone-external L^2([0,1]) limit 1/(1+t)^2 in a quantified way.
struct NonClosednessWitness {
  std::size_t truncation = 0;
  double norm_estimate = 0;  // ||partial sum - limit||, composite Gauss quadrature
  double lower_bound = 0;    // (N+2) / (2 sqrt(2N+3)) - 1
};

NonClosednessWitness nonclosedness_witness(std::size_t truncation);

/// Closed-form projection plus its tail certificate, when the target belongs
/// to a certified family over the default generator family (all monomials on
/// [-1, 1]). Empty for explicit moment lists, signed powers with gamma < 1
/// and unresolved indicator thresholds.
struct ClosedFormProjection {
  ActiveSetSolution solution;
  TailCertificate certificate;
};

std::optional<ClosedFormProjection> closed_form_projection(const Target& target);

}  // namespace coneproj
