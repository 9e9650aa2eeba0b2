#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "coneproj/exact.hpp"

namespace coneproj {

/// Requested moment index exceeds what the target can supply.
class MomentUnavailable : public std::runtime_error {
 public:
  explicit MomentUnavailable(const std::string& what) : std::runtime_error(what) {}
};

/// Step-target atom outside [0, 1/sqrt(5)], where no quadratic closed form holds.
class AtomOutOfRange : public std::invalid_argument {
 public:
  explicit AtomOutOfRange(const std::string& what) : std::invalid_argument(what) {}
};

enum class Interval { SymmetricUnit, Unit };  // [-1, 1] vs [0, 1]
enum class Stride { All, Even };              // exponents n vs 2n

/// Generator family {t^e(n)} in L^2 over the chosen interval. The cone under
/// study is the set of finite non-negative combinations of these monomials.
struct GeneratorFamily {
  Interval interval = Interval::SymmetricUnit;
  Stride stride = Stride::All;

  std::size_t exponent(std::size_t index) const {
    return stride == Stride::Even ? 2 * index : index;
  }

  bool operator==(const GeneratorFamily&) const = default;
};

/// <t^e(i), t^e(j)> over the family's interval, exactly.
Rational gram_entry(const GeneratorFamily& family, std::size_t i, std::size_t j);

// ---- Targets -------------------------------------------------------------
// Each target is a function w whose inner products against the generators are
// exact rationals. Validation happens in the Target factories; the data
// structs themselves are plain carriers.

struct PowerTarget {
  Rational beta;  // w(t) = |t|^beta, beta >= 0
  bool operator==(const PowerTarget&) const = default;
};

struct SignedPowerTarget {
  Rational gamma;  // w(t) = sgn(t) |t|^gamma, gamma >= 0
  bool operator==(const SignedPowerTarget&) const = default;
};

struct IndicatorTarget {
  Rational threshold;  // w(t) = 1(t >= a), a in [-1, 1)
  bool operator==(const IndicatorTarget&) const = default;
};

struct PowerAtom {
  Rational alpha;   // exponent offset in [0, 2]
  Rational weight;  // >= 0
  bool operator==(const PowerAtom&) const = default;
};

/// w(t) = sum_i weight_i * |t|^(2m + alpha_i).
struct PowerMixtureTarget {
  std::size_t m = 0;
  std::vector<PowerAtom> atoms;
  bool operator==(const PowerMixtureTarget&) const = default;
};

struct StepAtom {
  Rational threshold;  // in [0, 1/sqrt(5)]
  Rational weight;     // >= 0
  bool operator==(const StepAtom&) const = default;
};

/// w(t) = sum_i weight_i * 1(t >= a_i), a non-decreasing step function.
struct MonotoneStepTarget {
  std::vector<StepAtom> atoms;
  bool operator==(const MonotoneStepTarget&) const = default;
};

/// Raw moment list <w, t^e(j)> for j = 0..moments.size()-1; the function
/// itself stays abstract. norm_sq enables distance output when supplied.
struct ExplicitMomentsTarget {
  std::vector<Rational> moments;
  std::optional<Rational> norm_sq;
  bool operator==(const ExplicitMomentsTarget&) const = default;
};

class Target {
 public:
  using Value = std::variant<PowerTarget, SignedPowerTarget, IndicatorTarget, PowerMixtureTarget,
                             MonotoneStepTarget, ExplicitMomentsTarget>;

  static Target power(Rational beta);
  static Target signed_power(Rational gamma);
  static Target indicator(Rational threshold);
  static Target power_mixture(std::size_t m, std::vector<PowerAtom> atoms);
  static Target monotone_step(std::vector<StepAtom> atoms);
  static Target explicit_moments(std::vector<Rational> moments,
                                 std::optional<Rational> norm_sq = std::nullopt);

  const Value& value() const { return value_; }

  template <typename T>
  const T* get_if() const {
    return std::get_if<T>(&value_);
  }

  /// Largest generator index with a computable moment; empty when every index
  /// is available (all targets except explicit moment lists).
  std::optional<std::size_t> max_moment_index() const;

  bool operator==(const Target&) const = default;

 private:
  explicit Target(Value v) : value_(std::move(v)) {}
  Value value_;
};

/// A projection instance: which cone (family) and which function to project.
struct ConeProblem {
  GeneratorFamily family;
  Target target;
};

/// <w, t^e(index)> over the family's interval. Throws MomentUnavailable when
/// an explicit moment list is too short.
Rational moment(const ConeProblem& problem, std::size_t index);

/// ||w||^2 over [-1, 1]; empty for moment lists without a supplied norm.
std::optional<Rational> norm_squared(const Target& target);
std::optional<Rational> norm_squared(const Target& target, Interval interval);

struct MassPoint {
  Rational point;
  Rational mass;  // > 0
};

/// Checks the discrete-measure domination condition
///   sum_neg mass * t^(2n) <= bound * sum_pos mass * t^(2n)  for n = 0..n_max,
/// the finite prefix of the criterion separating measures whose atom layout
/// keeps the generated cone closed. Positive atoms must lie at points >= 0,
/// negative atoms at points < 0.
bool check_closedness_condition(std::span<const MassPoint> positive_atoms,
                                std::span<const MassPoint> negative_atoms, const Rational& bound,
                                std::size_t n_max);

}  // namespace coneproj
