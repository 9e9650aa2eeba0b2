#include "coneproj/cone.hpp"

#include <utility>

namespace coneproj {

namespace {

bool exponent_is_odd(std::size_t e) { return (e % 2) != 0; }

// <|t|^beta, t^e> over the interval.
Rational power_moment(const Rational& beta, std::size_t e, Interval interval) {
  if (interval == Interval::SymmetricUnit) {
    if (exponent_is_odd(e)) {
      return 0;
    }
    return 2 / (beta + e + 1);
  }
  return 1 / (beta + e + 1);
}

// <sgn(t)|t|^gamma, t^e> over the interval.
Rational signed_power_moment(const Rational& gamma, std::size_t e, Interval interval) {
  if (interval == Interval::SymmetricUnit) {
    if (!exponent_is_odd(e)) {
      return 0;
    }
    return 2 / (gamma + e + 1);
  }
  return 1 / (gamma + e + 1);
}

// <1(t >= a), t^e> over the interval.
Rational indicator_moment(const Rational& a, std::size_t e, Interval interval) {
  Rational lower = a;
  if (interval == Interval::Unit && lower < 0) {
    lower = 0;
  }
  return (1 - rational_pow(lower, e + 1)) / (e + 1);
}

}  // namespace

Rational gram_entry(const GeneratorFamily& family, std::size_t i, std::size_t j) {
  const std::size_t total = family.exponent(i) + family.exponent(j);
  if (family.interval == Interval::SymmetricUnit) {
    if (exponent_is_odd(total)) {
      return 0;
    }
    return Rational(2, total + 1);
  }
  return Rational(1, total + 1);
}

Target Target::power(Rational beta) {
  if (beta < 0) {
    throw std::invalid_argument("power target: beta must be >= 0");
  }
  return Target(PowerTarget{std::move(beta)});
}

Target Target::signed_power(Rational gamma) {
  if (gamma < 0) {
    throw std::invalid_argument("signed-power target: gamma must be >= 0");
  }
  return Target(SignedPowerTarget{std::move(gamma)});
}

Target Target::indicator(Rational threshold) {
  if (threshold < -1 || threshold >= 1) {
    throw std::invalid_argument("indicator target: a must lie in [-1, 1)");
  }
  return Target(IndicatorTarget{std::move(threshold)});
}

Target Target::power_mixture(std::size_t m, std::vector<PowerAtom> atoms) {
  if (atoms.empty()) {
    throw std::invalid_argument("power-mixture target: atoms must be non-empty");
  }
  for (const PowerAtom& atom : atoms) {
    if (atom.alpha < 0 || atom.alpha > 2) {
      throw std::invalid_argument("power-mixture target: atom alpha must lie in [0, 2]");
    }
    if (atom.weight < 0) {
      throw std::invalid_argument("power-mixture target: atom weight must be >= 0");
    }
  }
  return Target(PowerMixtureTarget{m, std::move(atoms)});
}

Target Target::monotone_step(std::vector<StepAtom> atoms) {
  if (atoms.empty()) {
    throw std::invalid_argument("monotone target: atoms must be non-empty");
  }
  for (const StepAtom& atom : atoms) {
    if (atom.weight < 0) {
      throw std::invalid_argument("monotone target: atom weight must be >= 0");
    }
    if (atom.threshold < 0 ||
        cmp_sqrt(atom.threshold, Rational(1, 5)) == std::strong_ordering::greater) {
      throw AtomOutOfRange("monotone target: atom a = " + to_fraction_string(atom.threshold) +
                           " outside [0, 1/sqrt(5)]");
    }
  }
  return Target(MonotoneStepTarget{std::move(atoms)});
}

Target Target::explicit_moments(std::vector<Rational> moments, std::optional<Rational> norm_sq) {
  if (moments.empty()) {
    throw std::invalid_argument("moments target: moment list must be non-empty");
  }
  if (norm_sq && *norm_sq < 0) {
    throw std::invalid_argument("moments target: norm_sq must be >= 0");
  }
  return Target(ExplicitMomentsTarget{std::move(moments), std::move(norm_sq)});
}

std::optional<std::size_t> Target::max_moment_index() const {
  if (const auto* list = std::get_if<ExplicitMomentsTarget>(&value_)) {
    return list->moments.size() - 1;
  }
  return std::nullopt;
}

Rational moment(const ConeProblem& problem, std::size_t index) {
  const std::size_t e = problem.family.exponent(index);
  const Interval interval = problem.family.interval;
  const Target::Value& v = problem.target.value();

  if (const auto* power = std::get_if<PowerTarget>(&v)) {
    return power_moment(power->beta, e, interval);
  }
  if (const auto* signed_power = std::get_if<SignedPowerTarget>(&v)) {
    return signed_power_moment(signed_power->gamma, e, interval);
  }
  if (const auto* indicator = std::get_if<IndicatorTarget>(&v)) {
    return indicator_moment(indicator->threshold, e, interval);
  }
  if (const auto* mixture = std::get_if<PowerMixtureTarget>(&v)) {
    Rational acc = 0;
    for (const PowerAtom& atom : mixture->atoms) {
      acc += atom.weight * power_moment(2 * mixture->m + atom.alpha, e, interval);
    }
    return acc;
  }
  if (const auto* steps = std::get_if<MonotoneStepTarget>(&v)) {
    Rational acc = 0;
    for (const StepAtom& atom : steps->atoms) {
      acc += atom.weight * indicator_moment(atom.threshold, e, interval);
    }
    return acc;
  }
  const auto& list = std::get<ExplicitMomentsTarget>(v);
  if (index >= list.moments.size()) {
    throw MomentUnavailable("moment index " + std::to_string(index) +
                            " beyond supplied list of size " + std::to_string(list.moments.size()));
  }
  return list.moments[index];
}

std::optional<Rational> norm_squared(const Target& target) {
  return norm_squared(target, Interval::SymmetricUnit);
}

std::optional<Rational> norm_squared(const Target& target, Interval interval) {
  const Rational full = interval == Interval::SymmetricUnit ? 2 : 1;
  const Target::Value& v = target.value();

  if (const auto* power = std::get_if<PowerTarget>(&v)) {
    return full / (2 * power->beta + 1);
  }
  if (const auto* signed_power = std::get_if<SignedPowerTarget>(&v)) {
    return full / (2 * signed_power->gamma + 1);
  }
  if (const auto* indicator = std::get_if<IndicatorTarget>(&v)) {
    Rational lower = indicator->threshold;
    if (interval == Interval::Unit && lower < 0) {
      lower = 0;
    }
    return 1 - lower;
  }
  if (const auto* mixture = std::get_if<PowerMixtureTarget>(&v)) {
    Rational acc = 0;
    for (const PowerAtom& a : mixture->atoms) {
      for (const PowerAtom& b : mixture->atoms) {
        acc += a.weight * b.weight * full / (4 * mixture->m + a.alpha + b.alpha + 1);
      }
    }
    return acc;
  }
  if (const auto* steps = std::get_if<MonotoneStepTarget>(&v)) {
    Rational acc = 0;
    for (const StepAtom& a : steps->atoms) {
      for (const StepAtom& b : steps->atoms) {
        const Rational& cutoff = a.threshold > b.threshold ? a.threshold : b.threshold;
        acc += a.weight * b.weight * (1 - cutoff);
      }
    }
    return acc;
  }
  return std::get<ExplicitMomentsTarget>(v).norm_sq;
}

bool check_closedness_condition(std::span<const MassPoint> positive_atoms,
                                std::span<const MassPoint> negative_atoms, const Rational& bound,
                                std::size_t n_max) {
  if (bound <= 0) {
    throw std::invalid_argument("closedness check: bound must be > 0");
  }
  for (const MassPoint& atom : positive_atoms) {
    if (atom.point < 0 || atom.mass <= 0) {
      throw std::invalid_argument("closedness check: positive atoms need point >= 0, mass > 0");
    }
  }
  for (const MassPoint& atom : negative_atoms) {
    if (atom.point >= 0 || atom.mass <= 0) {
      throw std::invalid_argument("closedness check: negative atoms need point < 0, mass > 0");
    }
  }
  for (std::size_t n = 0; n <= n_max; ++n) {
    Rational negative_sum = 0;
    for (const MassPoint& atom : negative_atoms) {
      negative_sum += atom.mass * rational_pow(atom.point, 2 * n);
    }
    Rational positive_sum = 0;
    for (const MassPoint& atom : positive_atoms) {
      positive_sum += atom.mass * rational_pow(atom.point, 2 * n);
    }
    if (negative_sum > bound * positive_sum) {
      return false;
    }
  }
  return true;
}

}  // namespace coneproj
