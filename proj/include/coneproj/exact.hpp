#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <compare>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>

namespace coneproj {

// Arbitrary-precision integers and rationals. cpp_rational keeps every value
// canonical (gcd-reduced, positive denominator) after each operation, which is
// what the strict sign tests in the projector rely on.
using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

/// Parses "p", "-p" or "p/q". Throws std::invalid_argument on malformed input
/// or a zero denominator.
Rational parse_rational(std::string_view text);

/// Renders as "p" or "p/q" (q > 1). Inverse of parse_rational.
std::string to_fraction_string(const Rational& value);

double to_double(const Rational& value);

/// Largest integer <= value.
BigInt rational_floor(const Rational& value);

/// base^exponent with a non-negative integer exponent.
Rational rational_pow(const Rational& base, std::size_t exponent);

/// Exact square root when value is the square of a rational, otherwise empty.
std::optional<Rational> exact_sqrt(const Rational& value);

/// true iff gcd(|num|, den) = 1 and den > 0. Maintained automatically by
/// Rational; exposed so tests can assert it on public results.
bool is_canonical(const Rational& value);

/// Order of q relative to sqrt(s), decided exactly by sign analysis plus
/// squaring. Requires s >= 0.
std::strong_ordering cmp_sqrt(const Rational& q, const Rational& s);

/// p(k) = c2*k^2 + c1*k + c0 over integer arguments k.
struct IntQuadratic {
  Rational c2;
  Rational c1;
  Rational c0;

  Rational eval(const BigInt& k) const;
};

/// Decides p(k) >= 0 for every integer k >= k_min, exactly. A positive leading
/// coefficient reduces the check to k_min and the integers bracketing the
/// vertex; a negative one fails outright on the unbounded domain.
bool certify_quadratic_nonneg(const IntQuadratic& p, const BigInt& k_min);

}  // namespace coneproj
