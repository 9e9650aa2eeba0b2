#include "coneproj/exact.hpp"

#include <sstream>
#include <stdexcept>

namespace coneproj {

namespace {

BigInt parse_integer(std::string_view text, std::string_view whole, bool allow_sign) {
  if (text.empty()) {
    throw std::invalid_argument("invalid rational '" + std::string(whole) + "'");
  }
  bool negative = false;
  if (allow_sign && (text[0] == '+' || text[0] == '-')) {
    negative = text[0] == '-';
    text.remove_prefix(1);
  }
  if (text.empty()) {
    throw std::invalid_argument("invalid rational '" + std::string(whole) + "'");
  }
  for (const char c : text) {
    if (c < '0' || c > '9') {
      throw std::invalid_argument("invalid rational '" + std::string(whole) + "'");
    }
  }
  const BigInt magnitude{std::string(text)};
  return negative ? -magnitude : magnitude;
}

}  // namespace

Rational parse_rational(std::string_view text) {
  const std::size_t slash = text.find('/');
  if (slash == std::string_view::npos) {
    return Rational(parse_integer(text, text, /*allow_sign=*/true));
  }
  const BigInt num = parse_integer(text.substr(0, slash), text, /*allow_sign=*/true);
  const BigInt den = parse_integer(text.substr(slash + 1), text, /*allow_sign=*/false);
  if (den == 0) {
    throw std::invalid_argument("zero denominator in '" + std::string(text) + "'");
  }
  return Rational(num, den);
}

std::string to_fraction_string(const Rational& value) {
  std::ostringstream out;
  out << value;  // prints "p" or "p/q" in lowest terms
  return out.str();
}

double to_double(const Rational& value) { return value.convert_to<double>(); }

BigInt rational_floor(const Rational& value) {
  BigInt quotient = numerator(value) / denominator(value);
  // cpp_int division truncates toward zero; shift down for negative remainders.
  if (quotient * denominator(value) > numerator(value)) {
    --quotient;
  }
  return quotient;
}

Rational rational_pow(const Rational& base, std::size_t exponent) {
  return Rational(pow(numerator(base), static_cast<unsigned>(exponent)),
                  pow(denominator(base), static_cast<unsigned>(exponent)));
}

std::optional<Rational> exact_sqrt(const Rational& value) {
  if (value < 0) {
    return std::nullopt;
  }
  const BigInt num_root = sqrt(numerator(value));
  const BigInt den_root = sqrt(denominator(value));
  if (num_root * num_root != numerator(value) || den_root * den_root != denominator(value)) {
    return std::nullopt;
  }
  return Rational(num_root, den_root);
}

bool is_canonical(const Rational& value) {
  return denominator(value) > 0 && gcd(abs(numerator(value)), denominator(value)) == 1;
}

std::strong_ordering cmp_sqrt(const Rational& q, const Rational& s) {
  if (s < 0) {
    throw std::domain_error("cmp_sqrt: radicand must be non-negative");
  }
  if (q < 0) {
    return std::strong_ordering::less;  // sqrt(s) >= 0 > q
  }
  const Rational q_squared = q * q;
  if (q_squared < s) {
    return std::strong_ordering::less;
  }
  if (q_squared > s) {
    return std::strong_ordering::greater;
  }
  return std::strong_ordering::equal;
}

Rational IntQuadratic::eval(const BigInt& k) const {
  const Rational kk(k);
  return (c2 * kk + c1) * kk + c0;
}

bool certify_quadratic_nonneg(const IntQuadratic& p, const BigInt& k_min) {
  if (p.c2 < 0) {
    return false;  // dominates for large k
  }
  if (p.c2 == 0) {
    if (p.c1 < 0) {
      return false;
    }
    if (p.c1 == 0) {
      return p.c0 >= 0;
    }
    return p.eval(k_min) >= 0;  // increasing line: minimum at the left end
  }
  // Convex parabola: the integer minimum is at k_min or at one of the two
  // integers bracketing the vertex -c1/(2*c2), clamped to the domain.
  BigInt lo = rational_floor(-p.c1 / (2 * p.c2));
  BigInt hi = lo + 1;
  if (lo < k_min) {
    lo = k_min;
  }
  if (hi < k_min) {
    hi = k_min;
  }
  return p.eval(k_min) >= 0 && p.eval(lo) >= 0 && p.eval(hi) >= 0;
}

}  // namespace coneproj
