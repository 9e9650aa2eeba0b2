#include "coneproj/linalg.hpp"

#include <utility>

namespace coneproj {

RationalMatrix RationalMatrix::identity(std::size_t n) {
  RationalMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    m(i, i) = 1;
  }
  return m;
}

std::vector<Rational> multiply(const RationalMatrix& m, std::span<const Rational> x) {
  if (x.size() != m.cols()) {
    throw std::invalid_argument("multiply: dimension mismatch");
  }
  std::vector<Rational> result(m.rows());
  for (std::size_t i = 0; i < m.rows(); ++i) {
    Rational acc = 0;
    for (std::size_t j = 0; j < m.cols(); ++j) {
      acc += m(i, j) * x[j];
    }
    result[i] = std::move(acc);
  }
  return result;
}

namespace {

// Forward elimination with row pivoting on the largest |entry|. Keeping the
// pivots large bounds the growth of intermediate numerators/denominators.
void eliminate(RationalMatrix& a, std::vector<Rational>* rhs, int* sign) {
  const std::size_t n = a.rows();
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    for (std::size_t row = col + 1; row < n; ++row) {
      if (abs(a(row, col)) > abs(a(pivot, col))) {
        pivot = row;
      }
    }
    if (a(pivot, col) == 0) {
      throw SingularMatrix("singular matrix: no pivot in column " + std::to_string(col));
    }
    if (pivot != col) {
      for (std::size_t j = col; j < n; ++j) {
        std::swap(a(col, j), a(pivot, j));
      }
      if (rhs != nullptr) {
        std::swap((*rhs)[col], (*rhs)[pivot]);
      }
      if (sign != nullptr) {
        *sign = -*sign;
      }
    }
    for (std::size_t row = col + 1; row < n; ++row) {
      if (a(row, col) == 0) {
        continue;
      }
      const Rational factor = a(row, col) / a(col, col);
      a(row, col) = 0;
      for (std::size_t j = col + 1; j < n; ++j) {
        a(row, j) -= factor * a(col, j);
      }
      if (rhs != nullptr) {
        (*rhs)[row] -= factor * (*rhs)[col];
      }
    }
  }
}

}  // namespace

std::vector<Rational> solve_linear_exact(const RationalMatrix& m, std::span<const Rational> y) {
  const std::size_t n = m.rows();
  if (m.cols() != n || y.size() != n) {
    throw std::invalid_argument("solve_linear_exact: dimension mismatch");
  }
  RationalMatrix a = m;
  std::vector<Rational> b(y.begin(), y.end());
  eliminate(a, &b, nullptr);

  std::vector<Rational> x(n);
  for (std::size_t i = n; i-- > 0;) {
    Rational acc = b[i];
    for (std::size_t j = i + 1; j < n; ++j) {
      acc -= a(i, j) * x[j];
    }
    x[i] = acc / a(i, i);
  }

  // Exact arithmetic admits no rounding, so a residual here means a bug.
  const std::vector<Rational> check = multiply(m, x);
  for (std::size_t i = 0; i < n; ++i) {
    if (check[i] != y[i]) {
      throw std::logic_error("solve_linear_exact: residual after back-substitution");
    }
  }
  return x;
}

Rational determinant_exact(RationalMatrix m) {
  if (m.rows() != m.cols()) {
    throw std::invalid_argument("determinant_exact: matrix not square");
  }
  int sign = 1;
  try {
    eliminate(m, nullptr, &sign);
  } catch (const SingularMatrix&) {
    return 0;
  }
  Rational det = sign;
  for (std::size_t i = 0; i < m.rows(); ++i) {
    det *= m(i, i);
  }
  return det;
}

}  // namespace coneproj
