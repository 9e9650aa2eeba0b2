#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "coneproj/exact.hpp"

namespace coneproj {

class SingularMatrix : public std::runtime_error {
 public:
  explicit SingularMatrix(const std::string& what) : std::runtime_error(what) {}
};

/// Dense row-major matrix of exact rationals.
class RationalMatrix {
 public:
  RationalMatrix(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), entries_(rows * cols) {}

  static RationalMatrix identity(std::size_t n);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  Rational& operator()(std::size_t i, std::size_t j) { return entries_[i * cols_ + j]; }
  const Rational& operator()(std::size_t i, std::size_t j) const { return entries_[i * cols_ + j]; }

 private:
  std::size_t rows_;
  std::size_t cols_;
  std::vector<Rational> entries_;
};

std::vector<Rational> multiply(const RationalMatrix& m, std::span<const Rational> x);

/// Solves M x = y exactly by Gaussian elimination with largest-magnitude
/// column pivoting. The solution is re-multiplied against M before returning.
/// Throws SingularMatrix when a pivot column vanishes.
std::vector<Rational> solve_linear_exact(const RationalMatrix& m, std::span<const Rational> y);

/// Determinant via the same pivoted elimination.
Rational determinant_exact(RationalMatrix m);

}  // namespace coneproj
