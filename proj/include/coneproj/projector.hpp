#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "coneproj/cone.hpp"

namespace coneproj {

/// The exhaustive oracle found zero or several accepting supports. For a
/// strictly convex problem this indicates a broken invariant, so it is an
/// error rather than a report field.
class UniquenessViolation : public std::runtime_error {
 public:
  explicit UniquenessViolation(const std::string& what) : std::runtime_error(what) {}
};

/// Active-set iteration exceeded its safeguard cap.
class NonTermination : public std::runtime_error {
 public:
  explicit NonTermination(const std::string& what) : std::runtime_error(what) {}
};

/// Finite non-negative combination sum_k x_k t^e(k): either a candidate under
/// test or an accepted projection. support is sorted ascending and
/// coefficients aligns with it; accepted solutions carry strictly positive
/// coefficients only.
struct ActiveSetSolution {
  std::vector<std::size_t> support;
  std::vector<Rational> coefficients;

  Rational coefficient(std::size_t index) const;
  bool contains(std::size_t index) const;
  bool operator==(const ActiveSetSolution&) const = default;
};

/// Outcome of checking a candidate against the optimality conditions:
/// residual r_j = <w* - w, t^e(j)> vanishes on the support, is >= 0 off it,
/// and the coefficients are strictly positive. All checks are exact.
struct VerificationReport {
  std::size_t checked_orders = 0;  // residuals examined for j = 0..checked_orders
  bool equality_ok = false;
  bool inequality_ok = false;
  bool positivity_ok = false;
  bool orthogonality_ok = false;       // <w - w*, w*> == 0
  bool certified_all_orders = false;   // set when an algebraic tail certificate applies
  std::vector<Rational> residuals;     // residuals[j] for j = 0..checked_orders

  bool accepted() const { return equality_ok && inequality_ok && positivity_ok; }
};

struct Violation {
  enum class Kind { Positivity, Equality, Inequality };
  Kind kind;
  std::size_t index;  // generator index of the offending coefficient/residual
  Rational value;
};

std::string to_string(Violation::Kind kind);

/// First failed condition: non-positive coefficients in ascending support
/// order, then residual violations in ascending order. Empty when accepted.
std::optional<Violation> first_violation(const VerificationReport& report,
                                         const ActiveSetSolution& candidate);

struct ProjectionReport {
  ActiveSetSolution solution;
  VerificationReport verification;
  std::optional<Rational> distance_sq;      // ||w - w*||^2
  std::optional<Rational> rel_distance_sq;  // distance_sq / ||w||^2
};

/// Solves the square system  sum_{k in S} x_k <t^e(k), t^e(j)> = <w, t^e(j)>
/// for j in S. Coefficients come back aligned with the given support order;
/// signs are not constrained here.
std::vector<Rational> solve_for_active_set(const ConeProblem& problem,
                                           std::span<const std::size_t> support);

/// Number of residual orders checked by the solvers: max(2 * truncation,
/// j_max_request), capped by moment availability and raised to cover the
/// candidate's support.
std::size_t default_check_order(const ConeProblem& problem, std::size_t truncation,
                                std::size_t j_max_request);

/// Exact optimality check of a candidate at orders 0..j_max (capped by moment
/// availability, extended to cover the support).
VerificationReport verify_candidate(const ConeProblem& problem, const ActiveSetSolution& candidate,
                                    std::size_t j_max);

/// Non-negative least squares over generators 0..truncation by the
/// Lawson-Hanson active-set method, run entirely in exact arithmetic. The
/// iteration cap 2^(truncation+2) triggers NonTermination; it has never been
/// observed to bind.
ProjectionReport nnls_active_set(const ConeProblem& problem, std::size_t truncation,
                                 std::size_t j_max_request = 40);

/// Enumerates all 2^(truncation+1) supports and demands exactly one acceptor
/// (UniquenessViolation otherwise). Reference oracle; requires truncation <= 15.
ProjectionReport exhaustive_oracle(const ConeProblem& problem, std::size_t truncation,
                                   std::size_t j_max_request = 40);

/// (||w - w*||^2, ||w - w*||^2 / ||w||^2), both exact. Empty when the target
/// norm is unavailable (explicit moment lists without norm_sq); the relative
/// part is also empty for the zero target. Meaningful for candidates that
/// satisfy the support equalities.
std::pair<std::optional<Rational>, std::optional<Rational>> distance_info(
    const ConeProblem& problem, const ActiveSetSolution& solution);

}  // namespace coneproj
