#pragma once

#include <cstddef>
#include <limits>
#include <span>

#include "polylab/matrix.hpp"

namespace polylab {

/// Infinite bounds are written as ±kInfinity, the largest finite double. Any
/// bound whose magnitude reaches it is treated as absent, so the pivoting code
/// never touches a non-finite value. ±HUGE_VAL is accepted and mapped to the
/// same convention.
inline constexpr double kInfinity = std::numeric_limits<double>::max();

/// minimize objectiveᵀx  s.t.  eq_matrix·x = eq_rhs,  lower ≤ x ≤ upper.
struct LpProblem {
  Vector objective;
  Matrix eq_matrix;
  Vector eq_rhs;
  Vector lower_bounds;
  Vector upper_bounds;

  /// Problem with all variables in [0, +∞).
  static LpProblem nonnegative(Vector objective, Matrix eq_matrix, Vector eq_rhs);
  /// Throws std::domain_error on inconsistent dimensions or lower > upper.
  void validate() const;
};

enum class LpStatus { optimal, infeasible, unbounded };

struct LpSolution {
  LpStatus status = LpStatus::infeasible;
  double value = 0.0;
  Vector point;
  std::size_t iterations = 0;
};

struct LpOptions {
  double tolerance = 1e-9;
  std::size_t refactor_interval = 50;
  std::size_t max_iterations = 0;  // 0: 50 * (rows + columns) + 1000
};

/// Two-phase primal simplex (revised form, dense explicit basis inverse,
/// Bland's smallest-index rule for both entering and leaving variables).
/// Infeasible and unbounded problems are reported through the status; hitting
/// the iteration cap throws NumericalFailure.
LpSolution lp_solve(const LpProblem& problem, const LpOptions& options = {});

/// min ‖x‖₁ s.t. A x = y, through the split x = x⁺ − x⁻ with x± ≥ 0.
LpSolution l1_min(const Matrix& a, std::span<const double> y, const LpOptions& options = {});

const char* to_string(LpStatus s);

}  // namespace polylab
