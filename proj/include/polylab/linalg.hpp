#pragma once

#include <span>

#include "polylab/matrix.hpp"

namespace polylab {

/// (|a|₁*, …, |a|_N*): absolute values sorted in non-increasing order.
Vector decreasing_rearrangement(std::span<const double> a);

struct SymmetricEigen {
  Vector values;   // non-increasing
  Matrix vectors;  // column k is the unit eigenvector of values[k]
};

/// Cyclic Jacobi rotations. Sweeps until the off-diagonal Frobenius mass drops
/// below 1e-14 of the total; throws NumericalFailure after 100 sweeps.
SymmetricEigen symmetric_eigen(const Matrix& a, bool with_vectors = true);

/// Singular values in non-increasing order, length min(rows, cols), obtained
/// from the eigenvalues of the smaller Gram matrix.
Vector singular_values(const Matrix& g);
double smallest_singular_value(const Matrix& g);
double operator_norm(const Matrix& g);
/// Hilbert–Schmidt (Frobenius) norm.
double hs_norm(const Matrix& g);

}  // namespace polylab
