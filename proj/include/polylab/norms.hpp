#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "polylab/ensembles.hpp"
#include "polylab/matrix.hpp"

namespace polylab {

/// Disjoint index blocks (0-based) and the sum of blockwise ℓ2 norms.
struct PartitionCertificate {
  std::vector<std::vector<std::size_t>> blocks;
  double value = 0.0;
};

/// ℓ2 norm of the k largest absolute entries. Throws std::domain_error unless 1 ≤ k ≤ N.
double k_norm(std::span<const double> a, std::size_t k);

/// Montgomery-Smith norm |||z|||_m by enumerating every partition into at most
/// m blocks. Throws SizeError for n > 12 and std::domain_error for m = 0.
PartitionCertificate ms_norm_brute(std::span<const double> z, std::size_t m);

/// Greedy lower bound for |||z|||_m: squared entries, largest first, go into
/// the block with the smallest current mass.
PartitionCertificate ms_norm_heuristic(std::span<const double> z, std::size_t m);

/// Block partition built from a witness y ∈ B∞ⁿ ∩ αB₂ⁿ: singletons where
/// y_k² ≥ 1/2, then maximal runs with Σ y_i² ≤ 1/2 over the remaining indices.
/// The value is evaluated at x and is at least ⟨x, y⟩.
/// Throws std::domain_error if y is not in the body or sizes differ.
PartitionCertificate ms_block_partition(std::span<const double> y, std::span<const double> x, double alpha);

/// Support function of B∞ⁿ ∩ αB₂ⁿ, minimized exactly over the soft-threshold
/// parametrization Σ(|z_i| − τ)₊ + α·√(Σ min(|z_i|, τ)²). Requires α > 0.
double support_cube_cap(std::span<const double> z, double alpha);

/// A point y of B∞ⁿ ∩ αB₂ⁿ with ⟨z, y⟩ = support_cube_cap(z, α).
Vector support_cube_cap_maximizer(std::span<const double> z, double alpha);

/// L = c·(B∞ⁿ ∩ αB₂ⁿ) with α = R = √(β ln(N/n)/C_v).
struct IntersectionBody {
  std::size_t n = 0;
  double c = 1.0;
  double alpha = 1.0;
  double beta = 0.5;
  double C_v = 1.0;

  /// Builds the body for an n×N problem from the small-ball constants.
  /// Throws std::domain_error for β ∉ (0,1), N ≤ n, or a non-positive radius.
  static IntersectionBody from_constants(std::size_t n, std::size_t big_n, double beta, const SmallBallConstants& k);
  /// Explicit body. Throws std::domain_error for c ∉ (0,1] or α ≤ 0.
  static IntersectionBody explicit_body(std::size_t n, double c, double alpha);
};

/// h_L(z) = c·support_cube_cap(z, α); also the gauge of L°.
double h_L(const IntersectionBody& body, std::span<const double> z);

/// Points on ∂L°: a 0.4 / 0.4 / 0.2 mixture of sparse signed directions,
/// uniform sphere directions and convex combinations of the two, each scaled
/// so that h_L(z) = 1.
std::vector<Vector> sample_boundary_L_polar(const IntersectionBody& body, std::size_t count, std::uint64_t seed);

/// max(‖y‖₂, √ln(eN/n)·‖y‖∞). Throws std::domain_error if N < n.
double mixed_norm_kkr(std::span<const double> y, std::size_t big_n);

}  // namespace polylab
