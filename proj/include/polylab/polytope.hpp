#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "polylab/lp.hpp"
#include "polylab/matrix.hpp"
#include "polylab/norms.hpp"

namespace polylab {

/// K_N = Γ*B₁^N: the absolute convex hull of the rows of Γ (N×n, N ≥ n).
class Polytope {
 public:
  /// Throws std::domain_error if N < n, n = 0, or an entry is not finite.
  explicit Polytope(Matrix generator);

  const Matrix& generator() const { return gamma_; }
  const Matrix& transposed() const { return gamma_t_; }
  std::size_t dim() const { return gamma_.cols(); }
  std::size_t count() const { return gamma_.rows(); }

 private:
  Matrix gamma_;
  Matrix gamma_t_;
};

struct GeometryEstimate {
  double point_estimate = 0.0;
  double std_error = 0.0;
  std::size_t samples = 0;
  std::string method;
  bool zero_hits = false;  // volume_mc: the estimate is only an upper-bound-free zero
};

/// h_{K_N}(z) = ‖Γz‖∞.
double support_KN(const Polytope& p, std::span<const double> z);

struct GaugeResult {
  double value = 0.0;   // +inf when y is outside the span of the rows
  Vector certificate;   // x with Γᵀx = y and ‖x‖₁ = value
  bool feasible = true;
};

/// ‖y‖_{K_N} = min ‖x‖₁ subject to Γᵀx = y.
GaugeResult gauge_KN(const Polytope& p, std::span<const double> y);

/// gauge ≤ t + 1e−9, with a cheap rejection when ‖y‖₂² > t·‖Γy‖∞.
bool member_KN(const Polytope& p, std::span<const double> y, double t = 1.0);

struct QuotientReport {
  double scale = 0.0;          // √(n / ln(eN/n))
  std::vector<double> ratios;  // gauge / scale per sample, +inf when infeasible
  std::size_t infeasible = 0;
  double max_ratio = 0.0;
  double q05 = 0.0, q50 = 0.0, q95 = 0.0;
  double k_target = 0.0;
  bool pass = false;
};

/// Draws y with mixed_norm_kkr(y, N) = 1 (half sphere, half sign-vector
/// directions) and reports gauge_KN(y) / √(n/ln(eN/n)).
QuotientReport quotient_check(const Polytope& p, double k_target, std::size_t samples, std::uint64_t seed);

struct InclusionReport {
  double dual_min = 0.0;          // min over sampled z ∈ ∂L° of ‖Γz‖∞
  bool dual_event = false;        // some sampled z has ‖Γz‖∞ < 1/4
  double primal_largest_C = 0.0;  // min over sampled boundary points w of 1/‖w‖_{K_N}
  std::size_t dual_samples = 0;
  std::size_t primal_samples = 0;
  std::size_t infeasible = 0;
  bool consistent = true;         // dual_min ≥ primal_largest_C / c (up to 1e−7)
};

/// Dual test over ∂L° and primal test over the boundary of B∞ⁿ ∩ αB₂ⁿ.
/// The primal sample set includes the maximizer of h_L at every dual
/// sample, so a consistency violation indicates a numerical error.
InclusionReport inclusion_check(const Polytope& p, const IntersectionBody& body, std::size_t samples,
                                std::uint64_t seed);

struct VolumeEstimate {
  GeometryEstimate root;  // |K_N|^{1/n}
  double volume = 0.0;
  double volume_std_error = 0.0;
  double box_volume = 0.0;
  std::size_t hits = 0;
};

/// Hit-or-miss in the box Π[−b_i, b_i], b_i = max_j |Γ_ji|.
/// Throws SizeError for n > 12, std::domain_error for samples = 0.
VolumeEstimate volume_mc(const Polytope& p, std::size_t samples, std::uint64_t seed);

/// Exact area of the planar hull of ±rows. Throws std::domain_error unless n = 2.
double volume_exact_2d(const Polytope& p);

/// E‖G‖₂ for a standard Gaussian vector in ℝⁿ.
double expected_gaussian_norm(std::size_t n);

/// M(K_N) = E‖G‖_{K_N} / E‖G‖₂. Throws NumericalFailure if some sample is
/// outside the span of the rows.
GeometryEstimate mean_width_M(const Polytope& p, std::size_t samples, std::uint64_t seed);

/// M(K_N°) = M*(K_N) = E‖ΓG‖∞ / E‖G‖₂.
GeometryEstimate mean_width_polar(const Polytope& p, std::size_t samples, std::uint64_t seed);

struct SantaloReport {
  double volume_K = 0.0, volume_K_se = 0.0;
  double volume_polar = 0.0, volume_polar_se = 0.0;
  double ratio = 0.0;  // |K||K°| / |B₂ⁿ|²
  double ratio_se = 0.0;
  bool pass = false;   // ratio ≤ 1 + 3σ
};

/// Throws SizeError for n > 4.
SantaloReport santalo_check(const Polytope& p, std::size_t samples, std::uint64_t seed);

/// |B₂ⁿ| = π^{n/2} / Γ(n/2 + 1).
double ball_volume(std::size_t n);

struct ConditionReport {
  bool cond13 = false;  // max row norm ≤ λ√n
  bool cond14 = false;  // ‖Γ‖_HS ≥ √(Nn)/2
  bool cond15 = false;  // ‖Γ‖ ≤ μ√N
  double max_row_norm = 0.0;
  double hs = 0.0;
  double op_norm = 0.0;
};

ConditionReport check_conditions(const Matrix& g, double lambda, double mu);

}  // namespace polylab
