#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "polylab/matrix.hpp"
#include "polylab/norms.hpp"

namespace polylab {

/// F(δ, n, N) in log space. `value` is +inf when it does not fit in a double.
struct CardinalityF {
  double log_value = 0.0;
  double value = 1.0;
  int branch = 1;  // 1: (32δN/n)^n, 2: (en/(δN))^{4δN}
};

/// Throws std::domain_error for δ ∉ [0, 1] or unless 1 ≤ n ≤ N.
CardinalityF cardinality_F(double delta, std::size_t n, std::size_t big_n);

/// Log of the covering bounds for N(B₂^m, εB∞^m).
double log_cover_ball_inf_bound(std::size_t m, double eps);
/// Log of the bound k ln(3/ε) + k ln(em/k) for the sparse-sphere net.
double log_cover_sparse_sphere_bound(std::size_t m, std::size_t k, double eps);

/// ε-net of B₂^m in ℓ∞: grid centres with spacing 2ε whose cells meet the
/// open ball, restricted to at most ⌊1/ε²⌋ non-zero coordinates when ε > 1/√m.
/// Centres may sit just outside the ball. Throws SizeError when the
/// log-cardinality bound exceeds 24, std::domain_error for ε ∉ (0, 1].
std::vector<Vector> cover_ball_inf(std::size_t m, double eps);

/// Union over supports |J| = k of ε-nets of the unit sphere of ℝ^J; every unit
/// vector supported on J has a net point on the same support within ε in ℓ2.
/// Throws SizeError when the log bound exceeds 24 or the candidate grid is too
/// large, std::domain_error for k ∉ [1, m] or ε ∉ (0, 1).
std::vector<Vector> cover_sparse_sphere(std::size_t m, std::size_t k, double eps);

/// Diagonal with entries in {1} ∪ {2^{−2^k}}; code 0 is 1, code k+1 is 2^{−2^k}.
struct DyadicDiagonal {
  std::vector<std::uint8_t> codes;

  std::size_t size() const { return codes.size(); }
  double entry(std::size_t j) const;
  /// −ln det D = ln 2 · Σ_{codes > 0} 2^{code−1}.
  double neg_log_det() const;
  Vector entries() const;

  friend bool operator==(const DyadicDiagonal&, const DyadicDiagonal&) = default;
};

double dyadic_value(std::uint8_t code);

/// Every D with det D ≥ e^{−δN}. Throws SizeError when more than `cap` exist.
std::vector<DyadicDiagonal> enumerate_Q(double delta, std::size_t n, std::size_t big_n, std::size_t cap = 1000000);

/// Column-wise dyadic shrinkage: d_j is the largest allowed value with
/// d_j·max_i |G_ij| ≤ C₀/√δ, so every row of G·D has ℓ2 norm ≤ C₀√(n/δ).
/// Throws std::domain_error for δ ∉ (0, 1] or C₀ ≤ 0.
DyadicDiagonal compute_D_gamma(const Matrix& g, double delta, double c0 = 1.0);

enum class TKind { sphere, ball, boundary_L_polar, points };

/// The set T being covered.
struct TSpec {
  TKind kind = TKind::sphere;
  std::size_t n = 0;
  IntersectionBody body;        // boundary_L_polar only
  std::vector<Vector> points;   // points only

  static TSpec sphere(std::size_t n);
  static TSpec ball(std::size_t n);
  static TSpec boundary_L_polar(const IntersectionBody& body);
  static TSpec finite(std::vector<Vector> pts);

  /// Distance-free membership with relative slack `tol`.
  bool contains(const Vector& x, double tol = 1e-9) const;
  /// Reproducible samples from T (uniform for sphere/ball).
  std::vector<Vector> sample(std::size_t count, std::uint64_t seed) const;
};

const char* to_string(TKind k);

enum class NetMode { exhaustive, realized };

struct NetParams {
  double delta = 0.5;
  double eps = 0.5;
  std::size_t k = 1;
  std::size_t n = 1;
  std::size_t big_n = 1;
};

/// Box y + ε·D·B∞ⁿ.
struct NetBox {
  Vector center;
  DyadicDiagonal diag;
  double eps = 0.0;

  bool contains(const Vector& x, double tol = 1e-12) const;
};

struct NetBundle {
  TSpec t;
  NetParams params;
  NetMode mode = NetMode::realized;
  std::vector<Vector> points;  // points[i] is the centre of boxes[i]
  std::vector<NetBox> boxes;
  std::size_t M = 0;           // constructed net size at D = I
  std::size_t q_count = 0;     // |Q| (exhaustive) or 1 (realized)
  double log_cardinality_bound = 0.0;  // ln M + ln F(δ,n,N) + δN
  double realized_neg_log_det = 0.0;   // realized mode: −ln det D_Γ
  bool realized_in_Q = true;           // realized mode: det D_Γ ≥ e^{−δN}
};

struct NetOptions {
  double c0 = 1.0;               // constant in the D_Γ surrogate
  std::size_t max_points = 2000000;
  std::size_t q_cap = 100000;
};

/// Builds the net and box family. Exhaustive mode covers every D ∈ Q;
/// realized mode uses the single D = compute_D_gamma(Γ, δ).
/// Throws std::domain_error for inconsistent parameters (including
/// k ln(eN/k) < n) and SizeError when the materialized family is too large.
NetBundle build_net(const TSpec& t, const NetParams& params, NetMode mode, const Matrix* gamma = nullptr,
                    const NetOptions& options = {});

struct NetValidation {
  std::size_t trials = 0;
  double radius = 0.0;
  double max_residual = 0.0;
  double mean_residual = 0.0;
  double pass_fraction = 0.0;
};

/// Samples `trials` points of T and measures min over the net of ‖G(x − y)‖_{k,2}.
NetValidation validate_net(const Matrix& g, const NetBundle& bundle, std::size_t k, double radius, std::size_t trials,
                           std::uint64_t seed);

/// Directory layout: meta.json, points.csv, boxes.csv.
void write_bundle(const NetBundle& bundle, const std::filesystem::path& dir);
NetBundle read_bundle(const std::filesystem::path& dir);

}  // namespace polylab
