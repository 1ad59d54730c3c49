#include "polylab/polytope.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "polylab/errors.hpp"
#include "polylab/linalg.hpp"
#include "polylab/rng.hpp"

namespace polylab {

namespace {

double quantile(std::vector<double> v, double q) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const double pos = q * double(v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, v.size() - 1);
  const double w = pos - double(lo);
  if (std::isinf(v[hi])) return w > 0.0 ? v[hi] : v[lo];
  return v[lo] * (1.0 - w) + v[hi] * w;
}

Vector gaussian_vector(CounterRng& rng, std::size_t n) {
  Vector g(n);
  for (double& v : g) v = rng.normal();
  return g;
}

Vector sign_vector(CounterRng& rng, std::size_t n) {
  Vector s(n);
  for (double& v : s) v = rng.sign();
  return s;
}

// Boundary points of B∞ⁿ ∩ αB₂ⁿ along assorted directions.
Vector cube_cap_boundary(CounterRng& rng, std::size_t n, double alpha) {
  const double pick = rng.uniform();
  Vector u;
  if (pick < 1.0 / 3.0) {
    u = gaussian_vector(rng, n);
  } else if (pick < 2.0 / 3.0) {
    u = sign_vector(rng, n);
  } else {
    // ±1 on about α² coordinates, smaller mass elsewhere.
    u.assign(n, 0.0);
    const auto ones = std::min<std::size_t>(n, static_cast<std::size_t>(std::floor(alpha * alpha)));
    for (std::size_t t = 0; t < std::max<std::size_t>(ones, 1); ++t) u[rng.below(n)] = rng.sign();
    for (double& v : u)
      if (v == 0.0) v = 0.3 * rng.uniform(-1.0, 1.0);
  }
  const double g = std::max(norm_inf(u), norm2(u) / alpha);
  if (g == 0.0) {
    u.assign(n, 0.0);
    u[0] = std::min(1.0, alpha);
    return u;
  }
  for (double& v : u) v /= g;
  return u;
}

// Hit-or-miss volume in Π[−b_i, b_i].
struct HitCount {
  std::size_t hits = 0;
  double box = 1.0;
};

template <class Member>
HitCount hit_or_miss(const Vector& b, std::size_t samples, std::uint64_t seed, Member&& member) {
  HitCount h;
  for (double v : b) h.box *= 2.0 * v;
  Vector x(b.size());
  for (std::size_t s = 0; s < samples; ++s) {
    CounterRng rng(derive_seed(seed, s));
    for (std::size_t i = 0; i < b.size(); ++i) x[i] = rng.uniform(-b[i], b[i]);
    h.hits += member(x);
  }
  return h;
}

}  // namespace

Polytope::Polytope(Matrix generator) : gamma_(std::move(generator)) {
  if (gamma_.cols() == 0) throw std::domain_error("Polytope: n must be positive");
  if (gamma_.rows() < gamma_.cols()) throw std::domain_error("Polytope: need N ≥ n");
  if (!gamma_.all_finite()) throw std::domain_error("Polytope: non-finite generator entry");
  gamma_t_ = gamma_.transpose();
}

double support_KN(const Polytope& p, std::span<const double> z) {
  if (z.size() != p.dim()) throw std::domain_error("support_KN: dimension mismatch");
  return norm_inf(p.generator().apply(z));
}

GaugeResult gauge_KN(const Polytope& p, std::span<const double> y) {
  if (y.size() != p.dim()) throw std::domain_error("gauge_KN: dimension mismatch");
  const auto sol = l1_min(p.transposed(), y);
  GaugeResult r;
  if (sol.status != LpStatus::optimal) {
    r.feasible = false;
    r.value = HUGE_VAL;
    return r;
  }
  r.value = sol.value;
  r.certificate = sol.point;
  return r;
}

bool member_KN(const Polytope& p, std::span<const double> y, double t) {
  if (!(t > 0.0)) throw std::domain_error("member_KN: t must be positive");
  const double h = support_KN(p, y);
  // ‖y‖₂² = ⟨y, y⟩ ≤ ‖y‖_K · h_K(y).
  if (dot(y, y) > t * h * (1.0 + 1e-12)) return false;
  return gauge_KN(p, y).value <= t + 1e-9;
}

QuotientReport quotient_check(const Polytope& p, double k_target, std::size_t samples, std::uint64_t seed) {
  if (samples == 0) throw std::domain_error("quotient_check: samples must be positive");
  const std::size_t n = p.dim(), big_n = p.count();
  QuotientReport r;
  r.k_target = k_target;
  r.scale = std::sqrt(double(n) / std::log(std::exp(1.0) * double(big_n) / double(n)));
  r.ratios.reserve(samples);
  for (std::size_t s = 0; s < samples; ++s) {
    CounterRng rng(derive_seed(seed, s));
    Vector y = rng.uniform() < 0.5 ? gaussian_vector(rng, n) : sign_vector(rng, n);
    const double w = mixed_norm_kkr(y, big_n);
    for (double& v : y) v /= w;
    const auto g = gauge_KN(p, y);
    r.infeasible += !g.feasible;
    r.ratios.push_back(g.value / r.scale);
  }
  r.max_ratio = *std::max_element(r.ratios.begin(), r.ratios.end());
  r.q05 = quantile(r.ratios, 0.05);
  r.q50 = quantile(r.ratios, 0.50);
  r.q95 = quantile(r.ratios, 0.95);
  r.pass = r.infeasible == 0 && r.max_ratio <= k_target;
  return r;
}

InclusionReport inclusion_check(const Polytope& p, const IntersectionBody& body, std::size_t samples,
                                std::uint64_t seed) {
  if (samples == 0) throw std::domain_error("inclusion_check: samples must be positive");
  if (body.n != p.dim()) throw std::domain_error("inclusion_check: body dimension mismatch");
  const std::size_t n = p.dim();
  InclusionReport r;
  const auto zs = sample_boundary_L_polar(body, samples, derive_seed(seed, 0));
  r.dual_min = HUGE_VAL;
  std::vector<Vector> primal;
  for (const auto& z : zs) {
    r.dual_min = std::min(r.dual_min, support_KN(p, z));
    primal.push_back(support_cube_cap_maximizer(z, body.alpha));
  }
  r.dual_samples = zs.size();
  r.dual_event = r.dual_min < 0.25;
  for (std::size_t s = 0; s < samples; ++s) {
    CounterRng rng(derive_seed(derive_seed(seed, 1), s));
    primal.push_back(cube_cap_boundary(rng, n, body.alpha));
  }
  r.primal_largest_C = HUGE_VAL;
  for (const auto& w : primal) {
    const auto g = gauge_KN(p, w);
    if (!g.feasible) {
      ++r.infeasible;
      r.primal_largest_C = 0.0;
      continue;
    }
    if (g.value > 0.0) r.primal_largest_C = std::min(r.primal_largest_C, 1.0 / g.value);
  }
  r.primal_samples = primal.size();
  r.consistent = r.dual_min >= r.primal_largest_C / body.c * (1.0 - 1e-7) - 1e-12;
  return r;
}

VolumeEstimate volume_mc(const Polytope& p, std::size_t samples, std::uint64_t seed) {
  const std::size_t n = p.dim();
  if (n > 12) throw SizeError("volume_mc: n > 12 is beyond the hit-rate guard");
  if (samples == 0) throw std::domain_error("volume_mc: samples must be positive");
  Vector b(n, 0.0);
  for (std::size_t j = 0; j < p.count(); ++j)
    for (std::size_t i = 0; i < n; ++i) b[i] = std::max(b[i], std::abs(p.generator()(j, i)));
  for (double v : b)
    if (v == 0.0) throw NumericalFailure("volume_mc: degenerate polytope (zero coordinate extent)");
  const auto h = hit_or_miss(b, samples, seed, [&](const Vector& x) { return member_KN(p, x, 1.0); });
  VolumeEstimate e;
  e.hits = h.hits;
  e.box_volume = h.box;
  const double s = double(samples), q = double(h.hits) / s;
  e.volume = q * h.box;
  e.volume_std_error = h.box * std::sqrt(q * (1.0 - q) / s);
  e.root.samples = samples;
  e.root.method = "hit_or_miss_box";
  if (h.hits == 0) {
    e.root.zero_hits = true;
    e.root.point_estimate = 0.0;
    // One hit would give this much; reported as the resolution limit.
    e.root.std_error = std::pow(h.box / s, 1.0 / double(n));
    return e;
  }
  e.root.point_estimate = std::pow(e.volume, 1.0 / double(n));
  e.root.std_error = e.root.point_estimate / (double(n) * e.volume) * e.volume_std_error;
  return e;
}

double volume_exact_2d(const Polytope& p) {
  if (p.dim() != 2) throw std::domain_error("volume_exact_2d: needs n = 2");
  std::vector<std::pair<double, double>> pts;
  for (std::size_t j = 0; j < p.count(); ++j) {
    const double x = p.generator()(j, 0), y = p.generator()(j, 1);
    pts.emplace_back(x, y);
    pts.emplace_back(-x, -y);
  }
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  if (pts.size() < 3) return 0.0;
  auto cross = [](auto o, auto a, auto b) {
    return (a.first - o.first) * (b.second - o.second) - (a.second - o.second) * (b.first - o.first);
  };
  std::vector<std::pair<double, double>> hull(2 * pts.size());
  std::size_t k = 0;
  for (const auto& q : pts) {
    while (k >= 2 && cross(hull[k - 2], hull[k - 1], q) <= 0) --k;
    hull[k++] = q;
  }
  for (std::size_t i = pts.size() - 1, t = k + 1; i-- > 0;) {
    while (k >= t && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0) --k;
    hull[k++] = pts[i];
  }
  hull.resize(k - 1);
  double area = 0.0;
  for (std::size_t i = 0; i < hull.size(); ++i) {
    const auto& a = hull[i];
    const auto& b = hull[(i + 1) % hull.size()];
    area += a.first * b.second - b.first * a.second;
  }
  return std::abs(area) / 2.0;
}

double expected_gaussian_norm(std::size_t n) {
  if (n == 0) throw std::domain_error("expected_gaussian_norm: n must be positive");
  return std::sqrt(2.0) * std::exp(std::lgamma((double(n) + 1.0) / 2.0) - std::lgamma(double(n) / 2.0));
}

namespace {

template <class F>
GeometryEstimate gaussian_average(std::size_t n, std::size_t samples, std::uint64_t seed, const char* method, F&& f) {
  if (samples == 0) throw std::domain_error("mean width: samples must be positive");
  double sum = 0.0, sum2 = 0.0;
  for (std::size_t s = 0; s < samples; ++s) {
    CounterRng rng(derive_seed(seed, s));
    const double v = f(gaussian_vector(rng, n));
    if (!std::isfinite(v)) throw NumericalFailure(std::string(method) + ": sample outside the span of the rows");
    sum += v;
    sum2 += v * v;
  }
  const double m = double(samples), mean = sum / m;
  const double var = samples > 1 ? std::max(0.0, (sum2 - m * mean * mean) / (m - 1.0)) : 0.0;
  const double en = expected_gaussian_norm(n);
  GeometryEstimate e;
  e.point_estimate = mean / en;
  e.std_error = std::sqrt(var / m) / en;
  e.samples = samples;
  e.method = method;
  return e;
}

}  // namespace

GeometryEstimate mean_width_M(const Polytope& p, std::size_t samples, std::uint64_t seed) {
  return gaussian_average(p.dim(), samples, seed, "gaussian_gauge",
                          [&](const Vector& g) { return gauge_KN(p, g).value; });
}

GeometryEstimate mean_width_polar(const Polytope& p, std::size_t samples, std::uint64_t seed) {
  return gaussian_average(p.dim(), samples, seed, "gaussian_support",
                          [&](const Vector& g) { return support_KN(p, g); });
}

SantaloReport santalo_check(const Polytope& p, std::size_t samples, std::uint64_t seed) {
  const std::size_t n = p.dim();
  if (n > 4) throw SizeError("santalo_check: n > 4 is beyond the guard");
  SantaloReport r;
  const auto k = volume_mc(p, samples, derive_seed(seed, 0));
  // K° = {x : ‖Γx‖∞ ≤ 1}; its extent along e_i is h_{K°}(e_i) = ‖e_i‖_K.
  Vector b(n);
  for (std::size_t i = 0; i < n; ++i) {
    Vector e(n, 0.0);
    e[i] = 1.0;
    b[i] = gauge_KN(p, e).value;
    if (!std::isfinite(b[i])) throw NumericalFailure("santalo_check: polar body is unbounded");
  }
  const auto h = hit_or_miss(b, samples, derive_seed(seed, 1),
                             [&](const Vector& x) { return support_KN(p, x) <= 1.0; });
  const double s = double(samples), q = double(h.hits) / s;
  r.volume_K = k.volume;
  r.volume_K_se = k.volume_std_error;
  r.volume_polar = q * h.box;
  r.volume_polar_se = h.box * std::sqrt(q * (1.0 - q) / s);
  const double b2 = ball_volume(n) * ball_volume(n);
  r.ratio = r.volume_K * r.volume_polar / b2;
  r.ratio_se = std::sqrt(std::pow(r.volume_K_se * r.volume_polar, 2) + std::pow(r.volume_K * r.volume_polar_se, 2)) / b2;
  r.pass = r.ratio <= 1.0 + 3.0 * r.ratio_se;
  return r;
}

double ball_volume(std::size_t n) {
  const double h = double(n) / 2.0;
  return std::exp(h * std::log(std::numbers::pi) - std::lgamma(h + 1.0));
}

ConditionReport check_conditions(const Matrix& g, double lambda, double mu) {
  if (!(lambda > 0.0) || !(mu > 0.0)) throw std::domain_error("check_conditions: λ and μ must be positive");
  ConditionReport r;
  const double n = double(g.cols()), big_n = double(g.rows());
  for (std::size_t i = 0; i < g.rows(); ++i) r.max_row_norm = std::max(r.max_row_norm, norm2(g.row(i)));
  r.hs = hs_norm(g);
  r.op_norm = operator_norm(g);
  r.cond13 = r.max_row_norm <= lambda * std::sqrt(n);
  r.cond14 = r.hs >= std::sqrt(big_n * n) / 2.0;
  r.cond15 = r.op_norm <= mu * std::sqrt(big_n);
  return r;
}

}  // namespace polylab
