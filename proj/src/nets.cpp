#include "polylab/nets.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <numbers>
#include <set>
#include <stdexcept>

#include <json.hpp>

#include "polylab/errors.hpp"
#include "polylab/rng.hpp"

namespace polylab {

namespace {

constexpr double kLogGuard = 24.0;
constexpr std::uint8_t kMaxCode = 62;

// Grid centres 2εk (k ∈ ℤ) per coordinate; a centre is kept when its cube
// c + εB∞ meets the open unit ball and it has at most `max_support` non-zeros.
void grid_centres(std::size_t m, double eps, std::size_t max_support, std::vector<Vector>& out) {
  Vector c(m, 0.0);
  const long kmax = static_cast<long>(std::ceil((1.0 + eps) / (2.0 * eps)));
  std::function<void(std::size_t, double, std::size_t)> rec = [&](std::size_t i, double dist2, std::size_t support) {
    if (i == m) {
      out.push_back(c);
      return;
    }
    for (long k = -kmax; k <= kmax; ++k) {
      const std::size_t s = support + (k != 0);
      if (s > max_support) continue;
      const double gap = std::max(0.0, 2.0 * eps * double(std::labs(k)) - eps);
      if (dist2 + gap * gap >= 1.0) continue;
      c[i] = 2.0 * eps * double(k);
      rec(i + 1, dist2 + gap * gap, s);
    }
    c[i] = 0.0;
  };
  rec(0, 0.0, 0);
}

std::vector<std::size_t> first_subset(std::size_t k) {
  std::vector<std::size_t> s(k);
  for (std::size_t i = 0; i < k; ++i) s[i] = i;
  return s;
}

bool next_subset(std::vector<std::size_t>& s, std::size_t m) {
  const std::size_t k = s.size();
  std::size_t i = k;
  while (i > 0 && s[i - 1] == m - k + (i - 1)) --i;
  if (i == 0) return false;
  ++s[i - 1];
  for (std::size_t j = i; j < k; ++j) s[j] = s[j - 1] + 1;
  return true;
}

// Monotone unconditional gauge of T's "radius" function: ‖·‖₂ for the sphere
// and the ball, h_L for ∂L°.
double level(const TSpec& t, std::span<const double> x) {
  return t.kind == TKind::boundary_L_polar ? h_L(t.body, x) : norm2(x);
}

double kth_norm_fast(std::vector<double>& sq, std::size_t k) {
  if (k < sq.size()) std::nth_element(sq.begin(), sq.begin() + long(k), sq.end(), std::greater<>());
  double s = 0.0;
  for (std::size_t i = 0; i < k; ++i) s += sq[i];
  return std::sqrt(s);
}

// Net points of T for one diagonal: one point of T inside every closed cell
// Π[ε d_j k_j, ε d_j (k_j + 1)] that meets T.
std::vector<Vector> cell_net(const TSpec& t, double eps, const Vector& d, std::size_t max_points) {
  const std::size_t n = t.n;
  std::vector<Vector> out;
  if (t.kind == TKind::points) {
    std::map<std::vector<long>, std::size_t> seen;
    for (const auto& p : t.points) {
      std::vector<long> key(n);
      for (std::size_t j = 0; j < n; ++j) key[j] = static_cast<long>(std::floor(p[j] / (eps * d[j])));
      if (seen.emplace(key, out.size()).second) out.push_back(p);
    }
    return out;
  }
  // Coordinate extents of T: 1 for sphere/ball, 1/g(e_j) for an unconditional norm g.
  Vector extent(n, 1.0);
  if (t.kind == TKind::boundary_L_polar) {
    for (std::size_t j = 0; j < n; ++j) {
      Vector e(n, 0.0);
      e[j] = 1.0;
      extent[j] = 1.0 / h_L(t.body, e);
    }
  }
  std::vector<long> lo_k(n), hi_k(n);
  for (std::size_t j = 0; j < n; ++j) {
    const double w = eps * d[j];
    lo_k[j] = static_cast<long>(std::floor(-extent[j] / w));
    hi_k[j] = static_cast<long>(std::floor(extent[j] / w));
  }
  const bool shell = t.kind != TKind::ball;
  // pmin: closest cell point to the origin; pmax: farthest cell vertex.
  // Unassigned coordinates sit at 0 in pmin and at their outermost cell edge in pmax.
  Vector pmin(n, 0.0), pmax(n, 0.0), outer(n);
  for (std::size_t j = 0; j < n; ++j) {
    const double w = eps * d[j];
    outer[j] = std::max(std::abs(w * double(lo_k[j])), std::abs(w * double(hi_k[j] + 1)));
  }
  pmax = outer;
  std::function<void(std::size_t)> rec = [&](std::size_t j) {
    if (j == n) {
      Vector z = pmin;
      if (shell) {
        // The level rises from ≤ 1 to ≥ 1 along [pmin, pmax] inside the cell.
        double a = 0.0, b = 1.0;
        Vector p(n);
        for (int it = 0; it < 200 && b - a > 1e-15; ++it) {
          const double mid = 0.5 * (a + b);
          for (std::size_t i = 0; i < n; ++i) p[i] = pmin[i] + mid * (pmax[i] - pmin[i]);
          (level(t, p) < 1.0 ? a : b) = mid;
        }
        for (std::size_t i = 0; i < n; ++i) z[i] = pmin[i] + b * (pmax[i] - pmin[i]);
        const double g = level(t, z);
        for (double& v : z) v /= g;
      }
      out.push_back(std::move(z));
      if (out.size() > max_points) throw SizeError("build_net: net exceeds the point cap");
      return;
    }
    const double w = eps * d[j];
    for (long k = lo_k[j]; k <= hi_k[j]; ++k) {
      const double a = w * double(k), b = w * double(k + 1);
      pmin[j] = std::clamp(0.0, a, b);
      pmax[j] = std::abs(a) > std::abs(b) ? a : b;
      if (level(t, pmin) > 1.0) continue;
      if (shell && level(t, pmax) < 1.0) continue;
      rec(j + 1);
    }
    pmin[j] = 0.0;
    pmax[j] = outer[j];
  };
  rec(0);
  return out;
}

void check_params(const NetParams& p) {
  if (p.n == 0 || p.big_n < p.n) throw std::domain_error("build_net: need 1 ≤ n ≤ N");
  if (!(p.delta > 0.0 && p.delta <= 1.0)) throw std::domain_error("build_net: delta must lie in (0, 1]");
  if (!(p.eps > 0.0 && p.eps <= 1.0)) throw std::domain_error("build_net: eps must lie in (0, 1]");
  if (p.k < 1 || p.k > p.big_n) throw std::domain_error("build_net: k must lie in [1, N]");
  if (double(p.k) * std::log(std::exp(1.0) * double(p.big_n) / double(p.k)) < double(p.n)) {
    throw std::domain_error("build_net: need k ln(eN/k) ≥ n");
  }
}

nlohmann::json vec_json(const Vector& v) { return nlohmann::json(v); }

}  // namespace

CardinalityF cardinality_F(double delta, std::size_t n, std::size_t big_n) {
  if (!(delta >= 0.0 && delta <= 1.0)) throw std::domain_error("cardinality_F: delta must lie in [0, 1]");
  if (n < 1 || n > big_n) throw std::domain_error("cardinality_F: need 1 ≤ n ≤ N");
  const double nd = double(n), bn = double(big_n);
  CardinalityF f;
  if (delta >= nd / (2.0 * bn)) {
    f.branch = 1;
    f.log_value = nd * std::log(32.0 * delta * bn / nd);
  } else {
    f.branch = 2;
    // (en/(δN))^{4δN} → 1 as δ → 0.
    f.log_value = delta == 0.0 ? 0.0 : 4.0 * delta * bn * std::log(std::exp(1.0) * nd / (delta * bn));
  }
  f.value = f.log_value > std::log(std::numeric_limits<double>::max()) ? HUGE_VAL : std::exp(f.log_value);
  return f;
}

double log_cover_ball_inf_bound(std::size_t m, double eps) {
  const double md = double(m);
  if (eps <= 1.0 / std::sqrt(md)) return md * std::log(7.0 / (eps * std::sqrt(md)));
  return std::log(17.0 * eps * eps * md) / (eps * eps);
}

double log_cover_sparse_sphere_bound(std::size_t m, std::size_t k, double eps) {
  const double kd = double(k);
  return kd * std::log(3.0 / eps) + kd * std::log(std::exp(1.0) * double(m) / kd);
}

std::vector<Vector> cover_ball_inf(std::size_t m, double eps) {
  if (m == 0) throw std::domain_error("cover_ball_inf: m must be positive");
  if (!(eps > 0.0 && eps <= 1.0)) throw std::domain_error("cover_ball_inf: eps must lie in (0, 1]");
  if (log_cover_ball_inf_bound(m, eps) > kLogGuard) throw SizeError("cover_ball_inf: log-cardinality guard exceeded");
  std::size_t support = m;
  if (eps > 1.0 / std::sqrt(double(m))) {
    support = static_cast<std::size_t>(std::floor(1.0 / (eps * eps) + 1e-9));
  }
  std::vector<Vector> out;
  grid_centres(m, eps, support, out);
  return out;
}

std::vector<Vector> cover_sparse_sphere(std::size_t m, std::size_t k, double eps) {
  if (k < 1 || k > m) throw std::domain_error("cover_sparse_sphere: k must lie in [1, m]");
  if (!(eps > 0.0 && eps < 1.0)) throw std::domain_error("cover_sparse_sphere: eps must lie in (0, 1)");
  if (log_cover_sparse_sphere_bound(m, k, eps) > kLogGuard) {
    throw SizeError("cover_sparse_sphere: log-cardinality guard exceeded");
  }
  // Grid of spacing h with h√k ≤ ε/4: projecting the nearest grid point moves
  // at most ε/4, pruning at 3ε/4 keeps the total within ε.
  const double kd = double(k);
  const double h = eps / (4.0 * std::sqrt(kd));
  const long half = static_cast<long>(std::ceil(1.0 / h)) + 1;
  if (kd * std::log(2.0 * double(half) + 1.0) > std::log(2e7)) {
    throw SizeError("cover_sparse_sphere: candidate grid too large");
  }
  const double shell = h * std::sqrt(kd) / 2.0;
  std::vector<Vector> local;  // net of S^{k−1}
  {
    std::vector<long> idx(k, -half);
    Vector g(k);
    std::vector<Vector> candidates;
    while (true) {
      for (std::size_t i = 0; i < k; ++i) g[i] = h * double(idx[i]);
      const double r = norm2(g);
      if (r > 0.0 && std::abs(r - 1.0) <= shell) {
        Vector p(g);
        for (double& v : p) v /= r;
        candidates.push_back(std::move(p));
      }
      std::size_t i = 0;
      while (i < k && ++idx[i] > half) idx[i++] = -half;
      if (i == k) break;
    }
    const double sep2 = std::pow(0.75 * eps, 2);
    for (const auto& p : candidates) {
      bool near = false;
      for (const auto& q : local) {
        double d2 = 0.0;
        for (std::size_t i = 0; i < k; ++i) d2 += (p[i] - q[i]) * (p[i] - q[i]);
        if (d2 <= sep2) {
          near = true;
          break;
        }
      }
      if (!near) local.push_back(p);
    }
  }
  std::vector<Vector> out;
  auto support = first_subset(k);
  do {
    for (const auto& p : local) {
      Vector z(m, 0.0);
      for (std::size_t i = 0; i < k; ++i) z[support[i]] = p[i];
      out.push_back(std::move(z));
    }
  } while (next_subset(support, m));
  return out;
}

double dyadic_value(std::uint8_t code) {
  if (code == 0) return 1.0;
  if (code > kMaxCode) throw std::domain_error("dyadic_value: code out of range");
  // 2^{−2^{code−1}} underflows to 0 for code > 11; the log form stays exact.
  return std::exp2(-std::exp2(double(code - 1)));
}

double DyadicDiagonal::entry(std::size_t j) const { return dyadic_value(codes.at(j)); }

double DyadicDiagonal::neg_log_det() const {
  double s = 0.0;
  for (auto c : codes)
    if (c > 0) s += std::exp2(double(c - 1));
  return s * std::numbers::ln2;
}

Vector DyadicDiagonal::entries() const {
  Vector d(codes.size());
  for (std::size_t j = 0; j < codes.size(); ++j) d[j] = entry(j);
  return d;
}

std::vector<DyadicDiagonal> enumerate_Q(double delta, std::size_t n, std::size_t big_n, std::size_t cap) {
  if (!(delta >= 0.0 && delta <= 1.0)) throw std::domain_error("enumerate_Q: delta must lie in [0, 1]");
  if (n == 0 || big_n == 0) throw std::domain_error("enumerate_Q: n and N must be positive");
  const double budget = delta * double(big_n) + 1e-12;
  std::vector<DyadicDiagonal> out;
  DyadicDiagonal cur{std::vector<std::uint8_t>(n, 0)};
  std::function<void(std::size_t, double)> rec = [&](std::size_t j, double used) {
    if (j == n) {
      if (out.size() >= cap) throw SizeError("enumerate_Q: more diagonals than the cap");
      out.push_back(cur);
      return;
    }
    for (std::uint8_t c = 0; c <= kMaxCode; ++c) {
      const double cost = c == 0 ? 0.0 : std::exp2(double(c - 1)) * std::numbers::ln2;
      if (used + cost > budget) break;
      cur.codes[j] = c;
      rec(j + 1, used + cost);
    }
    cur.codes[j] = 0;
  };
  rec(0, 0.0);
  return out;
}

DyadicDiagonal compute_D_gamma(const Matrix& g, double delta, double c0) {
  if (!(delta > 0.0 && delta <= 1.0)) throw std::domain_error("compute_D_gamma: delta must lie in (0, 1]");
  if (!(c0 > 0.0)) throw std::domain_error("compute_D_gamma: C0 must be positive");
  const double t = c0 / std::sqrt(delta);
  DyadicDiagonal d{std::vector<std::uint8_t>(g.cols(), 0)};
  for (std::size_t j = 0; j < g.cols(); ++j) {
    double mj = 0.0;
    for (std::size_t i = 0; i < g.rows(); ++i) mj = std::max(mj, std::abs(g(i, j)));
    if (mj <= t) continue;
    // Smallest k with 2^k ln 2 ≥ ln(M_j/t), checked in log space.
    const double need = std::log(mj / t);
    std::uint8_t code = 1;
    while (code < kMaxCode && std::exp2(double(code - 1)) * std::numbers::ln2 < need) ++code;
    d.codes[j] = code;
  }
  return d;
}

TSpec TSpec::sphere(std::size_t n) {
  if (n == 0) throw std::domain_error("TSpec: n must be positive");
  TSpec t;
  t.kind = TKind::sphere;
  t.n = n;
  return t;
}

TSpec TSpec::ball(std::size_t n) {
  TSpec t = sphere(n);
  t.kind = TKind::ball;
  return t;
}

TSpec TSpec::boundary_L_polar(const IntersectionBody& body) {
  TSpec t = sphere(body.n);
  t.kind = TKind::boundary_L_polar;
  t.body = body;
  return t;
}

TSpec TSpec::finite(std::vector<Vector> pts) {
  if (pts.empty()) throw std::domain_error("TSpec: finite set must be non-empty");
  for (const auto& p : pts)
    if (p.size() != pts.front().size() || p.empty()) throw std::domain_error("TSpec: inconsistent point dimensions");
  TSpec t;
  t.kind = TKind::points;
  t.n = pts.front().size();
  t.points = std::move(pts);
  return t;
}

bool TSpec::contains(const Vector& x, double tol) const {
  if (x.size() != n) return false;
  switch (kind) {
    case TKind::sphere: return std::abs(norm2(x) - 1.0) <= tol;
    case TKind::ball: return norm2(x) <= 1.0 + tol;
    case TKind::boundary_L_polar: return std::abs(h_L(body, x) - 1.0) <= tol;
    case TKind::points:
      return std::any_of(points.begin(), points.end(), [&](const Vector& p) {
        for (std::size_t j = 0; j < n; ++j)
          if (std::abs(p[j] - x[j]) > tol * (1.0 + std::abs(p[j]))) return false;
        return true;
      });
  }
  return false;
}

std::vector<Vector> TSpec::sample(std::size_t count, std::uint64_t seed) const {
  if (kind == TKind::boundary_L_polar) return sample_boundary_L_polar(body, count, seed);
  std::vector<Vector> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    CounterRng rng(derive_seed(seed, i));
    if (kind == TKind::points) {
      out.push_back(points[rng.below(points.size())]);
      continue;
    }
    Vector x(n);
    for (double& v : x) v = rng.normal();
    double r = norm2(x);
    if (r == 0.0) {
      x[0] = r = 1.0;
    }
    const double radius = kind == TKind::ball ? std::pow(rng.uniform(), 1.0 / double(n)) : 1.0;
    for (double& v : x) v *= radius / r;
    out.push_back(std::move(x));
  }
  return out;
}

const char* to_string(TKind k) {
  switch (k) {
    case TKind::sphere: return "sphere";
    case TKind::ball: return "ball";
    case TKind::boundary_L_polar: return "boundary_L_polar";
    case TKind::points: return "points";
  }
  return "unknown";
}

bool NetBox::contains(const Vector& x, double tol) const {
  if (x.size() != center.size()) return false;
  for (std::size_t j = 0; j < x.size(); ++j) {
    const double w = eps * diag.entry(j);
    if (std::abs(x[j] - center[j]) > w * (1.0 + tol) + tol) return false;
  }
  return true;
}

NetBundle build_net(const TSpec& t, const NetParams& params, NetMode mode, const Matrix* gamma,
                    const NetOptions& options) {
  check_params(params);
  if (t.n != params.n) throw std::domain_error("build_net: T and params disagree on n");
  NetBundle b;
  b.t = t;
  b.params = params;
  b.mode = mode;
  const Vector ones(params.n, 1.0);
  b.M = cell_net(t, params.eps, ones, options.max_points).size();
  const auto f = cardinality_F(params.delta, params.n, params.big_n);
  b.log_cardinality_bound = std::log(double(b.M)) + f.log_value + params.delta * double(params.big_n);

  std::vector<DyadicDiagonal> family;
  if (mode == NetMode::exhaustive) {
    family = enumerate_Q(params.delta, params.n, params.big_n, options.q_cap);
  } else {
    if (gamma == nullptr) throw std::domain_error("build_net: realized mode needs a matrix");
    if (gamma->cols() != params.n || gamma->rows() != params.big_n) {
      throw std::domain_error("build_net: matrix shape disagrees with (N, n)");
    }
    family = {compute_D_gamma(*gamma, params.delta, options.c0)};
    b.realized_neg_log_det = family.front().neg_log_det();
    b.realized_in_Q = b.realized_neg_log_det <= params.delta * double(params.big_n) + 1e-12;
  }
  b.q_count = family.size();
  for (const auto& d : family) {
    for (auto& z : cell_net(t, params.eps, d.entries(), options.max_points)) {
      b.boxes.push_back({z, d, params.eps});
      b.points.push_back(std::move(z));
      if (b.points.size() > options.max_points) throw SizeError("build_net: net exceeds the point cap");
    }
  }
  return b;
}

NetValidation validate_net(const Matrix& g, const NetBundle& bundle, std::size_t k, double radius, std::size_t trials,
                           std::uint64_t seed) {
  const std::size_t n = bundle.params.n;
  if (g.cols() != n) throw std::domain_error("validate_net: matrix width disagrees with the bundle");
  if (k < 1 || k > g.rows()) throw std::domain_error("validate_net: k must lie in [1, N]");
  if (bundle.points.empty()) throw std::domain_error("validate_net: empty net");
  const std::size_t rows = g.rows();
  std::vector<double> images(bundle.points.size() * rows);
  for (std::size_t p = 0; p < bundle.points.size(); ++p) {
    const Vector gy = g.apply(bundle.points[p]);
    std::copy(gy.begin(), gy.end(), images.begin() + long(p * rows));
  }
  NetValidation r;
  r.trials = trials;
  r.radius = radius;
  std::size_t pass = 0;
  double total = 0.0;
  std::vector<double> sq(rows);
  const auto xs = bundle.t.sample(trials, seed);
  for (const auto& x : xs) {
    const Vector gx = g.apply(x);
    double best = HUGE_VAL;
    for (std::size_t p = 0; p < bundle.points.size(); ++p) {
      const double* gy = images.data() + p * rows;
      if (k == rows) {
        double s = 0.0;
        for (std::size_t i = 0; i < rows && s < best * best; ++i) s += (gx[i] - gy[i]) * (gx[i] - gy[i]);
        best = std::min(best, std::sqrt(s));
      } else {
        for (std::size_t i = 0; i < rows; ++i) sq[i] = (gx[i] - gy[i]) * (gx[i] - gy[i]);
        best = std::min(best, kth_norm_fast(sq, k));
      }
    }
    r.max_residual = std::max(r.max_residual, best);
    total += best;
    pass += best <= radius;
  }
  if (trials > 0) {
    r.mean_residual = total / double(trials);
    r.pass_fraction = double(pass) / double(trials);
  }
  return r;
}

void write_bundle(const NetBundle& b, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  const std::size_t n = b.params.n;
  nlohmann::json meta;
  meta["params"] = {{"delta", b.params.delta}, {"eps", b.params.eps}, {"k", b.params.k}, {"n", n}, {"N", b.params.big_n}};
  meta["mode"] = b.mode == NetMode::exhaustive ? "exhaustive" : "realized";
  meta["T"] = {{"kind", to_string(b.t.kind)}, {"n", b.t.n}};
  if (b.t.kind == TKind::boundary_L_polar) {
    meta["T"]["body"] = {{"c", b.t.body.c}, {"alpha", b.t.body.alpha}, {"beta", b.t.body.beta}, {"C_v", b.t.body.C_v}};
  }
  if (b.t.kind == TKind::points) {
    meta["T"]["points"] = nlohmann::json::array();
    for (const auto& p : b.t.points) meta["T"]["points"].push_back(vec_json(p));
  }
  meta["M"] = b.M;
  meta["q_count"] = b.q_count;
  meta["log_cardinality_bound"] = b.log_cardinality_bound;
  meta["realized_neg_log_det"] = b.realized_neg_log_det;
  meta["realized_in_Q"] = b.realized_in_Q;
  meta["points"] = b.points.size();
  std::ofstream(dir / "meta.json") << meta.dump(2) << '\n';

  Matrix pts(b.points.size(), n);
  Matrix boxes(b.boxes.size(), 2 * n + 1);
  for (std::size_t i = 0; i < b.points.size(); ++i)
    for (std::size_t j = 0; j < n; ++j) pts(i, j) = b.points[i][j];
  for (std::size_t i = 0; i < b.boxes.size(); ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      boxes(i, j) = b.boxes[i].center[j];
      boxes(i, n + j) = b.boxes[i].diag.codes[j];
    }
    boxes(i, 2 * n) = b.boxes[i].eps;
  }
  write_csv(pts, dir / "points.csv");
  write_csv(boxes, dir / "boxes.csv");
}

NetBundle read_bundle(const std::filesystem::path& dir) {
  std::ifstream in(dir / "meta.json");
  if (!in) throw std::domain_error("read_bundle: missing meta.json in " + dir.string());
  const auto meta = nlohmann::json::parse(in);
  NetBundle b;
  const auto& p = meta.at("params");
  b.params = {p.at("delta").get<double>(), p.at("eps").get<double>(), p.at("k").get<std::size_t>(),
              p.at("n").get<std::size_t>(), p.at("N").get<std::size_t>()};
  b.mode = meta.at("mode").get<std::string>() == "exhaustive" ? NetMode::exhaustive : NetMode::realized;
  const auto& tj = meta.at("T");
  const std::string kind = tj.at("kind").get<std::string>();
  const std::size_t n = b.params.n;
  if (kind == "sphere") b.t = TSpec::sphere(n);
  else if (kind == "ball") b.t = TSpec::ball(n);
  else if (kind == "boundary_L_polar") {
    const auto& bj = tj.at("body");
    IntersectionBody body = IntersectionBody::explicit_body(n, bj.at("c").get<double>(), bj.at("alpha").get<double>());
    body.beta = bj.at("beta").get<double>();
    body.C_v = bj.at("C_v").get<double>();
    b.t = TSpec::boundary_L_polar(body);
  } else if (kind == "points") {
    b.t = TSpec::finite(tj.at("points").get<std::vector<Vector>>());
  } else {
    throw std::domain_error("read_bundle: unknown T kind '" + kind + "'");
  }
  b.M = meta.at("M").get<std::size_t>();
  b.q_count = meta.at("q_count").get<std::size_t>();
  b.log_cardinality_bound = meta.at("log_cardinality_bound").get<double>();
  b.realized_neg_log_det = meta.at("realized_neg_log_det").get<double>();
  b.realized_in_Q = meta.at("realized_in_Q").get<bool>();
  const Matrix pts = read_csv(dir / "points.csv");
  const Matrix boxes = read_csv(dir / "boxes.csv");
  for (std::size_t i = 0; i < pts.rows(); ++i) b.points.emplace_back(pts.row(i).begin(), pts.row(i).end());
  for (std::size_t i = 0; i < boxes.rows(); ++i) {
    NetBox box;
    box.center.assign(boxes.row(i).begin(), boxes.row(i).begin() + long(n));
    box.diag.codes.resize(n);
    for (std::size_t j = 0; j < n; ++j) box.diag.codes[j] = static_cast<std::uint8_t>(boxes(i, n + j));
    box.eps = boxes(i, 2 * n);
    b.boxes.push_back(std::move(box));
  }
  return b;
}

}  // namespace polylab
