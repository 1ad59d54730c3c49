#include "polylab/norms.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "polylab/errors.hpp"
#include "polylab/linalg.hpp"
#include "polylab/rng.hpp"

namespace polylab {

namespace {

double certificate_value(const std::vector<std::vector<std::size_t>>& blocks, std::span<const double> x) {
  double v = 0.0;
  for (const auto& b : blocks) {
    double s = 0.0;
    for (std::size_t i : b) s += x[i] * x[i];
    v += std::sqrt(s);
  }
  return v;
}

std::vector<std::vector<std::size_t>> blocks_from_labels(const std::vector<std::size_t>& label) {
  std::vector<std::vector<std::size_t>> blocks;
  for (std::size_t i = 0; i < label.size(); ++i) {
    if (label[i] >= blocks.size()) blocks.resize(label[i] + 1);
    blocks[label[i]].push_back(i);
  }
  std::erase_if(blocks, [](const auto& b) { return b.empty(); });
  return blocks;
}

struct PartitionSearch {
  std::span<const double> sq;
  std::size_t m;
  std::vector<std::size_t> label;
  std::vector<double> mass;
  std::vector<std::size_t> best_label;
  double best = -1.0;

  void run(std::size_t i, std::size_t used) {
    if (i == sq.size()) {
      double v = 0.0;
      for (std::size_t b = 0; b < used; ++b) v += std::sqrt(mass[b]);
      if (v > best) {
        best = v;
        best_label = label;
      }
      return;
    }
    const std::size_t top = std::min(used + 1, m);
    for (std::size_t b = 0; b < top; ++b) {
      label[i] = b;
      mass[b] += sq[i];
      run(i + 1, std::max(used, b + 1));
      mass[b] -= sq[i];
    }
  }
};

}  // namespace

double k_norm(std::span<const double> a, std::size_t k) {
  if (k < 1 || k > a.size()) throw std::domain_error("k_norm: k must lie in [1, N]");
  if (k == a.size()) return norm2(a);
  const Vector s = decreasing_rearrangement(a);
  double sum = 0.0;
  for (std::size_t i = 0; i < k; ++i) sum += s[i] * s[i];
  return std::sqrt(sum);
}

PartitionCertificate ms_norm_brute(std::span<const double> z, std::size_t m) {
  if (m == 0) throw std::domain_error("ms_norm_brute: m must be positive");
  if (z.size() > 12) throw SizeError("ms_norm_brute: n > 12 exceeds the enumeration guard");
  if (z.empty()) return {};
  std::vector<double> sq(z.size());
  for (std::size_t i = 0; i < z.size(); ++i) sq[i] = z[i] * z[i];
  PartitionSearch search{sq, std::min(m, z.size()), std::vector<std::size_t>(z.size(), 0),
                         std::vector<double>(z.size(), 0.0), {}, -1.0};
  search.run(0, 0);
  PartitionCertificate cert;
  cert.blocks = blocks_from_labels(search.best_label);
  cert.value = certificate_value(cert.blocks, z);
  return cert;
}

PartitionCertificate ms_norm_heuristic(std::span<const double> z, std::size_t m) {
  if (m == 0) throw std::domain_error("ms_norm_heuristic: m must be positive");
  std::vector<std::size_t> order(z.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return std::abs(z[a]) > std::abs(z[b]); });
  const std::size_t blocks = std::min(m, std::max<std::size_t>(z.size(), 1));
  std::vector<double> mass(blocks, 0.0);
  std::vector<std::size_t> label(z.size(), 0);
  for (std::size_t i : order) {
    const std::size_t b = static_cast<std::size_t>(std::min_element(mass.begin(), mass.end()) - mass.begin());
    label[i] = b;
    mass[b] += z[i] * z[i];
  }
  PartitionCertificate cert;
  cert.blocks = blocks_from_labels(label);
  cert.value = certificate_value(cert.blocks, z);
  return cert;
}

PartitionCertificate ms_block_partition(std::span<const double> y, std::span<const double> x, double alpha) {
  const std::size_t n = y.size();
  if (x.size() != n) throw std::domain_error("ms_block_partition: x and y differ in length");
  if (!(alpha > 0.0)) throw std::domain_error("ms_block_partition: alpha must be positive");
  constexpr double slack = 1e-12;
  if (norm_inf(y) > 1.0 + slack) throw std::domain_error("ms_block_partition: y is outside the cube");
  if (norm2(y) > alpha * (1.0 + slack)) throw std::domain_error("ms_block_partition: y is outside the ball");

  PartitionCertificate cert;
  std::vector<bool> single(n, false);
  std::vector<double> z2(n, 0.0);
  for (std::size_t k = 0; k < n; ++k) {
    if (y[k] * y[k] >= 0.5 - 1e-12) {
      single[k] = true;
      cert.blocks.push_back({k});
    } else {
      z2[k] = y[k] * y[k];
    }
  }
  std::size_t s = 0;
  while (s < n) {
    // Longest prefix from s with mass ≤ 1/2, then one more index.
    std::size_t end = s;
    if (s + 1 < n) {
      double acc = z2[s];
      std::size_t l0 = s;
      while (l0 + 1 <= n - 2 && acc + z2[l0 + 1] <= 0.5) acc += z2[++l0];
      end = l0 + 1;
    }
    std::vector<std::size_t> block;
    for (std::size_t i = s; i <= end; ++i)
      if (!single[i]) block.push_back(i);
    if (!block.empty()) cert.blocks.push_back(std::move(block));
    s = end + 1;
  }
  std::sort(cert.blocks.begin(), cert.blocks.end());
  cert.value = certificate_value(cert.blocks, x);
  return cert;
}

namespace {

struct CubeCapOptimum {
  double value = 0.0;
  double tau = 0.0;  // optimal soft threshold
};

CubeCapOptimum cube_cap_optimum(std::span<const double> z, double alpha) {
  if (!(alpha > 0.0)) throw std::domain_error("support_cube_cap: alpha must be positive");
  if (z.empty()) return {};
  const Vector a = decreasing_rearrangement(z);
  const std::size_t n = a.size();
  if (a[0] == 0.0) return {};
  // Suffix sums of squares: S[p] = Σ_{i≥p} a_i².
  std::vector<double> tail(n + 1, 0.0);
  for (std::size_t i = n; i-- > 0;) tail[i] = tail[i + 1] + a[i] * a[i];
  const double a2 = alpha * alpha;
  // τ ≥ ‖z‖∞: the ball alone is active.
  CubeCapOptimum best{alpha * std::sqrt(tail[0]), std::max(a[0], std::sqrt(tail[0]) / alpha)};
  double head = 0.0;
  for (std::size_t p = 1; p <= n; ++p) {
    head += a[p - 1];
    // Piece: τ ∈ [a_{p+1}, a_p] with the top p entries above the threshold.
    const double lo = p < n ? a[p] : 0.0, hi = a[p - 1];
    const double pd = static_cast<double>(p);
    double tau = hi;
    if (a2 > pd) tau = std::clamp(std::sqrt(tail[p] / (a2 - pd)), lo, hi);
    const double f = head - pd * tau + alpha * std::sqrt(pd * tau * tau + tail[p]);
    if (f < best.value) best = {f, tau};
  }
  return best;
}

}  // namespace

double support_cube_cap(std::span<const double> z, double alpha) { return cube_cap_optimum(z, alpha).value; }

Vector support_cube_cap_maximizer(std::span<const double> z, double alpha) {
  const auto opt = cube_cap_optimum(z, alpha);
  Vector y(z.size(), 0.0);
  for (std::size_t i = 0; i < z.size(); ++i) {
    if (z[i] == 0.0) continue;
    const double m = opt.tau > 0.0 ? std::min(1.0, std::abs(z[i]) / opt.tau) : 1.0;
    y[i] = z[i] > 0.0 ? m : -m;
  }
  const double r = norm2(y);
  if (r > alpha) {
    for (double& v : y) v *= alpha / r;
  }
  return y;
}

IntersectionBody IntersectionBody::from_constants(std::size_t n, std::size_t big_n, double beta,
                                                  const SmallBallConstants& k) {
  if (n == 0) throw std::domain_error("IntersectionBody: n must be positive");
  if (!(beta > 0.0 && beta < 1.0)) throw std::domain_error("IntersectionBody: beta must lie in (0, 1)");
  if (big_n <= n) throw std::domain_error("IntersectionBody: N must exceed n");
  IntersectionBody b = explicit_body(n, k.c_uv, std::sqrt(beta * std::log(double(big_n) / double(n)) / k.C_v));
  b.beta = beta;
  b.C_v = k.C_v;
  return b;
}

IntersectionBody IntersectionBody::explicit_body(std::size_t n, double c, double alpha) {
  if (n == 0) throw std::domain_error("IntersectionBody: n must be positive");
  if (!(c > 0.0 && c <= 1.0)) throw std::domain_error("IntersectionBody: c must lie in (0, 1]");
  if (!(alpha > 0.0) || !std::isfinite(alpha)) throw std::domain_error("IntersectionBody: radius must be positive");
  IntersectionBody b;
  b.n = n;
  b.c = c;
  b.alpha = alpha;
  return b;
}

double h_L(const IntersectionBody& body, std::span<const double> z) {
  if (z.size() != body.n) throw std::domain_error("h_L: dimension mismatch");
  return body.c * support_cube_cap(z, body.alpha);
}

std::vector<Vector> sample_boundary_L_polar(const IntersectionBody& body, std::size_t count, std::uint64_t seed) {
  if (count == 0) throw std::domain_error("sample_boundary_L_polar: count must be positive");
  const std::size_t n = body.n;
  std::vector<Vector> out;
  out.reserve(count);
  auto sparse = [&](CounterRng& rng) {
    Vector z(n, 0.0);
    const std::size_t s = 1 + rng.below(std::min<std::size_t>(n, 3));
    for (std::size_t t = 0; t < s; ++t) z[rng.below(n)] = rng.sign() * rng.uniform(0.5, 1.0);
    return z;
  };
  auto sphere = [&](CounterRng& rng) {
    Vector z(n);
    for (double& v : z) v = rng.normal();
    const double r = norm2(z);
    for (double& v : z) v /= r;
    return z;
  };
  for (std::size_t i = 0; i < count; ++i) {
    for (std::uint64_t attempt = 0;; ++attempt) {
      CounterRng rng(derive_seed(seed, i, attempt));
      const double pick = rng.uniform();
      Vector z;
      if (pick < 0.4) {
        z = sparse(rng);
      } else if (pick < 0.8) {
        z = sphere(rng);
      } else {
        const Vector a = sparse(rng), b = sphere(rng);
        const double t = rng.uniform();
        z.resize(n);
        for (std::size_t k = 0; k < n; ++k) z[k] = t * a[k] + (1.0 - t) * b[k];
      }
      const double h = h_L(body, z);
      if (!(h > 0.0) || !std::isfinite(h)) continue;
      for (double& v : z) v /= h;
      out.push_back(std::move(z));
      break;
    }
  }
  return out;
}

double mixed_norm_kkr(std::span<const double> y, std::size_t big_n) {
  const std::size_t n = y.size();
  if (n == 0) throw std::domain_error("mixed_norm_kkr: empty vector");
  if (big_n < n) throw std::domain_error("mixed_norm_kkr: N must be at least n");
  const double w = std::sqrt(std::log(std::exp(1.0) * double(big_n) / double(n)));
  return std::max(norm2(y), w * norm_inf(y));
}

}  // namespace polylab
