#pragma once

// Test-only reference computations. Nothing here calls into the library's
// algorithms beyond the Matrix container, so each oracle is an independent
// route to the quantity it checks.

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <vector>

#include "polylab/matrix.hpp"

namespace oracle {

using polylab::Matrix;
using polylab::Vector;

/// All k-subsets of {0, …, n-1} in lexicographic order.
inline std::vector<std::vector<std::size_t>> subsets(std::size_t n, std::size_t k) {
  std::vector<std::vector<std::size_t>> out;
  if (k > n) return out;
  std::vector<std::size_t> idx(k);
  for (std::size_t i = 0; i < k; ++i) idx[i] = i;
  while (true) {
    out.push_back(idx);
    std::size_t i = k;
    while (i > 0 && idx[i - 1] == n - k + (i - 1)) --i;
    if (i == 0) break;
    ++idx[i - 1];
    for (std::size_t j = i; j < k; ++j) idx[j] = idx[j - 1] + 1;
  }
  return out;
}

/// Gaussian elimination with partial pivoting; nullopt when (near) singular.
inline std::optional<Vector> solve_square(Matrix a, Vector b) {
  const std::size_t n = a.rows();
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t p = c;
    for (std::size_t i = c + 1; i < n; ++i)
      if (std::abs(a(i, c)) > std::abs(a(p, c))) p = i;
    if (std::abs(a(p, c)) < 1e-10) return std::nullopt;
    for (std::size_t k = 0; k < n; ++k) std::swap(a(c, k), a(p, k));
    std::swap(b[c], b[p]);
    for (std::size_t i = c + 1; i < n; ++i) {
      const double f = a(i, c) / a(c, c);
      for (std::size_t k = c; k < n; ++k) a(i, k) -= f * a(c, k);
      b[i] -= f * b[c];
    }
  }
  Vector x(n);
  for (std::size_t i = n; i-- > 0;) {
    double s = b[i];
    for (std::size_t k = i + 1; k < n; ++k) s -= a(i, k) * x[k];
    x[i] = s / a(i, i);
  }
  return x;
}

/// min ‖x‖₁ s.t. Ax = y for a full-row-rank A: the optimum sits on a basic
/// solution, so enumerate every square column subset.
inline std::optional<double> l1_support_enumeration(const Matrix& a, const Vector& y) {
  const std::size_t n = a.rows(), big_n = a.cols();
  bool zero = true;
  for (double v : y) zero = zero && v == 0.0;
  if (zero) return 0.0;
  std::optional<double> best;
  for (const auto& cols : subsets(big_n, n)) {
    Matrix sub(n, n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t k = 0; k < n; ++k) sub(i, k) = a(i, cols[k]);
    const auto x = solve_square(sub, y);
    if (!x) continue;
    double l1 = 0.0;
    for (double v : *x) l1 += std::abs(v);
    if (!best || l1 < *best) best = l1;
  }
  return best;
}

/// |||z|||_m by assigning every coordinate to one of m labelled blocks
/// (m^n assignments; empty blocks contribute zero).
inline double ms_norm_by_labelling(const Vector& z, std::size_t m) {
  const std::size_t n = z.size();
  std::vector<std::size_t> label(n, 0);
  double best = 0.0;
  while (true) {
    std::vector<double> mass(m, 0.0);
    for (std::size_t i = 0; i < n; ++i) mass[label[i]] += z[i] * z[i];
    double v = 0.0;
    for (double s : mass) v += std::sqrt(s);
    best = std::max(best, v);
    std::size_t i = 0;
    while (i < n && ++label[i] == m) label[i++] = 0;
    if (i == n) break;
  }
  return best;
}

/// Support function of B∞ⁿ ∩ αB₂ⁿ through the primal maximizer
/// y_i = min(1, λ|z_i|), λ found by bisection on ‖y‖₂ = α.
inline double cube_cap_support_primal(const Vector& z, double alpha) {
  const std::size_t n = z.size();
  Vector a(n);
  for (std::size_t i = 0; i < n; ++i) a[i] = std::abs(z[i]);
  if (std::sqrt(static_cast<double>(n)) <= alpha) {
    double s = 0.0;
    for (double v : a) s += v;
    return s;
  }
  auto norm_at = [&](double lambda) {
    double s = 0.0;
    for (double v : a) s += std::pow(std::min(1.0, lambda * v), 2);
    return std::sqrt(s);
  };
  double lo = 0.0, hi = 1.0;
  while (norm_at(hi) < alpha && hi < 1e300) hi *= 2.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    (norm_at(mid) < alpha ? lo : hi) = mid;
  }
  double h = 0.0;
  for (double v : a) h += v * std::min(1.0, lo * v);
  return h;
}

/// Simpson quadrature on [a, b].
inline double simpson(const std::function<double(double)>& f, double a, double b, int intervals = 20000) {
  const double h = (b - a) / intervals;
  double s = f(a) + f(b);
  for (int i = 1; i < intervals; ++i) s += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
  return s * h / 3.0;
}

/// Standard normal CDF.
inline double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

}  // namespace oracle
