#include "polylab/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <stdexcept>

#include "polylab/errors.hpp"

namespace polylab {

Vector decreasing_rearrangement(std::span<const double> a) {
  if (a.empty()) throw std::domain_error("decreasing_rearrangement: empty input");
  Vector out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (!std::isfinite(a[i])) throw std::domain_error("decreasing_rearrangement: non-finite entry");
    out[i] = std::abs(a[i]);
  }
  std::sort(out.begin(), out.end(), std::greater<>());
  return out;
}

SymmetricEigen symmetric_eigen(const Matrix& input, bool with_vectors) {
  const std::size_t n = input.rows();
  if (input.cols() != n) throw std::domain_error("symmetric_eigen: matrix is not square");
  if (!input.all_finite()) throw std::domain_error("symmetric_eigen: non-finite entry");

  Matrix a = input;
  Matrix v = with_vectors ? Matrix::identity(n) : Matrix();

  double total = 0.0;
  for (double x : a.entries()) total += x * x;
  const double target = 1e-14 * std::sqrt(total);

  auto off_diagonal = [&] {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) s += a(i, j) * a(i, j);
    return std::sqrt(2.0 * s);
  };

  constexpr int kMaxSweeps = 100;
  int sweep = 0;
  while (off_diagonal() > target) {
    if (++sweep > kMaxSweeps) throw NumericalFailure("symmetric_eigen: Jacobi sweeps did not converge");
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        // Below rounding level of the diagonal: annihilate without rotating.
        if (std::abs(apq) <= 1e-17 * (std::abs(a(p, p)) + std::abs(a(q, q)))) {
          a(p, q) = a(q, p) = 0.0;
          continue;
        }
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = a(k, p), akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = a(p, k), aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
        if (with_vectors) {
          for (std::size_t k = 0; k < n; ++k) {
            const double vkp = v(k, p), vkq = v(k, q);
            v(k, p) = c * vkp - s * vkq;
            v(k, q) = s * vkp + c * vkq;
          }
        }
      }
    }
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) { return a(i, i) > a(j, j); });

  SymmetricEigen out;
  out.values.resize(n);
  for (std::size_t k = 0; k < n; ++k) out.values[k] = a(order[k], order[k]);
  if (with_vectors) {
    out.vectors = Matrix(n, n);
    for (std::size_t k = 0; k < n; ++k)
      for (std::size_t i = 0; i < n; ++i) out.vectors(i, k) = v(i, order[k]);
  }
  return out;
}

Vector singular_values(const Matrix& g) {
  if (!g.all_finite()) throw std::domain_error("singular_values: non-finite entry");
  const Matrix gram = g.rows() >= g.cols() ? g.gram() : g.transpose().gram();
  Vector s = symmetric_eigen(gram, false).values;
  for (double& x : s) x = std::sqrt(std::max(x, 0.0));
  return s;
}

double smallest_singular_value(const Matrix& g) {
  const Vector s = singular_values(g);
  return s.empty() ? 0.0 : s.back();
}

double operator_norm(const Matrix& g) {
  const Vector s = singular_values(g);
  return s.empty() ? 0.0 : s.front();
}

double hs_norm(const Matrix& g) {
  if (!g.all_finite()) throw std::domain_error("hs_norm: non-finite entry");
  return norm2(g.entries());
}

}  // namespace polylab
