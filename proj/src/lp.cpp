#include "polylab/lp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "polylab/errors.hpp"

namespace polylab {

namespace {

constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();

bool is_infinite(double b) { return std::isinf(b) || std::abs(b) >= kInfinity; }

// Original variable j is recovered as base + sign * x[pos] - x[neg] (neg only
// for free variables).
struct VariableMap {
  double base = 0.0;
  double sign = 1.0;
  std::size_t pos = kNone;
  std::size_t neg = kNone;
};

// min costᵀx, A x = rhs, x ≥ 0, stored column-major. Rows [0, equality_rows)
// come from the user's equalities; the remaining rows are upper-bound rows
// whose slack is a natural starting basic variable.
struct StandardForm {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::size_t equality_rows = 0;
  std::vector<double> a;  // column-major
  Vector rhs;
  Vector cost;
  std::vector<std::size_t> bound_slack;  // per bound row: slack column
  std::vector<VariableMap> map;

  double& at(std::size_t i, std::size_t j) { return a[j * rows + i]; }
  double at(std::size_t i, std::size_t j) const { return a[j * rows + i]; }
};

StandardForm to_standard_form(const LpProblem& p) {
  const std::size_t n = p.objective.size();
  const std::size_t m = p.eq_matrix.rows();
  StandardForm sf;
  sf.map.resize(n);

  std::size_t next = 0;
  std::vector<std::size_t> boxed;
  for (std::size_t j = 0; j < n; ++j) {
    const double lo = p.lower_bounds[j], hi = p.upper_bounds[j];
    VariableMap& vm = sf.map[j];
    if (!is_infinite(lo)) {
      vm.base = lo;
      vm.pos = next++;
      if (!is_infinite(hi)) boxed.push_back(j);
    } else if (!is_infinite(hi)) {
      vm.base = hi;
      vm.sign = -1.0;
      vm.pos = next++;
    } else {
      vm.pos = next++;
      vm.neg = next++;
    }
  }
  const std::size_t structural = next;
  sf.equality_rows = m;
  sf.rows = m + boxed.size();
  sf.cols = structural + boxed.size();
  sf.a.assign(sf.rows * sf.cols, 0.0);
  sf.rhs.assign(sf.rows, 0.0);
  sf.cost.assign(sf.cols, 0.0);

  for (std::size_t i = 0; i < m; ++i) {
    double r = p.eq_rhs[i];
    for (std::size_t j = 0; j < n; ++j) {
      const double aij = p.eq_matrix(i, j);
      if (aij == 0.0) continue;
      const VariableMap& vm = sf.map[j];
      r -= aij * vm.base;
      sf.at(i, vm.pos) = aij * vm.sign;
      if (vm.neg != kNone) sf.at(i, vm.neg) = -aij;
    }
    sf.rhs[i] = r;
  }
  for (std::size_t j = 0; j < n; ++j) {
    const VariableMap& vm = sf.map[j];
    sf.cost[vm.pos] = p.objective[j] * vm.sign;
    if (vm.neg != kNone) sf.cost[vm.neg] = -p.objective[j];
  }
  for (std::size_t b = 0; b < boxed.size(); ++b) {
    const std::size_t j = boxed[b];
    const std::size_t row = m + b;
    const std::size_t slack = structural + b;
    sf.at(row, sf.map[j].pos) = 1.0;
    sf.at(row, slack) = 1.0;
    sf.rhs[row] = p.upper_bounds[j] - p.lower_bounds[j];
    sf.bound_slack.push_back(slack);
  }
  // Nonnegative right-hand sides on equality rows.
  for (std::size_t i = 0; i < m; ++i) {
    if (sf.rhs[i] < 0.0) {
      sf.rhs[i] = -sf.rhs[i];
      for (std::size_t j = 0; j < sf.cols; ++j) sf.at(i, j) = -sf.at(i, j);
    }
  }
  return sf;
}

class RevisedSimplex {
 public:
  RevisedSimplex(const StandardForm& sf, const LpOptions& opt)
      : sf_(sf), opt_(opt), m_(sf.rows), n_(sf.cols), total_(sf.cols + sf.equality_rows) {
    max_iter_ = opt.max_iterations ? opt.max_iterations : 50 * (m_ + total_) + 1000;
    basis_.resize(m_);
    is_basic_.assign(total_, false);
    for (std::size_t i = 0; i < sf.equality_rows; ++i) basis_[i] = n_ + i;  // artificials
    for (std::size_t b = 0; b < sf.bound_slack.size(); ++b) basis_[sf.equality_rows + b] = sf.bound_slack[b];
    for (std::size_t i = 0; i < m_; ++i) is_basic_[basis_[i]] = true;
    binv_.assign(m_ * m_, 0.0);
    for (std::size_t i = 0; i < m_; ++i) binv_[i * m_ + i] = 1.0;
    xb_ = sf.rhs;
  }

  enum class Outcome { optimal, unbounded };

  Outcome run(const Vector& cost, bool artificials_may_enter) {
    Vector y(m_), u(m_);
    while (true) {
      if (iterations_ >= max_iter_) throw NumericalFailure("lp_solve: iteration cap exceeded");
      if (since_refactor_ >= opt_.refactor_interval) refactor();

      for (std::size_t k = 0; k < m_; ++k) y[k] = 0.0;
      for (std::size_t i = 0; i < m_; ++i) {
        const double cb = cost[basis_[i]];
        if (cb == 0.0) continue;
        const double* row = &binv_[i * m_];
        for (std::size_t k = 0; k < m_; ++k) y[k] += cb * row[k];
      }

      std::size_t enter = kNone;
      for (std::size_t j = 0; j < total_; ++j) {
        if (is_basic_[j]) continue;
        if (j >= n_ && !artificials_may_enter) continue;
        const double d = cost[j] - column_dot(j, y);
        if (d < -opt_.tolerance) {
          enter = j;
          break;
        }
      }
      if (enter == kNone) return Outcome::optimal;

      compute_column(enter, u);
      std::size_t leave = kNone;
      double best = 0.0;
      for (std::size_t i = 0; i < m_; ++i) {
        if (u[i] <= opt_.tolerance) continue;
        const double ratio = std::max(xb_[i], 0.0) / u[i];
        if (leave == kNone || ratio < best - 1e-12 * (1.0 + best)) {
          leave = i;
          best = ratio;
        } else if (ratio <= best + 1e-12 * (1.0 + best) && basis_[i] < basis_[leave]) {
          leave = i;
        }
      }
      if (leave == kNone) return Outcome::unbounded;
      pivot(leave, enter, u);
    }
  }

  /// Pivots zero-level artificials out of the basis where possible.
  void expel_artificials() {
    Vector u(m_);
    for (std::size_t i = 0; i < m_; ++i) {
      if (basis_[i] < n_) continue;
      const double* row = &binv_[i * m_];
      for (std::size_t j = 0; j < n_; ++j) {
        if (is_basic_[j]) continue;
        double v = 0.0;
        for (std::size_t k = 0; k < m_; ++k) v += row[k] * sf_.at(k, j);
        if (std::abs(v) > 1e-9) {
          compute_column(j, u);
          pivot(i, j, u);
          break;
        }
      }
    }
  }

  double artificial_mass() const {
    double s = 0.0;
    for (std::size_t i = 0; i < m_; ++i)
      if (basis_[i] >= n_) s += std::abs(xb_[i]);
    return s;
  }

  Vector structural_point() {
    refactor();
    Vector x(n_, 0.0);
    for (std::size_t i = 0; i < m_; ++i)
      if (basis_[i] < n_) x[basis_[i]] = std::max(xb_[i], 0.0);
    return x;
  }

  std::size_t iterations() const { return iterations_; }

 private:
  double column_dot(std::size_t j, const Vector& y) const {
    if (j >= n_) return y[j - n_];
    const double* col = &sf_.a[j * m_];
    double s = 0.0;
    for (std::size_t k = 0; k < m_; ++k) s += col[k] * y[k];
    return s;
  }

  void compute_column(std::size_t j, Vector& u) const {
    for (std::size_t i = 0; i < m_; ++i) {
      const double* row = &binv_[i * m_];
      if (j >= n_) {
        u[i] = row[j - n_];
        continue;
      }
      const double* col = &sf_.a[j * m_];
      double s = 0.0;
      for (std::size_t k = 0; k < m_; ++k) s += row[k] * col[k];
      u[i] = s;
    }
  }

  void pivot(std::size_t r, std::size_t enter, const Vector& u) {
    const double pr = u[r];
    double* prow = &binv_[r * m_];
    for (std::size_t k = 0; k < m_; ++k) prow[k] /= pr;
    xb_[r] /= pr;
    for (std::size_t i = 0; i < m_; ++i) {
      if (i == r || u[i] == 0.0) continue;
      const double f = u[i];
      double* row = &binv_[i * m_];
      for (std::size_t k = 0; k < m_; ++k) row[k] -= f * prow[k];
      xb_[i] -= f * xb_[r];
      if (std::abs(xb_[i]) < 1e-13) xb_[i] = 0.0;
    }
    is_basic_[basis_[r]] = false;
    is_basic_[enter] = true;
    basis_[r] = enter;
    ++iterations_;
    ++since_refactor_;
  }

  // Gauss–Jordan inversion of the current basis matrix with partial pivoting.
  void refactor() {
    since_refactor_ = 0;
    if (m_ == 0) return;
    std::vector<double> b(m_ * m_, 0.0);
    for (std::size_t c = 0; c < m_; ++c) {
      const std::size_t j = basis_[c];
      for (std::size_t i = 0; i < m_; ++i) b[i * m_ + c] = j >= n_ ? (i == j - n_ ? 1.0 : 0.0) : sf_.at(i, j);
    }
    std::vector<double> inv(m_ * m_, 0.0);
    for (std::size_t i = 0; i < m_; ++i) inv[i * m_ + i] = 1.0;
    for (std::size_t c = 0; c < m_; ++c) {
      std::size_t piv = c;
      for (std::size_t i = c + 1; i < m_; ++i)
        if (std::abs(b[i * m_ + c]) > std::abs(b[piv * m_ + c])) piv = i;
      if (std::abs(b[piv * m_ + c]) < 1e-14) throw NumericalFailure("lp_solve: singular basis on refactorization");
      if (piv != c) {
        for (std::size_t k = 0; k < m_; ++k) {
          std::swap(b[c * m_ + k], b[piv * m_ + k]);
          std::swap(inv[c * m_ + k], inv[piv * m_ + k]);
        }
      }
      const double d = b[c * m_ + c];
      for (std::size_t k = 0; k < m_; ++k) {
        b[c * m_ + k] /= d;
        inv[c * m_ + k] /= d;
      }
      for (std::size_t i = 0; i < m_; ++i) {
        if (i == c) continue;
        const double f = b[i * m_ + c];
        if (f == 0.0) continue;
        for (std::size_t k = 0; k < m_; ++k) {
          b[i * m_ + k] -= f * b[c * m_ + k];
          inv[i * m_ + k] -= f * inv[c * m_ + k];
        }
      }
    }
    binv_ = std::move(inv);
    for (std::size_t i = 0; i < m_; ++i) {
      double s = 0.0;
      for (std::size_t k = 0; k < m_; ++k) s += binv_[i * m_ + k] * sf_.rhs[k];
      xb_[i] = std::abs(s) < 1e-13 ? 0.0 : s;
    }
  }

  const StandardForm& sf_;
  const LpOptions& opt_;
  std::size_t m_, n_, total_;
  std::size_t max_iter_ = 0;
  std::size_t iterations_ = 0;
  std::size_t since_refactor_ = 0;
  std::vector<std::size_t> basis_;
  std::vector<bool> is_basic_;
  std::vector<double> binv_;
  Vector xb_;
};

}  // namespace

LpProblem LpProblem::nonnegative(Vector objective, Matrix eq_matrix, Vector eq_rhs) {
  const std::size_t n = objective.size();
  return LpProblem{std::move(objective), std::move(eq_matrix), std::move(eq_rhs), Vector(n, 0.0),
                   Vector(n, kInfinity)};
}

void LpProblem::validate() const {
  const std::size_t n = objective.size();
  if (eq_matrix.cols() != n && !(eq_matrix.rows() == 0)) {
    throw std::domain_error("LpProblem: objective length differs from eq_matrix columns");
  }
  if (eq_rhs.size() != eq_matrix.rows()) throw std::domain_error("LpProblem: eq_rhs length differs from eq_matrix rows");
  if (lower_bounds.size() != n || upper_bounds.size() != n) {
    throw std::domain_error("LpProblem: bound vectors must match objective length");
  }
  for (std::size_t j = 0; j < n; ++j) {
    if (std::isnan(lower_bounds[j]) || std::isnan(upper_bounds[j]) || lower_bounds[j] > upper_bounds[j]) {
      throw std::domain_error("LpProblem: lower bound exceeds upper bound");
    }
    if (!std::isfinite(objective[j])) throw std::domain_error("LpProblem: non-finite objective");
    if (lower_bounds[j] >= kInfinity || upper_bounds[j] <= -kInfinity) {
      throw std::domain_error("LpProblem: bound pinned at infinity");
    }
  }
  for (double b : eq_rhs)
    if (!std::isfinite(b)) throw std::domain_error("LpProblem: non-finite rhs");
  if (!eq_matrix.all_finite()) throw std::domain_error("LpProblem: non-finite constraint entry");
}

LpSolution lp_solve(const LpProblem& problem, const LpOptions& options) {
  problem.validate();
  const StandardForm sf = to_standard_form(problem);
  RevisedSimplex simplex(sf, options);

  Vector phase1(sf.cols + sf.equality_rows, 0.0);
  for (std::size_t i = 0; i < sf.equality_rows; ++i) phase1[sf.cols + i] = 1.0;
  simplex.run(phase1, true);

  double rhs_scale = 1.0;
  for (double b : sf.rhs) rhs_scale = std::max(rhs_scale, std::abs(b));
  LpSolution sol;
  if (simplex.artificial_mass() > 1e-7 * rhs_scale) {
    sol.status = LpStatus::infeasible;
    sol.iterations = simplex.iterations();
    return sol;
  }
  simplex.expel_artificials();

  Vector phase2(sf.cols + sf.equality_rows, 0.0);
  std::copy(sf.cost.begin(), sf.cost.end(), phase2.begin());
  const auto outcome = simplex.run(phase2, false);
  sol.iterations = simplex.iterations();
  if (outcome == RevisedSimplex::Outcome::unbounded) {
    sol.status = LpStatus::unbounded;
    return sol;
  }

  const Vector xs = simplex.structural_point();
  const std::size_t n = problem.objective.size();
  sol.point.resize(n);
  for (std::size_t j = 0; j < n; ++j) {
    const VariableMap& vm = sf.map[j];
    double v = vm.base + vm.sign * xs[vm.pos];
    if (vm.neg != kNone) v -= xs[vm.neg];
    sol.point[j] = v;
  }
  sol.status = LpStatus::optimal;
  sol.value = dot(problem.objective, sol.point);
  return sol;
}

LpSolution l1_min(const Matrix& a, std::span<const double> y, const LpOptions& options) {
  const std::size_t n = a.rows(), big_n = a.cols();
  if (y.size() != n) throw std::domain_error("l1_min: rhs length differs from rows of A");
  Matrix split(n, 2 * big_n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < big_n; ++j) {
      split(i, j) = a(i, j);
      split(i, big_n + j) = -a(i, j);
    }
  }
  LpSolution lp = lp_solve(LpProblem::nonnegative(Vector(2 * big_n, 1.0), std::move(split), Vector(y.begin(), y.end())),
                           options);
  if (lp.status != LpStatus::optimal) return lp;
  Vector x(big_n);
  for (std::size_t j = 0; j < big_n; ++j) x[j] = lp.point[j] - lp.point[big_n + j];
  lp.point = std::move(x);
  lp.value = norm1(lp.point);
  return lp;
}

const char* to_string(LpStatus s) {
  switch (s) {
    case LpStatus::optimal: return "optimal";
    case LpStatus::infeasible: return "infeasible";
    case LpStatus::unbounded: return "unbounded";
  }
  return "unknown";
}

}  // namespace polylab
