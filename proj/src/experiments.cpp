#include "polylab/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <chrono>
#include <cmath>
#include <exception>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "polylab/errors.hpp"
#include "polylab/linalg.hpp"
#include "polylab/norms.hpp"
#include "polylab/polytope.hpp"
#include "polylab/rng.hpp"

namespace polylab {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double quantile_sorted(const std::vector<double>& v, double q) {
  const double pos = q * double(v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, v.size() - 1);
  const double w = pos - double(lo);
  if (w == 0.0) return v[lo];
  return v[lo] * (1.0 - w) + v[hi] * w;
}

nlohmann::json num(double x) { return std::isfinite(x) ? nlohmann::json(x) : nlohmann::json(nullptr); }

double from_num(const nlohmann::json& j) { return j.is_null() ? kNaN : j.get<double>(); }

Vector unit_vector(CounterRng& rng, std::size_t n) {
  Vector x(n);
  double s = 0.0;
  while (s == 0.0) {
    for (double& v : x) v = rng.normal();
    s = norm2(x);
  }
  for (double& v : x) v /= s;
  return x;
}

// Shared skeleton: runs `trial` for every index in parallel, fills rows and
// pass flags, then reduces in index order.
template <class Trial>
TrialReport run_trials(const std::string& name, const ExperimentConfig& cfg, std::vector<std::string> columns,
                       std::string primary, Trial&& trial) {
  cfg.validate();
  const auto start = std::chrono::steady_clock::now();
  TrialReport r;
  r.experiment = name;
  r.config = cfg;
  r.columns = std::move(columns);
  r.primary = std::move(primary);
  r.rows.assign(cfg.trials, std::vector<double>(r.columns.size(), kNaN));
  std::vector<char> pass(cfg.trials, 0);
  parallel_for(cfg.trials, cfg.workers, [&](std::size_t t) {
    pass[t] = trial(t, trial_seed(cfg.seed, t), r.rows[t]) ? 1 : 0;
  });
  r.passed.assign(pass.begin(), pass.end());
  r.finalize();
  r.wall_time_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return r;
}

double mean_of(const std::vector<double>& v) {
  double s = 0.0;
  std::size_t c = 0;
  for (double x : v)
    if (std::isfinite(x)) s += x, ++c;
  return c ? s / double(c) : kNaN;
}

nlohmann::json constants_json(const SmallBallConstants& k) {
  return {{"u", k.u},         {"v", k.v},           {"c", k.c},          {"c_uv", k.c_uv},
          {"C_v", k.C_v},     {"gamma1", k.gamma1}, {"gamma2", k.gamma2}};
}

SmallBallConstants constants_of(const ExperimentConfig& cfg) {
  return small_ball_constants(cfg.ensemble.u(), cfg.ensemble.v(), cfg.c);
}

double sval_threshold(const SmallBallConstants& k) { return k.c_uv * std::sqrt(k.gamma2) / (4.0 * k.gamma1); }

// ‖B_ε : ℓ∞ⁿ → X_{N,k}‖ = max over sign vectors x of ‖B_ε x‖_{k,2}; x and −x
// give the same value, so x₀ = +1 is fixed and the rest is walked in Gray order.
double rademacher_op_norm(const Matrix& b, std::size_t k) {
  const std::size_t big_n = b.rows(), n = b.cols();
  Vector x(n, 1.0);
  Vector y(big_n);
  for (std::size_t i = 0; i < big_n; ++i) y[i] = dot(b.row(i), x);
  double best = k_norm(y, k);
  const std::uint64_t steps = std::uint64_t{1} << (n - 1);
  for (std::uint64_t s = 1; s < steps; ++s) {
    const std::size_t j = 1 + std::size_t(std::countr_zero(s));
    for (std::size_t i = 0; i < big_n; ++i) y[i] -= 2.0 * x[j] * b(i, j);
    x[j] = -x[j];
    best = std::max(best, k_norm(y, k));
  }
  return best;
}

}  // namespace

// ---------------------------------------------------------------- config

void ExperimentConfig::validate() const {
  if (n < 1) throw std::domain_error("config: n must be at least 1");
  if (big_n < n) throw std::domain_error("config: N must be at least n");
  if (trials < 1) throw std::domain_error("config: trials must be at least 1");
  if (!(beta > 0.0 && beta < 1.0)) throw std::domain_error("config: beta must lie in (0, 1)");
  if (!(c > 0.0 && c <= 1.0)) throw std::domain_error("config: c must lie in (0, 1]");
  if (!(lambda > 0.0) || !std::isfinite(lambda)) throw std::domain_error("config: lambda must be positive");
  if (!(mu > 0.0) || !std::isfinite(mu)) throw std::domain_error("config: mu must be positive");
  if (samples_per_trial < 1) throw std::domain_error("config: samples_per_trial must be at least 1");
  for (const auto& [k, v] : thresholds)
    if (!std::isfinite(v)) throw std::domain_error("config: threshold '" + k + "' is not finite");
}

double ExperimentConfig::param(const std::string& key, double fallback) const {
  const auto it = thresholds.find(key);
  return it == thresholds.end() ? fallback : it->second;
}

nlohmann::json ExperimentConfig::to_json() const {
  nlohmann::json th = nlohmann::json::object();
  for (const auto& [k, v] : thresholds) th[k] = v;
  return {{"ensemble", ensemble.to_json()},
          {"n", n},
          {"N", big_n},
          {"trials", trials},
          {"seed", seed},
          {"beta", beta},
          {"c", c},
          {"lambda", lambda},
          {"mu", mu},
          {"samples_per_trial", samples_per_trial},
          {"thresholds", th}};
}

ExperimentConfig ExperimentConfig::from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw std::domain_error("config: expected a JSON object");
  ExperimentConfig cfg;
  auto count = [](const nlohmann::json& v, const char* key) -> std::size_t {
    if (!v.is_number_integer() || (v.is_number_integer() && !v.is_number_unsigned() && v.get<std::int64_t>() < 0))
      throw std::domain_error(std::string("config: ") + key + " must be a non-negative integer");
    return v.get<std::size_t>();
  };
  auto real = [](const nlohmann::json& v, const char* key) -> double {
    if (!v.is_number()) throw std::domain_error(std::string("config: ") + key + " must be a number");
    return v.get<double>();
  };
  for (const auto& [key, v] : j.items()) {
    if (key == "ensemble") {
      cfg.ensemble = ensemble_from_json(v);
    } else if (key == "n") {
      cfg.n = count(v, "n");
    } else if (key == "N") {
      cfg.big_n = count(v, "N");
    } else if (key == "trials") {
      cfg.trials = count(v, "trials");
    } else if (key == "seed") {
      if (!v.is_number_unsigned()) throw std::domain_error("config: seed must be a non-negative integer");
      cfg.seed = v.get<std::uint64_t>();
    } else if (key == "beta") {
      cfg.beta = real(v, "beta");
    } else if (key == "c") {
      cfg.c = real(v, "c");
    } else if (key == "lambda") {
      cfg.lambda = real(v, "lambda");
    } else if (key == "mu") {
      cfg.mu = real(v, "mu");
    } else if (key == "samples_per_trial") {
      cfg.samples_per_trial = count(v, "samples_per_trial");
    } else if (key == "workers") {
      cfg.workers = count(v, "workers");
    } else if (key == "thresholds") {
      if (!v.is_object()) throw std::domain_error("config: thresholds must be an object");
      for (const auto& [name, value] : v.items()) cfg.thresholds[name] = real(value, "threshold");
    } else {
      throw std::domain_error("config: unknown key '" + key + "'");
    }
  }
  cfg.validate();
  return cfg;
}

// ---------------------------------------------------------------- report

Aggregate aggregate(const std::vector<double>& values) {
  std::vector<double> v;
  for (double x : values)
    if (std::isfinite(x)) v.push_back(x);
  Aggregate a;
  a.count = v.size();
  if (v.empty()) return a;
  std::sort(v.begin(), v.end());
  a.min = v.front();
  a.max = v.back();
  double s = 0.0;
  for (double x : v) s += x;
  a.mean = s / double(v.size());
  a.q05 = quantile_sorted(v, 0.05);
  a.q50 = quantile_sorted(v, 0.50);
  a.q95 = quantile_sorted(v, 0.95);
  return a;
}

std::vector<double> TrialReport::column(const std::string& name) const {
  const auto it = std::find(columns.begin(), columns.end(), name);
  if (it == columns.end()) throw std::domain_error("report: no column '" + name + "'");
  const auto idx = std::size_t(it - columns.begin());
  std::vector<double> out;
  out.reserve(rows.size());
  for (const auto& row : rows) out.push_back(row[idx]);
  return out;
}

void TrialReport::finalize() {
  aggregates.clear();
  for (const auto& name : columns) aggregates[name] = aggregate(column(name));
  std::size_t hits = 0;
  for (bool p : passed) hits += p;
  pass_frequency = passed.empty() ? 0.0 : double(hits) / double(passed.size());
}

nlohmann::json TrialReport::to_json() const {
  nlohmann::json j;
  j["experiment"] = experiment;
  j["params"] = config.to_json();
  j["seed"] = config.seed;
  j["threshold"] = {{"value", num(threshold)}, {"formula", threshold_formula}};
  j["columns"] = columns;
  nlohmann::json trials = nlohmann::json::array();
  for (const auto& row : rows) {
    nlohmann::json jr = nlohmann::json::array();
    for (double x : row) jr.push_back(num(x));
    trials.push_back(jr);
  }
  j["trials"] = trials;
  j["pass"] = passed;
  nlohmann::json agg = nlohmann::json::object();
  for (const auto& [name, a] : aggregates) {
    agg[name] = {{"min", num(a.min)},   {"max", num(a.max)}, {"mean", num(a.mean)}, {"q05", num(a.q05)},
                 {"q50", num(a.q50)},   {"q95", num(a.q95)}, {"count", a.count}};
  }
  j["aggregates"] = agg;
  j["primary"] = primary;
  const auto it = aggregates.find(primary);
  double estimate = kNaN, se = kNaN;
  if (it != aggregates.end() && it->second.count > 0) {
    estimate = it->second.mean;
    double ss = 0.0;
    for (double x : column(primary))
      if (std::isfinite(x)) ss += (x - estimate) * (x - estimate);
    const auto m = double(it->second.count);
    se = m > 1 ? std::sqrt(ss / (m - 1.0) / m) : 0.0;
  }
  j["estimate"] = num(estimate);
  j["std_error"] = num(se);
  j["samples"] = rows.size();
  j["pass_frequency"] = pass_frequency;
  j["extras"] = extras;
  j["wall_time_seconds"] = wall_time_seconds;
  return j;
}

TrialReport TrialReport::from_json(const nlohmann::json& j) {
  TrialReport r;
  r.experiment = j.at("experiment").get<std::string>();
  r.config = ExperimentConfig::from_json(j.at("params"));
  r.threshold = from_num(j.at("threshold").at("value"));
  r.threshold_formula = j.at("threshold").at("formula").get<std::string>();
  r.columns = j.at("columns").get<std::vector<std::string>>();
  for (const auto& jr : j.at("trials")) {
    std::vector<double> row;
    for (const auto& x : jr) row.push_back(from_num(x));
    if (row.size() != r.columns.size()) throw std::domain_error("report: row width does not match columns");
    r.rows.push_back(std::move(row));
  }
  r.passed = j.at("pass").get<std::vector<bool>>();
  if (r.passed.size() != r.rows.size()) throw std::domain_error("report: pass flags do not match trials");
  r.primary = j.at("primary").get<std::string>();
  r.extras = j.at("extras");
  r.wall_time_seconds = j.at("wall_time_seconds").get<double>();
  r.finalize();
  return r;
}

std::string TrialReport::to_csv() const {
  std::ostringstream out;
  out.precision(17);
  out << "trial";
  for (const auto& c : columns) out << ',' << c;
  out << ",pass\n";
  for (std::size_t t = 0; t < rows.size(); ++t) {
    out << t;
    for (double x : rows[t]) {
      out << ',';
      if (std::isfinite(x))
        out << x;
      else
        out << "nan";
    }
    out << ',' << (passed[t] ? 1 : 0) << '\n';
  }
  return out.str();
}

std::vector<std::string> check_thresholds(const TrialReport& report) {
  std::vector<std::string> bad;
  for (const auto& [key, limit] : report.config.thresholds) {
    if (key == "min_pass_frequency") {
      if (report.pass_frequency < limit) bad.push_back(key);
      continue;
    }
    if (key == "max_pass_frequency") {
      if (report.pass_frequency > limit) bad.push_back(key);
      continue;
    }
    const auto last = key.rfind('.');
    if (last == std::string::npos) continue;
    const auto mid = key.rfind('.', last - 1);
    if (mid == std::string::npos || mid == 0) continue;
    const std::string bound = key.substr(last + 1);
    const std::string stat = key.substr(mid + 1, last - mid - 1);
    const std::string col = key.substr(0, mid);
    if (bound != "min" && bound != "max") continue;
    const auto it = report.aggregates.find(col);
    if (it == report.aggregates.end()) {
      bad.push_back(key + " (no such column)");
      continue;
    }
    const Aggregate& a = it->second;
    double value;
    if (stat == "min") value = a.min;
    else if (stat == "max") value = a.max;
    else if (stat == "mean") value = a.mean;
    else if (stat == "q05") value = a.q05;
    else if (stat == "q50") value = a.q50;
    else if (stat == "q95") value = a.q95;
    else {
      bad.push_back(key + " (unknown statistic)");
      continue;
    }
    if (a.count == 0 || (bound == "min" ? value < limit : value > limit)) bad.push_back(key);
  }
  return bad;
}

// ---------------------------------------------------------------- workers

void parallel_for(std::size_t count, std::size_t workers, const std::function<void(std::size_t)>& body) {
  if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
  workers = std::min(workers, count);
  std::vector<std::exception_ptr> errors(count);
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) {
      try {
        body(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < count; i = next++) {
          try {
            body(i);
          } catch (...) {
            errors[i] = std::current_exception();
          }
        }
      });
    }
    for (auto& t : pool) t.join();
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

std::uint64_t trial_seed(std::uint64_t seed, std::size_t trial) { return derive_seed(seed, trial); }

// ---------------------------------------------------------------- drivers

TrialReport run_sval(const ExperimentConfig& cfg) {
  const auto k = constants_of(cfg);
  const double thr = sval_threshold(k);
  const double thr_x = 2.0 * thr;
  const double root_n = std::sqrt(double(cfg.big_n));
  std::vector<Vector> xs;
  CounterRng xr(derive_seed(cfg.seed, ~std::uint64_t{0}));
  for (int i = 0; i < 100; ++i) xs.push_back(unit_vector(xr, cfg.n));

  auto r = run_trials("sval", cfg, {"s_n_over_sqrt_N", "x_min_over_sqrt_N", "x_fraction_below"}, "s_n_over_sqrt_N",
                      [&](std::size_t, std::uint64_t seed, std::vector<double>& row) {
                        const Matrix g = sample_matrix(cfg.ensemble, cfg.big_n, cfg.n, seed);
                        const double s = smallest_singular_value(g) / root_n;
                        double lo = HUGE_VAL;
                        std::size_t below = 0;
                        for (const auto& x : xs) {
                          const double v = norm2(g.apply(x)) / root_n;
                          lo = std::min(lo, v);
                          below += v <= thr_x;
                        }
                        row = {s, lo, double(below) / double(xs.size())};
                        return s > thr;
                      });
  r.threshold = thr;
  r.threshold_formula = "c_uv*sqrt(gamma2)/(4*gamma1)";
  r.extras = {{"constants", constants_json(k)},
              {"x_threshold", thr_x},
              {"x_threshold_formula", "c_uv*sqrt(gamma2)/(2*gamma1)"},
              {"x_event_frequency", mean_of(r.column("x_fraction_below"))},
              {"x_event_bound", std::exp(-0.75 * k.gamma2 * double(cfg.big_n))},
              {"s_n_event_bound", 3.0 * std::exp(-std::min(2.0, k.gamma2) * double(cfg.big_n) / 8.0)},
              {"edge", (root_n - std::sqrt(double(cfg.n))) / root_n}};
  return r;
}

TrialReport run_inclusion(const ExperimentConfig& cfg) {
  const auto k = constants_of(cfg);
  const auto body = IntersectionBody::from_constants(cfg.n, cfg.big_n, cfg.beta, k);
  const double thr_ball = sval_threshold(k);
  const double root_n = std::sqrt(double(cfg.big_n));
  auto r = run_trials(
      "inclusion", cfg,
      {"dual_min", "dual_event", "largest_C", "consistent", "infeasible", "s_n_over_sqrt_N", "ball_inclusion"},
      "largest_C", [&](std::size_t, std::uint64_t seed, std::vector<double>& row) {
        const Matrix g = sample_matrix(cfg.ensemble, cfg.big_n, cfg.n, seed);
        const double s = smallest_singular_value(g) / root_n;
        const Polytope p(g);
        const auto rep = inclusion_check(p, body, cfg.samples_per_trial, derive_seed(seed, 1));
        row = {rep.dual_min,  double(rep.dual_event), rep.primal_largest_C, double(rep.consistent),
               double(rep.infeasible), s, double(s >= thr_ball)};
        return !rep.dual_event;
      });
  const double ln_ratio = std::log(double(cfg.big_n) / double(cfg.n));
  r.threshold = 0.25;
  r.threshold_formula = "min over sampled z in boundary of L polar of ||Gamma z||_inf >= 1/4";
  r.extras = {{"constants", constants_json(k)},
              {"R", body.alpha},
              {"R_formula", "sqrt(beta*ln(N/n)/C_v)"},
              {"dual_event_frequency", mean_of(r.column("dual_event"))},
              {"dual_event_bound", 4.0 * std::exp(-std::pow(double(cfg.n), cfg.beta) *
                                                  std::pow(double(cfg.big_n), 1.0 - cfg.beta) / 40.0)},
              {"ball_threshold", thr_ball},
              {"ball_threshold_formula", "c_uv*sqrt(gamma2)/(4*gamma1)"},
              {"ball_inclusion_frequency", mean_of(r.column("ball_inclusion"))},
              {"cube_scale", std::sqrt(ln_ratio / double(cfg.n))}};
  return r;
}

TrialReport run_quotient(const ExperimentConfig& cfg) {
  const double k_target = cfg.param("k_target", 3.0);
  const double scale = std::sqrt(double(cfg.n) / std::log(std::exp(1.0) * double(cfg.big_n) / double(cfg.n)));
  auto r = run_trials("quotient", cfg, {"max_ratio", "q50_ratio", "q95_ratio", "infeasible"}, "max_ratio",
                      [&](std::size_t, std::uint64_t seed, std::vector<double>& row) {
                        const Polytope p(sample_matrix(cfg.ensemble, cfg.big_n, cfg.n, seed));
                        const auto rep = quotient_check(p, k_target, cfg.samples_per_trial, derive_seed(seed, 1));
                        row = {rep.max_ratio, rep.q50, rep.q95, double(rep.infeasible)};
                        return rep.pass;
                      });
  r.threshold = k_target;
  r.threshold_formula = "max over y of ||y||_K / sqrt(n/ln(eN/n)) <= k_target, ||y|| = max(|y|_2, sqrt(ln(eN/n))|y|_inf)";
  r.extras = {{"scale", scale}, {"scale_formula", "sqrt(n/ln(eN/n))"}};
  return r;
}

TrialReport run_volume(const ExperimentConfig& cfg) {
  if (cfg.n > 12) throw SizeError("run_volume: n > 12 is beyond the hit-rate guard");
  const double scale = std::sqrt(std::log(double(cfg.big_n) / double(cfg.n)) / double(cfg.n));
  auto r = run_trials("volume", cfg, {"volume_root", "volume_root_se", "ratio", "cond13", "zero_hits"}, "ratio",
                      [&](std::size_t, std::uint64_t seed, std::vector<double>& row) {
                        const Matrix g = sample_matrix(cfg.ensemble, cfg.big_n, cfg.n, seed);
                        const auto cond = check_conditions(g, cfg.lambda, cfg.mu);
                        const auto est = volume_mc(Polytope(g), cfg.samples_per_trial, derive_seed(seed, 1));
                        const double root = est.root.point_estimate;
                        row = {root, est.root.std_error, scale > 0.0 ? root / scale : kNaN, double(cond.cond13),
                               double(est.root.zero_hits)};
                        return !est.root.zero_hits && root > 0.0;
                      });
  const auto& a = r.aggregates.at("ratio");
  r.threshold = 0.0;
  r.threshold_formula = "|K_N|^(1/n) / sqrt(ln(N/n)/n) > 0";
  r.extras = {{"scale", num(scale)},
              {"scale_formula", "sqrt(ln(N/n)/n)"},
              {"C2_hat", a.count ? num(a.min) : nullptr},
              {"C_hat", a.count ? num(a.max) : nullptr},
              {"C_hat_over_lambda", a.count ? num(a.max / cfg.lambda) : nullptr},
              {"cond13_frequency", mean_of(r.column("cond13"))}};
  return r;
}

TrialReport run_meanwidth(const ExperimentConfig& cfg) {
  const double n = double(cfg.n), big_n = double(cfg.big_n);
  const double ln_ratio = std::log(big_n / n);
  const double upper_m = std::sqrt(std::log(2.0 * n) / n) + 1.0 / std::sqrt(ln_ratio);
  const double root_ln = std::sqrt(ln_ratio);
  const double ln_small = std::log(n / (8.0 * cfg.mu * cfg.mu));
  auto r = run_trials(
      "meanwidth", cfg,
      {"M", "M_se", "M_star", "M_star_se", "M_upper_ratio", "M_lower_ratio", "M_star_lower_ratio",
       "M_star_upper_ratio", "M_star_small_ratio", "cond13", "cond14", "cond15"},
      "M_star_lower_ratio", [&](std::size_t, std::uint64_t seed, std::vector<double>& row) {
        const Matrix g = sample_matrix(cfg.ensemble, cfg.big_n, cfg.n, seed);
        const auto cond = check_conditions(g, cfg.lambda, cfg.mu);
        const Polytope p(g);
        const auto m = mean_width_M(p, cfg.samples_per_trial, derive_seed(seed, 1));
        const auto ms = mean_width_polar(p, cfg.samples_per_trial, derive_seed(seed, 2));
        const double M = m.point_estimate, Ms = ms.point_estimate;
        row = {M,
               m.std_error,
               Ms,
               ms.std_error,
               ln_ratio > 0.0 ? M / upper_m : kNaN,
               ln_ratio > 0.0 ? M * cfg.lambda * root_ln : kNaN,
               ln_ratio > 0.0 ? Ms / root_ln : kNaN,
               big_n > 1.0 ? Ms / (cfg.lambda * std::sqrt(std::log(big_n))) : kNaN,
               ln_small > 0.0 ? Ms / std::sqrt(ln_small) : kNaN,
               double(cond.cond13),
               double(cond.cond14),
               double(cond.cond15)};
        return ln_ratio > 0.0 && Ms > 0.0 && std::isfinite(M);
      });
  r.threshold = 0.0;
  r.threshold_formula = "M(K_N polar) / sqrt(ln(N/n)) > 0";
  r.extras = {{"M_upper_formula", "M / (sqrt(ln(2n)/n) + 1/sqrt(ln(N/n)))"},
              {"M_lower_formula", "M * lambda * sqrt(ln(N/n))"},
              {"M_star_lower_formula", "M_star / sqrt(ln(N/n))"},
              {"M_star_upper_formula", "M_star / (lambda * sqrt(ln N))"},
              {"M_star_small_formula", "M_star / sqrt(ln(n/(8 mu^2)))"},
              {"cond13_frequency", mean_of(r.column("cond13"))},
              {"cond14_frequency", mean_of(r.column("cond14"))},
              {"cond15_frequency", mean_of(r.column("cond15"))}};
  return r;
}

TrialReport run_opnorm(const ExperimentConfig& cfg) {
  const double factor = cfg.param("heavy_tail_factor", 2.0);
  const double root_n = std::sqrt(double(cfg.big_n));
  const auto gauss = make_ensemble(EnsembleKind::gaussian);
  auto r = run_trials("opnorm", cfg, {"op_over_sqrt_N", "gaussian_op_over_sqrt_N"}, "op_over_sqrt_N",
                      [&](std::size_t, std::uint64_t seed, std::vector<double>& row) {
                        const double a = operator_norm(sample_matrix(cfg.ensemble, cfg.big_n, cfg.n, seed)) / root_n;
                        const double b =
                            operator_norm(sample_matrix(gauss, cfg.big_n, cfg.n, derive_seed(seed, 1))) / root_n;
                        row = {a, b};
                        return a <= cfg.mu;
                      });
  const double q_a = r.aggregates.at("op_over_sqrt_N").q95;
  const double q_b = r.aggregates.at("gaussian_op_over_sqrt_N").q95;
  r.threshold = cfg.mu;
  r.threshold_formula = "||Gamma|| / sqrt(N) <= mu";
  r.extras = {{"q95_ratio", num(q_a / q_b)},
              {"q95_ratio_formula", "q95(||Gamma||/sqrt(N)) / q95 of the gaussian reference"},
              {"heavy_tail_factor", factor},
              {"heavy_tail", q_a >= factor * q_b},
              {"edge", 1.0 + std::sqrt(double(cfg.n) / double(cfg.big_n))}};
  return r;
}

TrialReport run_smallball_lemmas(const ExperimentConfig& cfg) {
  const auto k = constants_of(cfg);
  const double alpha = cfg.param("alpha", 1.0);
  const auto sigma = static_cast<std::size_t>(cfg.param("sigma", 8.0));
  const double slack = cfg.param("concentration_slack", 0.02);
  if (!(alpha > 0.0)) throw std::domain_error("run_smallball_lemmas: alpha must be positive");
  if (sigma < 1) throw std::domain_error("run_smallball_lemmas: sigma must be at least 1");
  const std::size_t draws = std::max(cfg.samples_per_trial, cfg.n);
  const double n = double(cfg.n), big_n = double(cfg.big_n);

  const auto cap = IntersectionBody::explicit_body(cfg.n, k.c_uv, alpha);
  const double bound46 = std::pow((1.0 - k.v) / 2.0, 5.0 * alpha * alpha);
  const double bound47 = std::exp(-double(sigma) * std::exp(-k.C_v * alpha * alpha));

  // Block event on ‖Γz‖_{k,2}/√k.
  const bool have48 = cfg.big_n > cfg.n;
  IntersectionBody body48;
  std::size_t m48 = 0, k48 = 0;
  if (have48) {
    body48 = IntersectionBody::from_constants(cfg.n, cfg.big_n, cfg.beta, k);
    m48 = 8 * static_cast<std::size_t>(std::ceil(std::pow(big_n / n, cfg.beta)));
    if (double(m48) >= big_n / 4.0) m48 = cfg.big_n;
    k48 = std::max<std::size_t>(1, cfg.big_n / m48);
  }
  const double bound48 = std::exp(-0.3 * std::pow(n, cfg.beta) * std::pow(big_n, 1.0 - cfg.beta));

  // Rademacher-randomized operator norm.
  const bool have34 = cfg.n <= 12;
  std::size_t k34 = 1;
  while (double(k34) * std::log(std::exp(1.0) * big_n / double(k34)) < n) ++k34;

  auto r = run_trials(
      "lemmas", cfg,
      {"concentration", "cap_event_frequency", "sup_event_frequency", "block_event_frequency", "op_ratio"},
      "concentration", [&](std::size_t, std::uint64_t seed, std::vector<double>& row) {
        const Matrix xi = sample_matrix(cfg.ensemble, draws, cfg.n, derive_seed(seed, 1));
        CounterRng rng(derive_seed(seed, 2));
        const Vector x = unit_vector(rng, cfg.n);
        Vector sums(draws);
        for (std::size_t i = 0; i < draws; ++i) sums[i] = dot(xi.row(i), x);
        const double q = concentration_fn(sums, k.c_uv);

        const Vector z = sample_boundary_L_polar(cap, 1, derive_seed(seed, 3)).front();
        const double h = h_L(cap, z);
        std::size_t above = 0, blocks = 0, low_blocks = 0;
        double block_max = 0.0;
        for (std::size_t i = 0; i < draws; ++i) {
          const double s = dot(xi.row(i), z);
          above += s > h;
          block_max = std::max(block_max, std::abs(s));
          if ((i + 1) % sigma == 0) {
            ++blocks;
            low_blocks += block_max < h;
            block_max = 0.0;
          }
        }
        const double f46 = double(above) / double(draws);
        const double f47 = blocks ? double(low_blocks) / double(blocks) : kNaN;

        double f48 = kNaN, op = kNaN;
        const Matrix g = sample_matrix(cfg.ensemble, cfg.big_n, cfg.n, derive_seed(seed, 4));
        if (have48) {
          const auto zs = sample_boundary_L_polar(body48, 10, derive_seed(seed, 5));
          std::size_t events = 0;
          for (const auto& zz : zs) events += k_norm(g.apply(zz), k48) / std::sqrt(double(k48)) < 0.5;
          f48 = double(events) / double(zs.size());
        }
        if (have34) {
          Matrix b = g;
          CounterRng flips(derive_seed(seed, 6));
          double max_row = 0.0;
          for (std::size_t i = 0; i < b.rows(); ++i) {
            max_row = std::max(max_row, norm2(g.row(i)));
            for (double& e : b.row(i)) e *= flips.sign();
          }
          const double scale = 6.0 * std::sqrt(double(k34) * std::log(std::exp(1.0) * big_n / double(k34))) * max_row;
          op = rademacher_op_norm(b, k34) / scale;
        }
        row = {q, f46, f47, f48, op};
        return q <= k.v + slack && f46 > bound46 && (!have34 || op < 1.0);
      });
  r.threshold = k.v;
  r.threshold_formula = "concentration of sum x_i xi_i at width c_uv <= v (+ concentration_slack)";
  const double mean47 = mean_of(r.column("sup_event_frequency"));
  const double mean48 = mean_of(r.column("block_event_frequency"));
  r.extras = {{"constants", constants_json(k)},
              {"draws", draws},
              {"alpha", alpha},
              {"cap_event_bound", bound46},
              {"cap_event_bound_formula", "((1-v)/2)^(5 alpha^2)"},
              {"sigma", sigma},
              {"sup_event_bound", bound47},
              {"sup_event_bound_formula", "exp(-sigma exp(-C_v alpha^2))"},
              {"sup_event_mean", num(mean47)},
              {"block_m", m48},
              {"block_k", k48},
              {"block_event_bound", bound48},
              {"block_event_bound_formula", "exp(-0.3 n^beta N^(1-beta))"},
              {"block_event_mean", num(mean48)},
              {"op_k", k34},
              {"op_formula", "max over x in {-1,1}^n of ||B_eps x||_(k,2) / (6 sqrt(k ln(eN/k)) max row norm)"}};
  if (!have48) r.extras["block_m"] = nullptr;
  return r;
}

const std::vector<std::string>& experiment_names() {
  static const std::vector<std::string> names = {"sval",      "inclusion", "quotient", "volume",
                                                 "meanwidth", "opnorm",    "lemmas"};
  return names;
}

TrialReport run_experiment(const std::string& name, const ExperimentConfig& cfg) {
  if (name == "sval") return run_sval(cfg);
  if (name == "inclusion") return run_inclusion(cfg);
  if (name == "quotient") return run_quotient(cfg);
  if (name == "volume") return run_volume(cfg);
  if (name == "meanwidth") return run_meanwidth(cfg);
  if (name == "opnorm") return run_opnorm(cfg);
  if (name == "lemmas") return run_smallball_lemmas(cfg);
  throw std::domain_error("unknown experiment '" + name + "'");
}

}  // namespace polylab
