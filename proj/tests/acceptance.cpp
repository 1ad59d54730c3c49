// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "polylab/cli.hpp"
#include "polylab/ensembles.hpp"
#include "polylab/errors.hpp"
#include "polylab/experiments.hpp"
#include "polylab/linalg.hpp"
#include "polylab/lp.hpp"
#include "polylab/nets.hpp"
#include "polylab/norms.hpp"
#include "polylab/polytope.hpp"
#include "polylab/schema.hpp"
#include "test_oracles.hpp"

using namespace polylab;
namespace fs = std::filesystem;

namespace {

constexpr std::uint64_t kSeed = 42;
constexpr double kPi = std::numbers::pi;

struct Outcome {
  bool pass = true;
  std::ostringstream details;
  std::string violations;

  void require(bool cond, const std::string& what) {
    if (cond) return;
    violations += (pass ? "" : "; ") + what;
    pass = false;
  }
};

struct Criterion {
  int id;
  std::string name;
  double time_limit;  // seconds
  std::function<void(Outcome&)> body;
};

std::string fmt(double x, int digits = 4) {
  std::ostringstream s;
  s.precision(digits);
  s << x;
  return s.str();
}

Vector gaussian_vector(std::mt19937_64& rng, std::size_t n) {
  std::normal_distribution<double> g;
  Vector v(n);
  for (auto& x : v) x = g(rng);
  return v;
}

Matrix gaussian_matrix(std::mt19937_64& rng, std::size_t rows, std::size_t cols) {
  return Matrix(rows, cols, gaussian_vector(rng, rows * cols));
}

Matrix circle_rows(std::size_t count) {
  Matrix m(count, 2);
  for (std::size_t i = 0; i < count; ++i) {
    const double a = 2.0 * kPi * double(i) / double(count);
    m(i, 0) = std::cos(a);
    m(i, 1) = std::sin(a);
  }
  return m;
}

ExperimentConfig config(const std::string& dist, std::size_t n, std::size_t big_n, std::size_t trials,
                        std::uint64_t seed = kSeed) {
  ExperimentConfig c;
  c.ensemble = parse_ensemble(dist);
  c.n = n;
  c.big_n = big_n;
  c.trials = trials;
  c.seed = seed;
  return c;
}

double threshold_oracle(double u, double v, double c) {
  const double cuv = c * u * v * std::sqrt(1.0 - v);
  const double g1 = v >= 0.5 ? std::sqrt(std::log(2.0)) : std::sqrt(-std::log(v));
  const double g2 = v >= 0.5 ? std::log(2.0 / (1.0 + v)) : -std::log(2.0 * v - v * v);
  return cuv * std::sqrt(g2) / (4.0 * g1);
}

// Shared between the singular-value and heavy-tail criteria.
double g_pareto_sval_pass = -1.0;

void check_norm_oracles(Outcome& o) {
  std::mt19937_64 rng(kSeed);
  double worst = 0.0;
  for (int t = 0; t < 100; ++t) {
    const std::size_t n = 1 + rng() % 8, m = 1 + rng() % n;
    const Vector z = gaussian_vector(rng, n);
    worst = std::max(worst, std::abs(ms_norm_brute(z, m).value - oracle::ms_norm_by_labelling(z, m)));
  }
  o.require(worst <= 1e-9, "partition norm differs from labelling oracle by " + fmt(worst));

  std::size_t violations = 0;
  double slack = std::numeric_limits<double>::infinity();
  for (int t = 0; t < 1000; ++t) {
    const std::size_t n = 1 + rng() % 10;
    const double alpha = 1.0 + (std::sqrt(double(n)) - 1.0) * std::uniform_real_distribution<double>()(rng);
    const std::size_t m = std::min<std::size_t>(std::ceil(1.0 + 4.0 * alpha * alpha), n);
    const Vector x = gaussian_vector(rng, n);
    const double h = oracle::cube_cap_support_primal(x, alpha);
    const double lib = support_cube_cap(x, alpha);
    const double ms = ms_norm_brute(x, m).value;
    violations += std::abs(h - lib) > 1e-7 * std::max(1.0, h);
    violations += lib > ms * (1 + 1e-12);
    slack = std::min(slack, ms - lib);
  }
  o.require(violations == 0, std::to_string(violations) + " cube-cap violations");
  o.details << "max partition-norm error " << fmt(worst) << ", min cube-cap slack " << fmt(slack);
}

void check_lp_oracle(Outcome& o) {
  std::mt19937_64 rng(kSeed);
  double worst = 0.0;
  std::size_t mismatched = 0;
  for (int t = 0; t < 100; ++t) {
    const std::size_t n = 1 + rng() % 3, big_n = n + rng() % (9 - n);
    const Matrix a = gaussian_matrix(rng, n, big_n);
    const Vector y = gaussian_vector(rng, n);
    const auto lp = l1_min(a, y);
    const auto ref = oracle::l1_support_enumeration(a, y);
    if (lp.status != LpStatus::optimal || !ref) {
      ++mismatched;
      continue;
    }
    worst = std::max(worst, std::abs(lp.value - *ref));
  }
  o.require(mismatched == 0, std::to_string(mismatched) + " status mismatches");
  o.require(worst <= 1e-6, "max |l1_min - oracle| = " + fmt(worst));
  o.details << "max error " << fmt(worst);
}

void check_k_norms(Outcome& o) {
  std::mt19937_64 rng(kSeed);
  std::size_t exact_misses = 0, oracle_misses = 0, sandwich_misses = 0;
  for (int t = 0; t < 10000; ++t) {
    const std::size_t big_n = 1 + rng() % 64, k = 1 + rng() % big_n;
    const Vector a = gaussian_vector(rng, big_n);
    exact_misses += k_norm(a, big_n) != norm2(a);
    Vector s(a);
    for (auto& x : s) x = x * x;
    std::sort(s.begin(), s.end(), std::greater<>());
    double ref = 0.0;
    for (std::size_t i = 0; i < k; ++i) ref += s[i];
    ref = std::sqrt(ref);
    const double kn = k_norm(a, k), l2 = norm2(a);
    oracle_misses += std::abs(kn - ref) > 1e-12 * std::max(1.0, ref);
    sandwich_misses += kn > l2 * (1 + 1e-15) || l2 > std::sqrt(double(big_n) / double(k)) * kn * (1 + 1e-12);
  }
  o.require(exact_misses == 0, std::to_string(exact_misses) + " inexact full k-norms");
  o.require(oracle_misses == 0, std::to_string(oracle_misses) + " k-norm oracle mismatches");
  o.require(sandwich_misses == 0, std::to_string(sandwich_misses) + " sandwich violations");
  o.details << "10000 pairs checked";
}

void check_covering(Outcome& o) {
  std::mt19937_64 rng(kSeed);
  std::size_t configs = 0, skipped = 0;
  for (std::size_t m = 1; m <= 6; ++m) {
    for (double eps : {0.2, 0.35, 0.5, 0.75, 1.0}) {
      const double log_bound = eps <= 1.0 / std::sqrt(double(m))
                                   ? double(m) * std::log(7.0 / (eps * std::sqrt(double(m))))
                                   : std::log(17.0 * eps * eps * double(m)) / (eps * eps);
      std::vector<Vector> net;
      try {
        net = cover_ball_inf(m, eps);
      } catch (const SizeError&) {
        ++skipped;
        continue;
      }
      ++configs;
      o.require(std::log(double(net.size())) <= log_bound + 1e-12,
                "m=" + std::to_string(m) + " eps=" + fmt(eps) + " size " + std::to_string(net.size()));
      std::size_t uncovered = 0;
      for (int s = 0; s < 10000; ++s) {
        Vector x = gaussian_vector(rng, m);
        const double r = std::pow(std::uniform_real_distribution<double>()(rng), 1.0 / double(m)) / norm2(x);
        for (auto& v : x) v *= r;
        bool hit = false;
        for (const auto& y : net) {
          double d = 0.0;
          for (std::size_t i = 0; i < m && d <= eps; ++i) d = std::max(d, std::abs(x[i] - y[i]));
          if (d <= eps + 1e-12) {
            hit = true;
            break;
          }
        }
        uncovered += !hit;
      }
      o.require(uncovered == 0, "m=" + std::to_string(m) + " eps=" + fmt(eps) + ": " + std::to_string(uncovered) +
                                    " uncovered");
    }
  }
  o.require(configs > 0, "no feasible configuration");
  o.details << configs << " (m, eps) configurations, " << skipped << " beyond the size guard";
}

void check_q_enumeration(Outcome& o) {
  std::size_t cases = 0;
  for (std::size_t n = 1; n <= 3; ++n)
    for (std::size_t big_n = n; big_n <= 8; ++big_n)
      for (double delta : {0.25, 0.5, 1.0}) {
        ++cases;
        const auto q = enumerate_Q(delta, n, big_n);
        const double u = 32.0 * delta * double(big_n) / double(n);
        const double f1 = double(n) * std::log(u);
        const double f2 = 4.0 * delta * double(big_n) * std::log(std::exp(1.0) * double(n) / (delta * double(big_n)));
        const auto f = cardinality_F(delta, n, big_n);
        o.require(std::log(double(q.size())) <= f.log_value + 1e-12,
                  "|Q| > F at n=" + std::to_string(n) + " N=" + std::to_string(big_n) + " delta=" + fmt(delta));
        o.require(std::abs(f.log_value - (f.branch == 1 ? f1 : f2)) <= 1e-9, "F does not match its formula");
        if (n == 1) {
          std::size_t hand = 1;
          for (int k = 0; std::ldexp(std::log(2.0), k) <= delta * double(big_n); ++k) ++hand;
          o.require(q.size() == hand, "n=1 count " + std::to_string(q.size()) + " != " + std::to_string(hand));
        }
      }
  o.details << cases << " (n, N, delta) cases";
}

void check_d_gamma(Outcome& o) {
  const std::size_t n = 10, big_n = 100, trials = 500;
  for (const char* dist : {"gaussian", "rademacher", "uniform", "sym_pareto:3"}) {
    const Ensemble e = parse_ensemble(dist);
    for (double delta : {0.1, 0.5}) {
      std::size_t row_violations = 0, in_q = 0;
      for (std::size_t t = 0; t < trials; ++t) {
        const Matrix g = sample_matrix(e, big_n, n, trial_seed(kSeed, t));
        const auto d = compute_D_gamma(g, delta);
        const Vector w = d.entries();
        for (std::size_t i = 0; i < big_n; ++i) {
          double r = 0.0;
          for (std::size_t j = 0; j < n; ++j) r += std::pow(g(i, j) * w[j], 2);
          row_violations += std::sqrt(r) > std::sqrt(double(n) / delta) * (1 + 1e-12);
        }
        double log_det = 0.0;
        for (auto code : d.codes)
          if (code > 0) log_det -= std::log(2.0) * std::ldexp(1.0, code - 1);
        in_q += log_det >= -delta * double(big_n) - 1e-12;
      }
      const double freq = double(in_q) / double(trials);
      const double floor = 1.0 - std::exp(-delta * double(big_n)) - 0.05;
      o.require(row_violations == 0, std::string(dist) + " row-norm violations");
      o.require(freq >= floor, std::string(dist) + " det frequency " + fmt(freq) + " at delta " + fmt(delta));
      o.details << dist << "/" << delta << ": " << fmt(freq) << " ";
    }
  }
}

void check_net_validation(Outcome& o) {
  const NetParams p{0.1, 1.0 / std::sqrt(6.0), 60, 6, 60};
  const Matrix g = sample_matrix(make_ensemble(EnsembleKind::gaussian), 60, 6, kSeed);
  const auto b = build_net(TSpec::sphere(6), p, NetMode::realized, &g);
  const double k = 60.0, n = 6.0, big_n = 60.0;
  const double radius = 10.0 * p.eps * std::sqrt(k * n / p.delta * std::log(std::exp(1.0) * big_n / k));
  const auto ok = validate_net(g, b, 60, radius, 1000, kSeed);
  const auto tight = validate_net(g, b, 60, radius / 100.0, 1000, kSeed);
  o.require(ok.pass_fraction == 1.0, "pass fraction " + fmt(ok.pass_fraction) + " at full radius");
  o.require(tight.pass_fraction < 1.0, "radius/100 still passes");
  o.details << "net size " << b.points.size() << ", max residual " << fmt(ok.max_residual) << " vs radius "
            << fmt(radius) << ", pass fraction at radius/100 " << fmt(tight.pass_fraction);
}

void check_smallest_singular_value(Outcome& o) {
  const auto g = run_sval(config("gaussian", 100, 400, 200));
  const double edge = (std::sqrt(400.0) - std::sqrt(100.0)) / std::sqrt(400.0);
  const double mean = g.aggregates.at("s_n_over_sqrt_N").mean;
  o.require(std::abs(mean - edge) <= 0.05, "gaussian mean " + fmt(mean));
  o.details << "gaussian mean " << fmt(mean) << " (edge " << fmt(edge) << ")";
  for (const char* dist : {"rademacher", "sym_pareto:3"}) {
    const auto r = run_sval(config(dist, 50, 1000, 200));
    const double thr = threshold_oracle(r.config.ensemble.u(), r.config.ensemble.v(), 1.0);
    std::size_t below = 0;
    for (double s : r.column("s_n_over_sqrt_N")) below += !(s > thr);
    o.require(std::abs(r.threshold - thr) <= 1e-12, std::string(dist) + " threshold mismatch");
    o.require(below == 0, std::string(dist) + ": " + std::to_string(below) + " trials below threshold");
    if (std::string(dist) == "sym_pareto:3") g_pareto_sval_pass = below == 0 ? 1.0 : 0.0;
    o.details << "; " << dist << " min " << fmt(r.aggregates.at("s_n_over_sqrt_N").min) << " vs threshold "
              << fmt(thr);
  }
}

void check_inclusion_quotient(Outcome& o) {
  auto cfg = config("gaussian", 20, 400, 100);
  cfg.samples_per_trial = 200;
  const auto inc = run_inclusion(cfg);
  const double dual_freq = 1.0 - inc.pass_frequency;
  o.require(dual_freq <= 0.05, "dual event frequency " + fmt(dual_freq));
  o.details << "dual event frequency " << fmt(dual_freq) << "; quotient q95 of max ratio:";
  std::vector<double> q95;
  for (std::uint64_t seed : {kSeed, kSeed + 1}) {
    auto qc = cfg;
    qc.seed = seed;
    const auto q = run_quotient(qc);
    std::size_t infinite = 0;
    for (double r : q.column("max_ratio")) infinite += !std::isfinite(r);
    o.require(infinite == 0, std::to_string(infinite) + " trials with an infinite max ratio");
    q95.push_back(q.aggregates.at("max_ratio").q95);
    o.details << " seed " << seed << " " << fmt(q95.back());
  }
  const double rel = std::abs(q95[1] - q95[0]) / q95[0];
  o.require(rel <= 0.10, "q95 moved by " + fmt(rel));
}

std::vector<Polytope> planar_instances(std::uint64_t seed, std::size_t count) {
  std::mt19937_64 rng(seed);
  std::vector<Polytope> out;
  for (std::size_t i = 0; i < count; ++i) out.emplace_back(gaussian_matrix(rng, 3 + rng() % 12, 2));
  return out;
}

// Shoelace area of the hull of ±rows, by monotone chain.
double shoelace(const Polytope& p) {
  std::vector<std::pair<double, double>> pts;
  const Matrix& g = p.generator();
  for (std::size_t i = 0; i < g.rows(); ++i) {
    pts.emplace_back(g(i, 0), g(i, 1));
    pts.emplace_back(-g(i, 0), -g(i, 1));
  }
  std::sort(pts.begin(), pts.end());
  auto cross = [](auto o, auto a, auto b) {
    return (a.first - o.first) * (b.second - o.second) - (a.second - o.second) * (b.first - o.first);
  };
  std::vector<std::pair<double, double>> hull(2 * pts.size());
  std::size_t k = 0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    while (k >= 2 && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0) --k;
    hull[k++] = pts[i];
  }
  for (std::size_t i = pts.size() - 1, t = k + 1; i-- > 0;) {
    while (k >= t && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0) --k;
    hull[k++] = pts[i];
  }
  hull.resize(k - 1);
  double a = 0.0;
  for (std::size_t i = 0; i < hull.size(); ++i) {
    const auto& p1 = hull[i];
    const auto& p2 = hull[(i + 1) % hull.size()];
    a += p1.first * p2.second - p2.first * p1.second;
  }
  return std::abs(a) / 2.0;
}

void check_volume(Outcome& o) {
  std::size_t outside = 0, t = 0;
  for (const auto& p : planar_instances(kSeed, 20)) {
    const auto e = volume_mc(p, 20000, trial_seed(kSeed, t++));
    outside += std::abs(e.volume - shoelace(p)) > 3.0 * e.volume_std_error;
  }
  o.require(outside == 0, std::to_string(outside) + " planar instances outside 3 sigma");
  o.details << "planar 20/20 within 3 sigma: " << (outside == 0 ? "yes" : "no") << "; C2_hat(N=50,200,800) =";
  for (std::size_t big_n : {50, 200, 800}) {
    auto cfg = config("rademacher", 5, big_n, 10);
    cfg.samples_per_trial = 20000;
    const auto r = run_volume(cfg);
    const auto& c2 = r.extras.at("C2_hat");
    const double v = c2.is_number() ? c2.get<double>() : 0.0;
    o.require(v > 0.0, "C2_hat not positive at N=" + std::to_string(big_n));
    o.details << " " << fmt(v);
  }
}

void check_mean_width(Outcome& o) {
  std::size_t t = 0, broken = 0;
  for (const auto& p : planar_instances(kSeed + 7, 20)) {
    const auto ms = mean_width_polar(p, 4000, trial_seed(kSeed, 2 * t));
    const auto m = mean_width_M(p, 4000, trial_seed(kSeed, 2 * t + 1));
    ++t;
    const double vr = std::sqrt(shoelace(p) / kPi);
    broken += ms.point_estimate + 3.0 * ms.std_error < vr;
    broken += vr + 3.0 * m.std_error / (m.point_estimate * m.point_estimate) < 1.0 / m.point_estimate;
  }
  o.require(broken == 0, std::to_string(broken) + " chain violations beyond 3 sigma");
  const double exact = 2.0 * std::sqrt(2.0 / kPi) / std::sqrt(kPi / 2.0);
  const double cross = mean_width_M(Polytope(Matrix::identity(2)), 20000, kSeed).point_estimate;
  o.require(std::abs(cross - exact) <= 0.02 * exact, "M(cross) " + fmt(cross));
  o.details << "20 planar instances; M(cross-polytope) " << fmt(cross) << " vs " << fmt(exact);
}

void check_santalo(Outcome& o) {
  std::size_t t = 0, broken = 0;
  double worst = 0.0;
  for (const auto& p : planar_instances(kSeed + 11, 20)) {
    const auto s = santalo_check(p, 20000, trial_seed(kSeed, t++));
    broken += s.ratio > 1.0 + 3.0 * s.ratio_se;
    worst = std::max(worst, s.ratio);
  }
  o.require(broken == 0, std::to_string(broken) + " ratios above 1 + 3 sigma");
  const auto disc = santalo_check(Polytope(circle_rows(400)), 40000, kSeed);
  o.require(std::abs(disc.ratio - 1.0) <= 0.02, "dense circle ratio " + fmt(disc.ratio));
  o.details << "largest planar ratio " << fmt(worst) << ", dense circle " << fmt(disc.ratio);
}

void check_heavy_tail(Outcome& o) {
  const auto r = run_opnorm(config("sym_pareto:3", 100, 1000, 100));
  const double heavy = r.aggregates.at("op_over_sqrt_N").q95;
  const double light = r.aggregates.at("gaussian_op_over_sqrt_N").q95;
  const double ratio = heavy / light;
  o.require(ratio >= 2.0, "q95 ratio " + fmt(ratio) + " below 2");
  if (g_pareto_sval_pass < 0.0) {
    const auto s = run_sval(config("sym_pareto:3", 50, 1000, 200));
    g_pareto_sval_pass = s.pass_frequency;
  }
  o.require(g_pareto_sval_pass == 1.0, "sym_pareto singular-value threshold fails");
  o.details << "q95 " << fmt(heavy) << " vs gaussian " << fmt(light) << ", ratio " << fmt(ratio);
}

void check_determinism(Outcome& o) {
  const auto schema = nlohmann::json::parse(report_schema_text());
  const fs::path base = fs::temp_directory_path() / "polylab-acceptance";
  fs::remove_all(base);
  const fs::path a = base / "a", b = base / "b";
  std::size_t checked = 0;
  for (const auto& verb : cli_verbs()) {
    if (verb == "report") continue;
    for (const auto& dir : {a, b}) {
      std::ostringstream out, err;
      const int code = run_cli({verb, "--n", "4", "--N", "40", "--trials", "4", "--samples", "40", "--seed",
                                std::to_string(kSeed), "--out", dir.string()},
                               out, err);
      o.require(code == kExitOk, verb + " exited with " + std::to_string(code) + ": " + err.str());
    }
  }
  for (const auto& dir : {a, b}) {
    std::ostringstream out, err;
    const int code = run_cli({"report", "--input", (dir / ("sval-" + std::to_string(kSeed) + ".json")).string(),
                              "--out", dir.string()},
                             out, err);
    o.require(code == kExitOk, "report exited with " + std::to_string(code));
  }
  for (const auto& verb : cli_verbs()) {
    const std::string file = verb + "-" + std::to_string(kSeed) + ".json";
    if (!fs::exists(a / file) || !fs::exists(b / file)) {
      o.require(false, file + " missing");
      continue;
    }
    auto ja = load_json(a / file), jb = load_json(b / file);
    o.require(validate_schema(ja, schema).empty(), file + " violates the report schema");
    ja.erase("wall_time_seconds");
    jb.erase("wall_time_seconds");
    o.require(ja.dump() == jb.dump(), file + " differs between runs");
    ++checked;
  }
  fs::remove_all(base);
  o.details << checked << " verbs compared";
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {1, "norm oracle equivalence", 60, check_norm_oracles},
      {2, "LP oracle equivalence", 60, check_lp_oracle},
      {3, "k-norm identities", 30, check_k_norms},
      {4, "covering validity", 120, check_covering},
      {5, "Q enumeration", 60, check_q_enumeration},
      {6, "D_Gamma surrogate", 120, check_d_gamma},
      {7, "net validation", 120, check_net_validation},
      {8, "smallest singular value", 300, check_smallest_singular_value},
      {9, "inclusion and quotient", 600, check_inclusion_quotient},
      {10, "volume", 600, check_volume},
      {11, "mean width chain", 300, check_mean_width},
      {12, "Santalo", 300, check_santalo},
      {13, "heavy-tail operator norm", 300, check_heavy_tail},
      {14, "end-to-end determinism", 600, check_determinism},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    Outcome o;
    const auto start = std::chrono::steady_clock::now();
    try {
      c.body(o);
    } catch (const std::exception& ex) {
      o.require(false, std::string("exception: ") + ex.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    o.require(secs <= c.time_limit, "runtime over " + fmt(c.time_limit) + " s");
    failures += !o.pass;
    std::string text = o.details.str();
    if (!o.pass) text += (text.empty() ? "" : " | ") + std::string("violated: ") + o.violations;
    std::printf("[%s] %02d %s (%.1f s): %s\n", o.pass ? "PASS" : "FAIL", c.id, c.name.c_str(), secs, text.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", int(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
