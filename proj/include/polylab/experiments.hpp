#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "polylab/ensembles.hpp"

namespace polylab {

/// Inputs shared by every experiment driver.
///
/// `thresholds` holds named reals of two sorts. Check keys are read by
/// check_thresholds: "min_pass_frequency", "max_pass_frequency", and
/// "<column>.<stat>.min" / "<column>.<stat>.max" with stat one of
/// min, max, mean, q05, q50, q95. Every other key is a driver parameter
/// (for instance "k_target" for the quotient driver); see each driver.
struct ExperimentConfig {
  Ensemble ensemble = make_ensemble(EnsembleKind::gaussian);
  std::size_t n = 10;
  std::size_t big_n = 100;
  std::size_t trials = 200;
  std::uint64_t seed = 0;
  double beta = 0.5;
  double c = 1.0;
  double lambda = 3.0;
  double mu = 3.0;
  std::size_t samples_per_trial = 200;
  std::map<std::string, double> thresholds;
  /// Worker cap; 0 means one per hardware thread. Not part of the echo, since
  /// results do not depend on it.
  std::size_t workers = 1;

  /// Throws std::domain_error when an invariant fails.
  void validate() const;
  double param(const std::string& key, double fallback) const;

  nlohmann::json to_json() const;
  /// Missing keys keep their defaults; unknown keys and invalid values throw
  /// std::domain_error.
  static ExperimentConfig from_json(const nlohmann::json& j);
};

struct Aggregate {
  double min = 0.0, max = 0.0, mean = 0.0;
  double q05 = 0.0, q50 = 0.0, q95 = 0.0;
  std::size_t count = 0;  // finite entries the statistics are taken over
};

/// Statistics over the finite entries of `values` (all zero when there are none).
/// Quantiles interpolate linearly between order statistics.
Aggregate aggregate(const std::vector<double>& values);

struct TrialReport {
  std::string experiment;
  ExperimentConfig config;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;  // rows[trial][column]; NaN marks "not applicable"
  std::string primary;                    // column summarized as the estimate
  std::map<std::string, Aggregate> aggregates;
  std::vector<bool> passed;               // per trial
  double pass_frequency = 0.0;
  double threshold = 0.0;
  std::string threshold_formula;
  nlohmann::json extras = nlohmann::json::object();
  double wall_time_seconds = 0.0;

  std::vector<double> column(const std::string& name) const;
  /// Recomputes `aggregates` and `pass_frequency` from `rows` and `passed`.
  void finalize();

  /// Non-finite numbers are written as null. Field "wall_time_seconds" is the
  /// only one that varies between identical runs.
  nlohmann::json to_json() const;
  static TrialReport from_json(const nlohmann::json& j);

  /// Per-trial table: header line with the column names plus "pass", one line
  /// per trial, non-finite values written as "nan".
  std::string to_csv() const;
};

/// Names of violated check thresholds (empty when all hold).
std::vector<std::string> check_thresholds(const TrialReport& report);

/// Runs body(i) for i in [0, count) on up to `workers` threads. The first
/// exception by index is rethrown after all workers finish.
void parallel_for(std::size_t count, std::size_t workers, const std::function<void(std::size_t)>& body);

/// Per-trial seed.
std::uint64_t trial_seed(std::uint64_t seed, std::size_t trial);

/// s_n(Γ)/√N against c_uv√γ₂/(4γ₁), plus the individual bound c_uv√γ₂/(2γ₁)
/// on 100 fixed unit vectors x per trial.
TrialReport run_sval(const ExperimentConfig& cfg);

/// Dual event and empirical largest C for L = c_uv(B∞ ∩ R B₂), together with
/// the Euclidean-ball inclusion s_n/√N ≥ c_uv√γ₂/(4γ₁).
TrialReport run_inclusion(const ExperimentConfig& cfg);

/// quotient_check per trial. Parameter "k_target" (default 3).
TrialReport run_quotient(const ExperimentConfig& cfg);

/// |K_N|^{1/n} against √(ln(N/n)/n). Requires n ≤ 12.
TrialReport run_volume(const ExperimentConfig& cfg);

/// M(K_N) and M(K_N°) against the bracketing expressions, with conditions
/// (max row norm, Hilbert–Schmidt norm, operator norm) per trial.
TrialReport run_meanwidth(const ExperimentConfig& cfg);

/// ‖Γ‖/√N for the configured ensemble and for a Gaussian reference of the
/// same shape. Parameter "heavy_tail_factor" (default 2).
TrialReport run_opnorm(const ExperimentConfig& cfg);

/// Small-ball lemmas on the configured ensemble. Parameters "alpha"
/// (default 1) for the cube-cap event and "sigma" (default 8) for the
/// block size of the sup event.
TrialReport run_smallball_lemmas(const ExperimentConfig& cfg);

/// Driver lookup by experiment name: sval, inclusion, quotient, volume,
/// meanwidth, opnorm, lemmas. Throws std::domain_error for unknown names.
TrialReport run_experiment(const std::string& name, const ExperimentConfig& cfg);

const std::vector<std::string>& experiment_names();

}  // namespace polylab
