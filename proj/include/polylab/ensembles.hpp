#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "polylab/matrix.hpp"
#include "polylab/rng.hpp"

namespace polylab {

/// Symmetric, unit-variance entry distributions.
enum class EntryKind { rademacher, gaussian, uniform, sym_pareto, sym_two_point };

/// One entry law. `param` is the tail index α for sym_pareto and the mass p of
/// the non-zero atoms for sym_two_point (ξ = 0 w.p. 1−p, ±1/√p w.p. p/2 each).
struct EntryLaw {
  EntryKind kind = EntryKind::gaussian;
  double param = 0.0;

  /// Multiplier applied to the raw draw so that E ξ² = 1 exactly.
  double normalization() const;
  double draw(CounterRng& rng) const;
  /// Exact Lévy concentration sup_λ P(|ξ − λ| ≤ t).
  double concentration(double t) const;
  std::string name() const;

  friend bool operator==(const EntryLaw&, const EntryLaw&) = default;
};

enum class EnsembleKind { rademacher, gaussian, uniform, sym_pareto, sym_two_point, per_row_mixture };

struct EnsembleParams {
  double alpha = 3.0;              // sym_pareto tail index
  double p = 0.5;                  // sym_two_point atom mass
  std::vector<EntryLaw> components;  // per_row_mixture
};

/// Entry distribution of a random matrix satisfying (independent, symmetric,
/// unit variance, identically distributed within each row) together with the
/// declared small-ball pair: Q(ξ, u) ≤ v.
class Ensemble {
 public:
  EnsembleKind kind() const { return kind_; }
  const std::vector<EntryLaw>& components() const { return components_; }
  double u() const { return u_; }
  double v() const { return v_; }
  /// Unit-variance multiplier of the first (for mixtures: every) component.
  double normalization() const { return components_.front().normalization(); }
  std::string name() const;

  /// Law used for row i of a matrix sampled with `seed`.
  const EntryLaw& row_law(std::uint64_t seed, std::size_t row) const;

  nlohmann::json to_json() const;

  friend bool operator==(const Ensemble&, const Ensemble&) = default;

 private:
  friend Ensemble make_ensemble(EnsembleKind, const EnsembleParams&);
  EnsembleKind kind_ = EnsembleKind::gaussian;
  std::vector<EntryLaw> components_;
  double u_ = 0.5;
  double v_ = 0.0;
};

/// Declared u is 0.5 for every built-in; v is the exact concentration at 0.5
/// rounded up to two decimals (largest component v for mixtures).
/// Throws std::domain_error for α ≤ 2, p ∉ (0,1], or an empty mixture.
Ensemble make_ensemble(EnsembleKind kind, const EnsembleParams& params = {});

/// Parses `{"kind":"sym_pareto","alpha":3.0}`-style snippets, or the short
/// form "sym_pareto:3", "sym_two_point:0.25", "per_row_mixture:gaussian,rademacher".
Ensemble ensemble_from_json(const nlohmann::json& j);
Ensemble parse_ensemble(const std::string& spec);

/// N×n matrix, entry (i, j) drawn from its own counter stream keyed by
/// (seed, i, j): reproducible bit-for-bit and independent of fill order.
/// Throws std::domain_error if N < n or n = 0.
Matrix sample_matrix(const Ensemble& e, std::size_t big_n, std::size_t n, std::uint64_t seed);

/// Exact maximum over windows [x, x + 2t] of the empirical measure.
double concentration_fn(std::span<const double> samples, double t);

/// Derived constants of the small-ball machinery.
struct SmallBallConstants {
  double u = 0.0;
  double v = 0.0;
  double c = 1.0;     // absolute constant in c_uv, configurable
  double c_uv = 0.0;  // c·u·v·√(1−v)
  double C_v = 0.0;   // 5·ln(2/(1−v))
  double gamma1 = 0.0;
  double gamma2 = 0.0;
};

SmallBallConstants small_ball_constants(double u, double v, double c = 1.0);

const char* to_string(EnsembleKind k);

}  // namespace polylab
