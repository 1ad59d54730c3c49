#include "polylab/ensembles.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace polylab {

namespace {

constexpr double kDeclaredU = 0.5;

double round_up_2(double v) { return std::ceil(v * 100.0 - 1e-9) / 100.0; }

EntryKind entry_kind(EnsembleKind k) {
  switch (k) {
    case EnsembleKind::rademacher: return EntryKind::rademacher;
    case EnsembleKind::gaussian: return EntryKind::gaussian;
    case EnsembleKind::uniform: return EntryKind::uniform;
    case EnsembleKind::sym_pareto: return EntryKind::sym_pareto;
    case EnsembleKind::sym_two_point: return EntryKind::sym_two_point;
    case EnsembleKind::per_row_mixture: break;
  }
  throw std::domain_error("entry_kind: mixture has no single entry law");
}

EnsembleKind ensemble_kind_from_name(const std::string& name) {
  if (name == "rademacher") return EnsembleKind::rademacher;
  if (name == "gaussian") return EnsembleKind::gaussian;
  if (name == "uniform") return EnsembleKind::uniform;
  if (name == "sym_pareto" || name == "pareto") return EnsembleKind::sym_pareto;
  if (name == "sym_two_point" || name == "two_point") return EnsembleKind::sym_two_point;
  if (name == "per_row_mixture" || name == "mixture") return EnsembleKind::per_row_mixture;
  throw std::domain_error("unknown ensemble kind '" + name + "'");
}

void validate_law(const EntryLaw& law) {
  if (law.kind == EntryKind::sym_pareto && !(law.param > 2.0)) {
    throw std::domain_error("sym_pareto: tail index must exceed 2 for finite variance");
  }
  if (law.kind == EntryKind::sym_two_point && !(law.param > 0.0 && law.param <= 1.0)) {
    throw std::domain_error("sym_two_point: p must lie in (0, 1]");
  }
}

EntryLaw law_for(EntryKind kind, const EnsembleParams& params) {
  EntryLaw law{kind, 0.0};
  if (kind == EntryKind::sym_pareto) law.param = params.alpha;
  if (kind == EntryKind::sym_two_point) law.param = params.p;
  validate_law(law);
  return law;
}

}  // namespace

double EntryLaw::normalization() const {
  switch (kind) {
    case EntryKind::rademacher:
    case EntryKind::gaussian: return 1.0;
    case EntryKind::uniform: return std::sqrt(3.0);  // raw draw is U(−1, 1)
    case EntryKind::sym_pareto:
      // Raw |ξ| has density α t^{−α−1} on [1, ∞), so E ξ² = α/(α−2).
      return std::sqrt((param - 2.0) / param);
    case EntryKind::sym_two_point: return 1.0 / std::sqrt(param);
  }
  return 1.0;
}

double EntryLaw::draw(CounterRng& rng) const {
  switch (kind) {
    case EntryKind::rademacher: return rng.sign();
    case EntryKind::gaussian: return rng.normal();
    case EntryKind::uniform: return normalization() * rng.uniform(-1.0, 1.0);
    case EntryKind::sym_pareto: {
      const double s = rng.sign();
      return s * normalization() * std::pow(rng.uniform(), -1.0 / param);
    }
    case EntryKind::sym_two_point: {
      const double u = rng.uniform();
      if (u >= param) return 0.0;
      return (u < 0.5 * param ? 1.0 : -1.0) * normalization();
    }
  }
  return 0.0;
}

double EntryLaw::concentration(double t) const {
  if (!(t > 0.0)) throw std::domain_error("concentration: t must be positive");
  switch (kind) {
    case EntryKind::rademacher: return t < 1.0 ? 0.5 : 1.0;
    case EntryKind::gaussian: return std::erf(t / std::sqrt(2.0));
    case EntryKind::uniform: return std::min(1.0, t / std::sqrt(3.0));
    case EntryKind::sym_pareto: {
      const double s = normalization();
      const double one_sided = 0.5 * (1.0 - std::pow(1.0 + 2.0 * t / s, -param));
      const double centered = t > s ? 1.0 - std::pow(t / s, -param) : 0.0;
      return std::max(one_sided, centered);
    }
    case EntryKind::sym_two_point: {
      const double a = normalization();
      if (2.0 * t >= 2.0 * a) return 1.0;
      if (2.0 * t >= a) return 1.0 - 0.5 * param;
      return std::max(1.0 - param, 0.5 * param);
    }
  }
  return 1.0;
}

std::string EntryLaw::name() const {
  std::ostringstream os;
  switch (kind) {
    case EntryKind::rademacher: return "rademacher";
    case EntryKind::gaussian: return "gaussian";
    case EntryKind::uniform: return "uniform";
    case EntryKind::sym_pareto: os << "sym_pareto(" << param << ")"; break;
    case EntryKind::sym_two_point: os << "sym_two_point(" << param << ")"; break;
  }
  return os.str();
}

std::string Ensemble::name() const {
  if (kind_ != EnsembleKind::per_row_mixture) return components_.front().name();
  std::string s = "per_row_mixture(";
  for (std::size_t i = 0; i < components_.size(); ++i) s += (i ? "," : "") + components_[i].name();
  return s + ")";
}

const EntryLaw& Ensemble::row_law(std::uint64_t seed, std::size_t row) const {
  if (components_.size() == 1) return components_.front();
  const std::uint64_t h = derive_seed(derive_seed(seed, 0x6d69787475726500ull), row);
  return components_[h % components_.size()];
}

nlohmann::json Ensemble::to_json() const {
  auto law_json = [](const EntryLaw& law) {
    nlohmann::json j;
    switch (law.kind) {
      case EntryKind::rademacher: j["kind"] = "rademacher"; break;
      case EntryKind::gaussian: j["kind"] = "gaussian"; break;
      case EntryKind::uniform: j["kind"] = "uniform"; break;
      case EntryKind::sym_pareto: j["kind"] = "sym_pareto"; j["alpha"] = law.param; break;
      case EntryKind::sym_two_point: j["kind"] = "sym_two_point"; j["p"] = law.param; break;
    }
    return j;
  };
  nlohmann::json j;
  if (kind_ == EnsembleKind::per_row_mixture) {
    j["kind"] = "per_row_mixture";
    j["components"] = nlohmann::json::array();
    for (const auto& c : components_) j["components"].push_back(law_json(c));
  } else {
    j = law_json(components_.front());
  }
  j["u"] = u_;
  j["v"] = v_;
  return j;
}

Ensemble make_ensemble(EnsembleKind kind, const EnsembleParams& params) {
  Ensemble e;
  e.kind_ = kind;
  if (kind == EnsembleKind::per_row_mixture) {
    if (params.components.empty()) throw std::domain_error("per_row_mixture: no components");
    for (const auto& law : params.components) validate_law(law);
    e.components_ = params.components;
  } else {
    e.components_ = {law_for(entry_kind(kind), params)};
  }
  e.u_ = kDeclaredU;
  double v = 0.0;
  for (const auto& law : e.components_) v = std::max(v, round_up_2(law.concentration(kDeclaredU)));
  e.v_ = v;
  return e;
}

Ensemble ensemble_from_json(const nlohmann::json& j) {
  if (j.is_string()) return parse_ensemble(j.get<std::string>());
  if (!j.is_object() || !j.contains("kind")) throw std::domain_error("ensemble spec needs a \"kind\"");
  const EnsembleKind kind = ensemble_kind_from_name(j.at("kind").get<std::string>());
  EnsembleParams params;
  if (j.contains("alpha")) params.alpha = j.at("alpha").get<double>();
  if (j.contains("p")) params.p = j.at("p").get<double>();
  if (kind == EnsembleKind::per_row_mixture) {
    if (!j.contains("components") || !j.at("components").is_array()) {
      throw std::domain_error("per_row_mixture needs a \"components\" array");
    }
    for (const auto& cj : j.at("components")) {
      const Ensemble c = ensemble_from_json(cj);
      if (c.kind() == EnsembleKind::per_row_mixture) throw std::domain_error("nested mixtures are not supported");
      params.components.push_back(c.components().front());
    }
  }
  return make_ensemble(kind, params);
}

Ensemble parse_ensemble(const std::string& spec) {
  const std::string trimmed = spec.substr(0, spec.find_last_not_of(" \t") + 1);
  if (!trimmed.empty() && trimmed.front() == '{') {
    try {
      return ensemble_from_json(nlohmann::json::parse(trimmed));
    } catch (const nlohmann::json::exception& ex) {
      throw std::domain_error(std::string("ensemble spec: ") + ex.what());
    }
  }
  const auto colon = trimmed.find(':');
  const std::string name = trimmed.substr(0, colon);
  const std::string arg = colon == std::string::npos ? "" : trimmed.substr(colon + 1);
  const EnsembleKind kind = ensemble_kind_from_name(name);
  EnsembleParams params;
  auto number = [&](const std::string& s) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(s, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != s.size() || s.empty()) throw std::domain_error("ensemble spec: bad parameter '" + s + "'");
    return v;
  };
  if (!arg.empty()) {
    switch (kind) {
      case EnsembleKind::sym_pareto: params.alpha = number(arg); break;
      case EnsembleKind::sym_two_point: params.p = number(arg); break;
      case EnsembleKind::per_row_mixture: {
        std::size_t start = 0;
        while (start <= arg.size()) {
          const auto comma = arg.find(',', start);
          const Ensemble c = parse_ensemble(arg.substr(start, comma - start));
          if (c.kind() == EnsembleKind::per_row_mixture) throw std::domain_error("nested mixtures are not supported");
          params.components.push_back(c.components().front());
          if (comma == std::string::npos) break;
          start = comma + 1;
        }
        break;
      }
      default: throw std::domain_error("ensemble '" + name + "' takes no parameter");
    }
  }
  return make_ensemble(kind, params);
}

Matrix sample_matrix(const Ensemble& e, std::size_t big_n, std::size_t n, std::uint64_t seed) {
  if (n == 0) throw std::domain_error("sample_matrix: n must be positive");
  if (big_n < n) throw std::domain_error("sample_matrix: N must be at least n");
  std::vector<double> entries(big_n * n);
  for (std::size_t i = 0; i < big_n; ++i) {
    const EntryLaw& law = e.row_law(seed, i);
    for (std::size_t j = 0; j < n; ++j) {
      CounterRng rng(derive_seed(seed, i, j));
      entries[i * n + j] = law.draw(rng);
    }
  }
  return Matrix(big_n, n, std::move(entries));
}

double concentration_fn(std::span<const double> samples, double t) {
  if (!(t > 0.0)) throw std::domain_error("concentration_fn: t must be positive");
  if (samples.size() < 2) throw std::domain_error("concentration_fn: need at least two samples");
  std::vector<double> x(samples.begin(), samples.end());
  std::sort(x.begin(), x.end());
  std::size_t best = 0, hi = 0;
  for (std::size_t lo = 0; lo < x.size(); ++lo) {
    hi = std::max(hi, lo);
    while (hi < x.size() && x[hi] <= x[lo] + 2.0 * t) ++hi;
    best = std::max(best, hi - lo);
  }
  return static_cast<double>(best) / static_cast<double>(x.size());
}

SmallBallConstants small_ball_constants(double u, double v, double c) {
  if (!(u > 0.0 && u < 1.0)) throw std::domain_error("small_ball_constants: u must lie in (0, 1)");
  if (!(v > 0.0 && v < 1.0)) throw std::domain_error("small_ball_constants: v must lie in (0, 1)");
  if (!(c > 0.0 && c <= 1.0)) throw std::domain_error("small_ball_constants: c must lie in (0, 1]");
  SmallBallConstants k;
  k.u = u;
  k.v = v;
  k.c = c;
  k.c_uv = c * u * v * std::sqrt(1.0 - v);
  k.C_v = 5.0 * std::log(2.0 / (1.0 - v));
  if (v >= 0.5) {
    k.gamma1 = std::sqrt(std::log(2.0));
    k.gamma2 = std::log(2.0 / (1.0 + v));
  } else {
    k.gamma1 = std::sqrt(std::log(1.0 / v));
    k.gamma2 = std::log(1.0 / (2.0 * v - v * v));
  }
  return k;
}

const char* to_string(EnsembleKind k) {
  switch (k) {
    case EnsembleKind::rademacher: return "rademacher";
    case EnsembleKind::gaussian: return "gaussian";
    case EnsembleKind::uniform: return "uniform";
    case EnsembleKind::sym_pareto: return "sym_pareto";
    case EnsembleKind::sym_two_point: return "sym_two_point";
    case EnsembleKind::per_row_mixture: return "per_row_mixture";
  }
  return "unknown";
}

}  // namespace polylab
