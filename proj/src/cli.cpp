#include "polylab/cli.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "polylab/ensembles.hpp"
#include "polylab/errors.hpp"
#include "polylab/linalg.hpp"
#include "polylab/nets.hpp"
#include "polylab/polytope.hpp"
#include "polylab/schema.hpp"

namespace polylab {

namespace fs = std::filesystem;

namespace {

constexpr const char* kFooter =
    "Exit codes:\n"
    "  0  success\n"
    "  1  usage error, invalid config, or unwritable output directory\n"
    "  2  numerical failure (LP iteration cap, degenerate input)\n"
    "  3  --check: a threshold from the config was violated\n"
    "\n"
    "Reports go to <out>/<verb>-<seed>.json; --dump adds <verb>-<seed>.csv,\n"
    "--plot adds <verb>-<seed>-plot.csv. POLYLAB_WORKERS is the fallback for --workers.";

std::string seed_stem(const Command& cmd) { return cmd.verb + "-" + std::to_string(cmd.config.seed); }

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw fs::filesystem_error("cannot write", path, std::make_error_code(std::errc::permission_denied));
  f << text;
  if (!f) throw fs::filesystem_error("cannot write", path, std::make_error_code(std::errc::io_error));
}

void ensure_writable(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) {
    throw fs::filesystem_error("output directory is not usable", dir,
                               ec ? ec : std::make_error_code(std::errc::not_a_directory));
  }
  const fs::path probe = dir / ".polylab-write-probe";
  write_text(probe, "");
  fs::remove(probe, ec);
}

nlohmann::json finite_or_null(double x) { return std::isfinite(x) ? nlohmann::json(x) : nlohmann::json(nullptr); }

nlohmann::json tool_report(const Command& cmd, double pass_frequency, nlohmann::json results, double seconds) {
  return {{"experiment", cmd.verb},
          {"params", cmd.config.to_json()},
          {"seed", cmd.config.seed},
          {"pass_frequency", pass_frequency},
          {"results", std::move(results)},
          {"wall_time_seconds", seconds}};
}

struct Outcome {
  nlohmann::json report;
  double pass_frequency = 0.0;
  std::optional<TrialReport> trial;
  std::optional<PlotSeries> plot;
};

Outcome run_gen(const Command& cmd) {
  const auto& c = cmd.config;
  const Matrix g = sample_matrix(c.ensemble, c.big_n, c.n, c.seed);
  std::string file;
  if (cmd.format == "bin") {
    file = seed_stem(cmd) + ".bin";
    write_binary(g, cmd.out / file);
  } else {
    file = seed_stem(cmd) + ".csv";
    write_csv(g, cmd.out / file);
  }
  const auto cond = check_conditions(g, c.lambda, c.mu);
  Outcome o;
  o.pass_frequency = (double(cond.cond13) + double(cond.cond14) + double(cond.cond15)) / 3.0;
  o.report = {{"matrix_file", file},
              {"format", cmd.format},
              {"rows", g.rows()},
              {"cols", g.cols()},
              {"u", c.ensemble.u()},
              {"v", c.ensemble.v()},
              {"smallest_singular_value", smallest_singular_value(g)},
              {"operator_norm", cond.op_norm},
              {"hs_norm", cond.hs},
              {"max_row_norm", cond.max_row_norm},
              {"cond13", cond.cond13},
              {"cond14", cond.cond14},
              {"cond15", cond.cond15}};
  return o;
}

Outcome run_net(const Command& cmd) {
  const auto& c = cmd.config;
  const double eps = cmd.eps.value_or(1.0 / std::sqrt(double(c.n)));
  NetParams params{cmd.delta, eps, c.big_n, c.n, c.big_n};
  NetMode mode;
  if (cmd.mode == "realized") mode = NetMode::realized;
  else if (cmd.mode == "exhaustive") mode = NetMode::exhaustive;
  else throw std::domain_error("net: --mode must be realized or exhaustive");
  const Matrix g = sample_matrix(c.ensemble, c.big_n, c.n, c.seed);
  const auto bundle = build_net(TSpec::sphere(c.n), params, mode, &g);
  const double k = double(params.k);
  const double radius = cmd.radius_constant * eps *
                        std::sqrt(k * double(c.n) / cmd.delta * std::log(std::exp(1.0) * double(c.big_n) / k));
  const auto val = validate_net(g, bundle, params.k, radius, c.trials, derive_seed(c.seed, 1));
  if (cmd.dump) write_bundle(bundle, cmd.out / seed_stem(cmd));
  Outcome o;
  o.pass_frequency = val.pass_fraction;
  o.report = {{"mode", cmd.mode},
              {"delta", cmd.delta},
              {"eps", eps},
              {"k", params.k},
              {"points", bundle.points.size()},
              {"M", bundle.M},
              {"q_count", bundle.q_count},
              {"log_cardinality_bound", finite_or_null(bundle.log_cardinality_bound)},
              {"realized_neg_log_det", bundle.realized_neg_log_det},
              {"realized_in_Q", bundle.realized_in_Q},
              {"radius_constant", cmd.radius_constant},
              {"radius", radius},
              {"validation_trials", val.trials},
              {"max_residual", val.max_residual},
              {"mean_residual", val.mean_residual},
              {"pass_fraction", val.pass_fraction}};
  return o;
}

Outcome run_conc(const Command& cmd) {
  const auto& c = cmd.config;
  const std::size_t draws = c.samples_per_trial;
  const Matrix xi = sample_matrix(c.ensemble, std::max<std::size_t>(draws, 1), 1, c.seed);
  const Vector col = xi.entries();
  const bool exact_known = c.ensemble.kind() != EnsembleKind::per_row_mixture;
  const EntryLaw& law = c.ensemble.components().front();
  std::vector<double> widths;
  for (int i = 1; i <= 20; ++i) widths.push_back(double(i) / 20.0);
  const double at = cmd.width.value_or(c.ensemble.u());
  if (!(at > 0.0)) throw std::domain_error("conc: --width must be positive");
  widths.push_back(at);
  nlohmann::json emp = nlohmann::json::array(), exact = nlohmann::json::array();
  std::size_t within = 0;
  PlotSeries plot;
  plot.comments = {"experiment: conc", "ensemble: " + c.ensemble.name(), "seed: " + std::to_string(c.seed),
                   "x: window half-width t", "y: empirical sup_l P(|xi - l| <= t) over " + std::to_string(draws) +
                                                 " draws"};
  plot.x_label = "t";
  plot.y_label = "concentration";
  const double tol_mix = 5.0 * std::sqrt(0.25 / double(draws)) + 2.0 / double(draws);
  for (std::size_t i = 0; i < widths.size(); ++i) {
    const double t = widths[i];
    const double e = concentration_fn(col, t);
    emp.push_back(e);
    if (exact_known) {
      const double q = law.concentration(t);
      exact.push_back(q);
      within += std::abs(e - q) <= 5.0 * std::sqrt(q * (1.0 - q) / double(draws)) + 2.0 / double(draws);
    } else {
      exact.push_back(nullptr);
    }
    if (i + 1 < widths.size()) {
      plot.x.push_back(t);
      plot.y.push_back(e);
    }
  }
  const double emp_at = concentration_fn(col, c.ensemble.u());
  Outcome o;
  o.pass_frequency = exact_known ? double(within) / double(widths.size()) : double(emp_at <= c.ensemble.v() + tol_mix);
  o.report = {{"draws", draws},
              {"widths", widths},
              {"empirical", emp},
              {"exact", exact},
              {"u", c.ensemble.u()},
              {"v", c.ensemble.v()},
              {"empirical_at_u", emp_at},
              {"declared_pair_holds", exact_known ? law.concentration(c.ensemble.u()) <= c.ensemble.v()
                                                  : emp_at <= c.ensemble.v()}};
  o.plot = plot;
  return o;
}

Outcome run_report(const Command& cmd, Command& effective) {
  if (cmd.input.empty()) throw std::domain_error("report: --input is required");
  const auto src = load_json(cmd.input);
  const auto schema = nlohmann::json::parse(report_schema_text());
  const auto errors = validate_schema(src, schema);
  Outcome o;
  nlohmann::json results = {{"source", cmd.input.filename().string()}, {"schema_errors", errors}};
  if (!errors.empty()) throw std::domain_error("report: " + cmd.input.string() + " does not match the report schema: " +
                                               errors.front());
  effective.config = ExperimentConfig::from_json(src.at("params"));
  effective.config.workers = cmd.config.workers;
  results["experiment"] = src.at("experiment");
  o.pass_frequency = src.at("pass_frequency").get<double>();
  if (src.contains("aggregates")) {
    const auto tr = TrialReport::from_json(src);
    nlohmann::json recomputed = tr.to_json().at("aggregates");
    results["aggregates_consistent"] = recomputed == src.at("aggregates");
    results["pass_frequency_consistent"] = tr.pass_frequency == o.pass_frequency;
    results["violations"] = check_thresholds(tr);
    results["primary"] = tr.primary;
    results["estimate"] = src.at("estimate");
    o.plot = plot_series(tr);
    o.trial = tr;
  } else {
    results["violations"] = nlohmann::json::array();
  }
  o.report = results;
  return o;
}

std::vector<std::string> tool_violations(const Command& cmd, double pass_frequency) {
  std::vector<std::string> bad;
  const auto& th = cmd.config.thresholds;
  if (auto it = th.find("min_pass_frequency"); it != th.end() && pass_frequency < it->second)
    bad.push_back("min_pass_frequency");
  if (auto it = th.find("max_pass_frequency"); it != th.end() && pass_frequency > it->second)
    bad.push_back("max_pass_frequency");
  return bad;
}

}  // namespace

const std::vector<std::string>& cli_verbs() {
  static const std::vector<std::string> verbs = {"gen",       "sval",   "inclusion", "quotient", "volume", "meanwidth",
                                                 "opnorm",    "lemmas", "net",       "conc",     "report"};
  return verbs;
}

ParseOutcome parse_args(const std::vector<std::string>& args) {
  CLI::App app{"polylab: random polytopes spanned by heavy-tailed random matrices", "polylab"};
  app.footer(kFooter);
  app.get_formatter()->column_width(28);

  Command cmd;
  std::string verb, config_path, dist, out_dir = ".";
  std::uint64_t seed = 0;
  std::size_t n = 0, big_n = 0, trials = 0, samples = 0, workers = 0;
  double beta = 0, c = 0, lambda = 0, mu = 0, eps = 0, width = 0;

  app.add_option("verb", verb, "One of: gen sval inclusion quotient volume meanwidth opnorm lemmas net conc report")
      ->required()
      ->check(CLI::IsMember(cli_verbs()));
  auto* o_config = app.add_option("--config", config_path, "JSON config file (schema/config.schema.json)");
  auto* o_seed = app.add_option("--seed", seed, "Base seed");
  auto* o_n = app.add_option("--n", n, "Dimension n");
  auto* o_N = app.add_option("--N", big_n, "Number of rows N");
  auto* o_trials = app.add_option("--trials", trials, "Number of trials");
  auto* o_dist = app.add_option("--dist", dist, "Ensemble, e.g. gaussian, sym_pareto:3, or a JSON snippet");
  auto* o_beta = app.add_option("--beta", beta, "beta in (0,1)");
  auto* o_c = app.add_option("--c", c, "Absolute constant c in (0,1] of c_uv");
  auto* o_lambda = app.add_option("--lambda", lambda, "Row-norm constant lambda");
  auto* o_mu = app.add_option("--mu", mu, "Operator-norm constant mu");
  auto* o_samples = app.add_option("--samples", samples, "Samples per trial");
  auto* o_workers = app.add_option("--workers", workers, "Worker threads (0: one per core)")->envname("POLYLAB_WORKERS");
  app.add_option("--out", out_dir, "Output directory");
  app.add_flag("--dump", cmd.dump, "Also write the per-trial CSV");
  app.add_flag("--plot", cmd.plot, "Also write a two-column plot series");
  app.add_flag("--check", cmd.check, "Exit 3 when a configured threshold is violated");
  app.add_option("--format", cmd.format, "gen: matrix file format")->check(CLI::IsMember({"csv", "bin"}));
  app.add_option("--delta", cmd.delta, "net: delta in (0,1]");
  auto* o_eps = app.add_option("--eps", eps, "net: epsilon (default 1/sqrt(n))");
  app.add_option("--radius-constant", cmd.radius_constant, "net: constant C of the validation radius");
  app.add_option("--mode", cmd.mode, "net: realized or exhaustive")->check(CLI::IsMember({"realized", "exhaustive"}));
  auto* o_width = app.add_option("--width", width, "conc: extra window half-width (default u)");
  std::string input;
  app.add_option("--input", input, "report: report JSON to re-check");

  ParseOutcome outcome;
  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    outcome.message = app.help();
    outcome.exit_code = kExitOk;
    return outcome;
  } catch (const CLI::ParseError& e) {
    outcome.message = std::string(e.what()) + "\n\n" + app.help();
    outcome.exit_code = kExitUsage;
    return outcome;
  }

  try {
    cmd.verb = verb;
    if (*o_config) {
      const auto j = load_json(config_path);
      const auto errors = validate_schema(j, nlohmann::json::parse(config_schema_text()));
      if (!errors.empty()) throw std::domain_error(config_path + ": " + errors.front());
      cmd.config = ExperimentConfig::from_json(j);
    }
    auto& cf = cmd.config;
    if (*o_seed) cf.seed = seed;
    if (*o_n) cf.n = n;
    if (*o_N) cf.big_n = big_n;
    if (*o_trials) cf.trials = trials;
    if (*o_dist) cf.ensemble = parse_ensemble(dist);
    if (*o_beta) cf.beta = beta;
    if (*o_c) cf.c = c;
    if (*o_lambda) cf.lambda = lambda;
    if (*o_mu) cf.mu = mu;
    if (*o_samples) cf.samples_per_trial = samples;
    if (*o_workers) cf.workers = workers;
    if (*o_eps) cmd.eps = eps;
    if (*o_width) cmd.width = width;
    cmd.out = out_dir;
    cmd.input = input;
    cf.validate();
  } catch (const std::exception& e) {
    outcome.message = std::string("invalid configuration: ") + e.what();
    outcome.exit_code = kExitUsage;
    return outcome;
  }
  outcome.command = std::move(cmd);
  return outcome;
}

int dispatch(const Command& cmd, std::ostream& out, std::ostream& err) {
  try {
    ensure_writable(cmd.out);
    const auto start = std::chrono::steady_clock::now();
    Command effective = cmd;
    Outcome o;
    nlohmann::json report;
    std::vector<std::string> violations;
    const auto& names = experiment_names();
    if (std::find(names.begin(), names.end(), cmd.verb) != names.end()) {
      o.trial = run_experiment(cmd.verb, cmd.config);
      report = o.trial->to_json();
      o.pass_frequency = o.trial->pass_frequency;
      violations = check_thresholds(*o.trial);
      o.plot = plot_series(*o.trial);
    } else {
      if (cmd.verb == "gen") o = run_gen(cmd);
      else if (cmd.verb == "net") o = run_net(cmd);
      else if (cmd.verb == "conc") o = run_conc(cmd);
      else if (cmd.verb == "report") o = run_report(cmd, effective);
      else throw std::domain_error("unknown verb '" + cmd.verb + "'");
      const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
      if (cmd.verb == "report") {
        for (const auto& v : o.report.at("violations")) violations.push_back(v.get<std::string>());
      } else {
        violations = tool_violations(cmd, o.pass_frequency);
      }
      report = tool_report(effective, o.pass_frequency, std::move(o.report), seconds);
    }

    const fs::path json_path = cmd.out / (seed_stem(effective) + ".json");
    write_text(json_path, report.dump(2) + "\n");
    if (cmd.dump && o.trial && cmd.verb != "report") write_text(cmd.out / (seed_stem(effective) + ".csv"), o.trial->to_csv());
    if (cmd.plot && o.plot) write_plotdata(*o.plot, cmd.out / (seed_stem(effective) + "-plot.csv"));

    out << cmd.verb << ": pass_frequency " << std::setprecision(6) << o.pass_frequency << " -> "
        << json_path.string() << "\n";
    if (cmd.check && !violations.empty()) {
      for (const auto& v : violations) err << "threshold violated: " << v << "\n";
      return kExitCheck;
    }
    return kExitOk;
  } catch (const NumericalFailure& e) {
    err << "numerical failure: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const fs::filesystem_error& e) {
    err << "output error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::logic_error& e) {
    err << "invalid configuration: " << e.what() << "\n";
    return kExitUsage;
  } catch (const nlohmann::json::exception& e) {
    err << "invalid input: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "numerical failure: " << e.what() << "\n";
    return kExitNumerical;
  }
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  auto parsed = parse_args(args);
  if (!parsed.command) {
    (parsed.exit_code == kExitOk ? out : err) << parsed.message << "\n";
    return parsed.exit_code;
  }
  return dispatch(*parsed.command, out, err);
}

// ---------------------------------------------------------------- plot data

std::string plot_to_string(const PlotSeries& s) {
  std::ostringstream o;
  o << std::setprecision(17);
  for (const auto& c : s.comments) o << "# " << c << "\n";
  o << s.x_label << "," << s.y_label << "\n";
  for (std::size_t i = 0; i < s.x.size(); ++i) {
    auto put = [&](double v) {
      if (std::isfinite(v)) o << v;
      else o << "nan";
    };
    put(s.x[i]);
    o << ",";
    put(s.y[i]);
    o << "\n";
  }
  return o.str();
}

PlotSeries parse_plotdata(const std::string& text) {
  PlotSeries s;
  std::istringstream in(text);
  std::string line;
  bool header = false;
  auto value = [](const std::string& f) {
    if (f == "nan") return std::nan("");
    std::size_t used = 0;
    const double v = std::stod(f, &used);
    if (used != f.size()) throw std::domain_error("plot data: bad number '" + f + "'");
    return v;
  };
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      s.comments.push_back(line.size() > 2 && line[1] == ' ' ? line.substr(2) : line.substr(1));
      continue;
    }
    const auto comma = line.find(',');
    if (comma == std::string::npos || line.find(',', comma + 1) != std::string::npos)
      throw std::domain_error("plot data: expected two columns in '" + line + "'");
    if (!header) {
      s.x_label = line.substr(0, comma);
      s.y_label = line.substr(comma + 1);
      header = true;
      continue;
    }
    s.x.push_back(value(line.substr(0, comma)));
    s.y.push_back(value(line.substr(comma + 1)));
  }
  if (!header) throw std::domain_error("plot data: missing header line");
  return s;
}

void write_plotdata(const PlotSeries& s, const fs::path& path) { write_text(path, plot_to_string(s)); }

PlotSeries read_plotdata(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw std::domain_error("cannot open " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_plotdata(buf.str());
}

PlotSeries plot_series(const TrialReport& report) {
  PlotSeries s;
  s.comments = {"experiment: " + report.experiment, "seed: " + std::to_string(report.config.seed),
                "x: trial index", "y: " + report.primary + " per trial",
                "threshold: " + report.threshold_formula};
  s.x_label = "trial";
  s.y_label = report.primary;
  if (report.primary.empty() || report.rows.empty()) return s;
  const auto y = report.column(report.primary);
  for (std::size_t t = 0; t < y.size(); ++t) {
    s.x.push_back(double(t));
    s.y.push_back(y[t]);
  }
  return s;
}

void emit_plotdata(const TrialReport& report, const fs::path& path) { write_plotdata(plot_series(report), path); }

}  // namespace polylab
