#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "polylab/experiments.hpp"

namespace polylab {

/// Exit codes of the command-line front end.
enum ExitCode : int { kExitOk = 0, kExitUsage = 1, kExitNumerical = 2, kExitCheck = 3 };

const std::vector<std::string>& cli_verbs();

struct Command {
  std::string verb;
  ExperimentConfig config;
  std::filesystem::path out = ".";
  bool dump = false;   // per-trial CSV next to the JSON report
  bool plot = false;   // two-column plot series
  bool check = false;  // exit 3 when a configured threshold is violated

  // gen
  std::string format = "csv";
  // net
  double delta = 0.1;
  std::optional<double> eps;  // defaults to 1/√n
  double radius_constant = 10.0;
  std::string mode = "realized";
  // conc
  std::optional<double> width;  // defaults to the ensemble's u
  // report
  std::filesystem::path input;
};

struct ParseOutcome {
  std::optional<Command> command;
  int exit_code = kExitOk;  // meaningful when command is empty (help or error)
  std::string message;
};

/// Flags override config-file values. Never exits the process.
ParseOutcome parse_args(const std::vector<std::string>& args);

/// Runs the command and writes `<out>/<verb>-<seed>.json` (plus optional CSV).
int dispatch(const Command& cmd, std::ostream& out, std::ostream& err);

/// parse_args followed by dispatch.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// A two-column series with '#' comment lines describing it.
struct PlotSeries {
  std::vector<std::string> comments;
  std::string x_label = "x";
  std::string y_label = "y";
  std::vector<double> x;
  std::vector<double> y;
};

std::string plot_to_string(const PlotSeries& s);
PlotSeries parse_plotdata(const std::string& text);
void write_plotdata(const PlotSeries& s, const std::filesystem::path& path);
PlotSeries read_plotdata(const std::filesystem::path& path);

/// Trial index against the report's primary column.
PlotSeries plot_series(const TrialReport& report);
void emit_plotdata(const TrialReport& report, const std::filesystem::path& path);

}  // namespace polylab
