#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "membrane/breakdown.hpp"
#include "membrane/diagnostics.hpp"
#include "membrane/evolution.hpp"
#include "membrane/run_config.hpp"

namespace membrane {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfigError = 2;
inline constexpr int kExitInvariantViolation = 3;

/// Environment variable that relocates relative output directories.
inline constexpr const char* kOutputRootVariable = "MEMBRANE_OUTPUT_ROOT";

struct DriverOptions {
  std::optional<std::filesystem::path> output_root;
  bool write_outputs = true;

  /// output_root from the environment, outputs enabled.
  static DriverOptions from_environment();
};

struct DirectionOutcome {
  RunResult result;
  BreakdownReport report;
  BoundsVerdict bounds;
  std::vector<ConvexityVerdict> convexity;
};

struct RunOutcome {
  int exit_code = kExitOk;
  std::string message;
  double C = 0.0;
  std::vector<DirectionOutcome> directions;
  std::filesystem::path output_dir;
};

std::filesystem::path resolve_output_dir(const RunConfig& config, const DriverOptions& options);

/// Initial state, gauge preparation, one evolution per direction, breakdown
/// classification and bound checks, then outputs. Exit code 2 for invalid
/// input data, 3 if a bound fails without a NonTimelike termination or an
/// internal invariant breaks.
RunOutcome run(const RunConfig& config, const DriverOptions& options);

/// run() on a config file; parse failures map to exit code 2.
RunOutcome run_file(const std::filesystem::path& config_path, const DriverOptions& options);

struct SweepRow {
  std::map<std::string, std::string> parameters;
  std::string status;  // "ok", "ConfigError" or "InvariantViolation"
  int exit_code = kExitOk;
  RunOutcome outcome;
};

struct SweepTable {
  std::vector<std::string> keys;
  std::vector<SweepRow> rows;
};

/// The grid document maps dotted config keys to lists of values; rows are
/// their Cartesian product in key order. An empty mapping yields no rows. Each
/// row writes to <template output dir>/row_<index>.
SweepTable sweep(const std::string& template_text, const std::string& grid_text,
                 const DriverOptions& options, const std::string& template_name = "<template>");
std::string sweep_table_csv(const SweepTable& table);

struct ConvergenceRow {
  int n = 0;
  double C = 0.0;
  /// max-abs difference to the next finer run on the shared grid points.
  std::optional<double> error;
  /// log2 of this row's error over the next row's error.
  std::optional<double> order;
  double max_gauge_residual = 0.0;
  double max_density_spread = 0.0;
};

struct ConvergenceTable {
  std::vector<ConvergenceRow> rows;
  /// Observed order from the three finest resolutions.
  double observed_order = 0.0;
};

/// Runs the config forward over [0, solver.t_end] at every resolution (at
/// least three, each double the previous). Throws Error(WindowTooLong) if a
/// run ends before t_end, Error(InvalidArgument) for a bad resolution list.
ConvergenceTable convergence(const RunConfig& config, std::vector<int> resolutions);
std::string convergence_table_csv(const ConvergenceTable& table);

struct DiagnoseReport {
  std::filesystem::path run_dir;
  std::vector<std::string> directions;
  std::vector<BreakdownReport> reports;
  std::vector<std::vector<ConvexityVerdict>> convexity;
  std::vector<std::size_t> record_counts;
};

/// Re-reads the diagnostics of a finished run and reclassifies it.
DiagnoseReport diagnose(const std::filesystem::path& run_dir);

void print_run_outcome(std::ostream& out, const RunOutcome& outcome);
void print_diagnose_report(std::ostream& out, const DiagnoseReport& report);

}  // namespace membrane
