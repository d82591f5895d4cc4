// Command-line front end: evolve, sweep, convergence, oracle, diagnose.

#include <filesystem>
#include <iomanip>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "membrane/driver.hpp"
#include "membrane/error.hpp"
#include "membrane/io.hpp"
#include "membrane/oracle.hpp"
#include "membrane/version.hpp"

namespace {

using namespace membrane;

int exit_for(const Error& e) {
  return e.code() == ErrorCode::ConfigError || e.code() == ErrorCode::InvalidArgument ||
                 e.code() == ErrorCode::WindowTooLong
             ? kExitConfigError
             : kExitInvariantViolation;
}

DriverOptions driver_options(const std::string& output_root) {
  DriverOptions o = DriverOptions::from_environment();
  if (!output_root.empty()) o.output_root = output_root;
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Axially symmetric time-like membranes: evolution and collapse diagnostics"};
  app.set_version_flag("--version", std::string(kToolName) + " " + std::string(kVersion));
  app.require_subcommand(1);

  std::string output_root;
  app.add_option("--output-root", output_root,
                 std::string("Prefix for relative output directories (overrides ") +
                     kOutputRootVariable + ")");

  std::string config_path;
  auto* evolve_cmd = app.add_subcommand("evolve", "Run one config in each requested direction");
  evolve_cmd->add_option("config", config_path, "Run config (YAML)")->required()->check(CLI::ExistingFile);

  std::string template_path;
  std::string grid_path;
  auto* sweep_cmd = app.add_subcommand("sweep", "Run the Cartesian product of a parameter grid");
  sweep_cmd->add_option("template", template_path, "Template run config")->required()->check(CLI::ExistingFile);
  sweep_cmd->add_option("grid", grid_path, "Grid: dotted key -> list of values")->required()->check(CLI::ExistingFile);

  std::vector<int> resolutions;
  auto* conv_cmd = app.add_subcommand("convergence", "Self-convergence over a resolution ladder");
  conv_cmd->add_option("config", config_path, "Run config")->required()->check(CLI::ExistingFile);
  conv_cmd->add_option("--resolutions", resolutions, "Grid sizes, each double the previous")
      ->required()
      ->expected(3, -1);

  std::string family;
  double rho0 = 1.0;
  double a0 = 1.0;
  double rho_dot0 = 0.0;
  double a_dot0 = 0.0;
  std::string direction = "forward";
  std::string golden_path;
  auto* oracle_cmd = app.add_subcommand("oracle", "Homogeneous reduction reference solution");
  oracle_cmd->add_option("family", family, "Only 'clifford'")->required()->check(CLI::IsMember({"clifford"}));
  oracle_cmd->add_option("--rho0", rho0, "Initial z-circle radius");
  oracle_cmd->add_option("--a0", a0, "Initial sphere radius");
  oracle_cmd->add_option("--rho-dot0", rho_dot0, "Initial d rho / dt");
  oracle_cmd->add_option("--a-dot0", a_dot0, "Initial d a / dt");
  oracle_cmd->add_option("--direction", direction, "forward or backward")
      ->check(CLI::IsMember({"forward", "backward"}));
  oracle_cmd->add_option("--golden", golden_path, "Also write the pinned reference constants here");

  std::string run_dir;
  auto* diag_cmd = app.add_subcommand("diagnose", "Reclassify a finished run from its outputs");
  diag_cmd->add_option("run-dir", run_dir, "Run output directory")->required()->check(CLI::ExistingDirectory);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*evolve_cmd) {
      const RunOutcome o = run_file(config_path, driver_options(output_root));
      print_run_outcome(std::cout, o);
      return o.exit_code;
    }
    if (*sweep_cmd) {
      const DriverOptions opts = driver_options(output_root);
      const std::string tmpl = io::read_text(template_path);
      const SweepTable table = sweep(tmpl, io::read_text(grid_path), opts, template_path);
      const std::string csv = sweep_table_csv(table);
      std::cout << csv;
      RunConfig base = parse_run_config(tmpl, template_path);
      io::write_text_atomic(resolve_output_dir(base, opts) / "sweep_summary.csv", csv);
      return kExitOk;
    }
    if (*conv_cmd) {
      const RunConfig cfg = load_run_config(config_path);
      const ConvergenceTable table = convergence(cfg, resolutions);
      const std::string csv = convergence_table_csv(table);
      std::cout << csv;
      io::write_text_atomic(resolve_output_dir(cfg, driver_options(output_root)) / "convergence.csv",
                            csv);
      return kExitOk;
    }
    if (*oracle_cmd) {
      oracle::IntegrateOptions opts;
      opts.direction = direction == "forward" ? Direction::Forward : Direction::Backward;
      const oracle::CliffordState s = oracle::make_state(rho0, a0, rho_dot0, a_dot0);
      const oracle::OracleResult r = oracle::clifford_integrate(s, opts);
      std::cout << std::setprecision(17) << "C = " << s.C << '\n' << "collapse_time = ";
      if (r.collapse_time) {
        std::cout << *r.collapse_time << '\n';
      } else {
        std::cout << "none before t = " << r.trajectory.back().t << '\n';
      }
      if (!golden_path.empty()) oracle::write_golden(golden_path, oracle::compute_reference_constants());
      return kExitOk;
    }
    if (*diag_cmd) {
      print_diagnose_report(std::cout, diagnose(run_dir));
      return kExitOk;
    }
  } catch (const Error& e) {
    std::cerr << "membrane: " << e.what() << '\n';
    return exit_for(e);
  }
  return kExitOk;
}
