// End-to-end acceptance checks. One PASS/FAIL line per criterion; the exit
// status is the number of failures.

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iomanip>
#include <iostream>
#include <map>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <sys/wait.h>

#include "membrane/driver.hpp"
#include "membrane/error.hpp"
#include "membrane/evolution.hpp"
#include "membrane/gauge.hpp"
#include "membrane/io.hpp"
#include "membrane/oracle.hpp"
#include "membrane/run_config.hpp"

namespace fs = std::filesystem;
using namespace membrane;

namespace {

const fs::path kConfigs = MEMBRANE_CONFIG_DIR;

struct Verdict {
  bool pass = false;
  std::string detail;
};

DriverOptions quiet() {
  DriverOptions o;
  o.write_outputs = false;
  return o;
}

std::string fmt(double x) {
  std::ostringstream s;
  s << std::setprecision(4) << x;
  return s.str();
}

// Shared runs, computed once.
struct Runs {
  SweepTable rest_sweep;
  std::vector<RunOutcome> random_seeds;
  RunOutcome unperturbed;
  RunOutcome benchmark;
};

Runs& runs() {
  static Runs r = [] {
    Runs out;
    const std::string rest = io::read_text(kConfigs / "clifford_rest.yaml");
    out.rest_sweep = sweep(rest, io::read_text(kConfigs / "rest_sweep_grid.yaml"), quiet(), "clifford_rest.yaml");
    out.unperturbed = run(parse_run_config(rest, "clifford_rest.yaml"), quiet());
    const std::string random = io::read_text(kConfigs / "clifford_random.yaml");
    for (int seed = 1; seed <= 20; ++seed) {
      const std::string text = override_config(random, {{"run.seed", std::to_string(seed)}});
      out.random_seeds.push_back(run(parse_run_config(text, "clifford_random.yaml"), quiet()));
    }
    out.benchmark = run(load_run_config(kConfigs / "perturbed_torus.yaml"), quiet());
    return out;
  }();
  return r;
}

Verdict oracle_equivalence() {
  const auto start = std::chrono::steady_clock::now();
  const int n = 256;
  const oracle::CliffordState s0 = oracle::make_state(1.0, 1.0);
  const oracle::LiftedState lifted = oracle::lift_to_grid(s0, n);
  SolverParams params;
  params.t_end = 10.0;

  std::vector<double> times;
  std::vector<double> rho;
  std::vector<double> a;
  std::vector<double> indicator;
  const auto observer = [&](const FieldState& s, const DiagnosticsRecord& rec) {
    double rs = 0.0;
    double as = 0.0;
    for (int j = 0; j < n; ++j) {
      rs += std::hypot(s.z(0, j), s.z(1, j));
      as += s.r(0, j);
    }
    times.push_back(rec.t);
    rho.push_back(rs / n);
    a.push_back(as / n);
    indicator.push_back(rec.min_indicator);
  };
  const RunResult pde = evolve(lifted.state, lifted.C, AxisymmetryShape::clifford(), params,
                               Direction::Forward, observer);

  oracle::IntegrateOptions opts;
  std::vector<std::size_t> used;
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (indicator[i] > 0.1 && times[i] > 0.0) {
      opts.sample_times.push_back(times[i]);
      used.push_back(i);
    }
  }
  const oracle::OracleResult ref = oracle::clifford_integrate(s0, opts);
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (ref.samples.size() != used.size() || used.size() < 10) {
    return {false, "sample mismatch: " + std::to_string(ref.samples.size()) + " of " +
                       std::to_string(used.size())};
  }
  double err = 0.0;
  for (std::size_t q = 0; q < used.size(); ++q) {
    const auto& o = ref.samples[q];
    err = std::max({err, std::abs(rho[used[q]] - o.rho) / o.rho,
                    std::abs(a[used[q]] - o.a[0]) / o.a[0]});
  }
  const bool ok = err <= 1e-6 && seconds < 30.0 && pde.termination == Termination::IndicatorFloor;
  return {ok, "max rel error " + fmt(err) + " over " + std::to_string(used.size()) +
                  " records, " + fmt(seconds) + " s, " + std::string(to_string(pde.termination))};
}

Verdict finite_time_collapse() {
  const SweepTable& t = runs().rest_sweep;
  if (t.rows.size() != 9) return {false, "sweep has " + std::to_string(t.rows.size()) + " rows"};
  double worst = 0.0;
  for (const SweepRow& row : t.rows) {
    if (row.status != "ok") return {false, "row status " + row.status};
    const double rho0 = std::stod(row.parameters.at("initial.rho0"));
    const double a0 = std::stod(row.parameters.at("initial.a0"));
    const double T = oracle::rest_collapse_time(rho0, a0);
    for (const DirectionOutcome& d : row.outcome.directions) {
      const Termination term = d.result.termination;
      if (term != Termination::IndicatorFloor && term != Termination::RadiusFloor) {
        return {false, "termination " + std::string(to_string(term))};
      }
      if (!d.report.t_star) return {false, "no T* estimate"};
      const double expected = d.result.direction == Direction::Forward ? T : -T;
      worst = std::max(worst, std::abs(*d.report.t_star - expected) / T);
    }
  }
  return {worst <= 0.02, "18 runs, max T* relative error " + fmt(worst)};
}

struct ConvergenceCsv {
  std::vector<std::map<std::string, double>> rows;
  double observed_order = 0.0;
  int exit_code = -1;
};

ConvergenceCsv& cli_convergence() {
  static ConvergenceCsv c = [] {
    ConvergenceCsv out;
    const fs::path root = fs::temp_directory_path() / "membrane_acceptance";
    fs::remove_all(root);
    const std::string cmd = std::string("\"") + MEMBRANE_CLI + "\" --output-root \"" + root.string() +
                            "\" convergence \"" + (kConfigs / "perturbed_torus.yaml").string() +
                            "\" --resolutions 64 128 256";
    std::unique_ptr<FILE, int (*)(FILE*)> pipe(popen(cmd.c_str(), "r"), pclose);
    std::string text;
    std::array<char, 4096> buf{};
    while (std::fgets(buf.data(), buf.size(), pipe.get())) text += buf.data();
    out.exit_code = WEXITSTATUS(pclose(pipe.release()));
    fs::remove_all(root);

    std::istringstream in(text);
    std::string line;
    std::vector<std::string> header;
    while (std::getline(in, line)) {
      std::vector<std::string> cells;
      std::stringstream ss(line);
      for (std::string c; std::getline(ss, c, ',');) cells.push_back(c);
      if (cells.empty()) continue;
      if (cells[0] == "n") {
        header = cells;
      } else if (cells[0] == "# observed_order" && cells.size() == 2) {
        out.observed_order = std::stod(cells[1]);
      } else if (!header.empty()) {
        std::map<std::string, double> row;
        for (std::size_t i = 0; i < cells.size() && i < header.size(); ++i) {
          if (!cells[i].empty()) row[header[i]] = std::stod(cells[i]);
        }
        out.rows.push_back(row);
      }
    }
    return out;
  }();
  return c;
}

Verdict gauge_preservation() {
  const auto& c = cli_convergence();
  if (c.rows.size() != 3) return {false, "convergence subcommand failed"};
  const double e128 = c.rows[1].at("max_gauge_residual");
  const double e256 = c.rows[2].at("max_gauge_residual");
  const double ratio = e128 / e256;
  return {ratio >= 10.0, "max(|X|,|Y|) " + fmt(e128) + " -> " + fmt(e256) + ", ratio " + fmt(ratio) +
                             " (order " + fmt(std::log2(ratio)) + ")"};
}

Verdict conservation() {
  const auto& c = cli_convergence();
  if (c.rows.size() != 3) return {false, "convergence subcommand failed"};
  const double s64 = c.rows[0].at("max_density_spread");
  const double s128 = c.rows[1].at("max_density_spread");
  const double s256 = c.rows[2].at("max_density_spread");
  const double order = std::log2(s128 / s256);
  return {s256 <= 1e-6 && order >= 3.3 && std::log2(s64 / s128) >= 3.3,
          "spread " + fmt(s64) + ", " + fmt(s128) + ", " + fmt(s256) + "; order " + fmt(order)};
}

std::vector<const RunOutcome*> all_runs() {
  std::vector<const RunOutcome*> out;
  for (const SweepRow& row : runs().rest_sweep.rows) out.push_back(&row.outcome);
  for (const RunOutcome& o : runs().random_seeds) out.push_back(&o);
  out.push_back(&runs().unperturbed);
  out.push_back(&runs().benchmark);
  return out;
}

Verdict convexity() {
  int checked = 0;
  for (const SweepRow& row : runs().rest_sweep.rows) {
    for (const DirectionOutcome& d : row.outcome.directions) {
      if (d.convexity.empty()) return {false, "no convexity verdict"};
      for (const ConvexityVerdict& v : d.convexity) {
        if (!v.convex) return {false, "convexity violated in a sweep run"};
        ++checked;
      }
    }
  }
  return {checked == 18, std::to_string(checked) + " mean radii checked across 18 runs"};
}

Verdict apriori_bounds_hold() {
  int runs_checked = 0;
  double margin = 1.0;
  for (const RunOutcome* o : all_runs()) {
    if (o->exit_code != kExitOk) return {false, "run exit code " + std::to_string(o->exit_code)};
    for (const DirectionOutcome& d : o->directions) {
      const bool ok = d.bounds.velocity_ok && d.bounds.lipschitz_ok;
      if (!ok && d.result.termination != Termination::NonTimelike) {
        return {false, "bound violated at record " + std::to_string(d.bounds.first_violation)};
      }
      margin = std::min(margin, d.bounds.min_velocity_margin);
      ++runs_checked;
    }
  }
  return {true, std::to_string(runs_checked) + " runs, min velocity margin " + fmt(margin)};
}

Verdict rhs_cross_validation() {
  const RunConfig cfg = load_run_config(kConfigs / "perturbed_torus.yaml");
  const GaugeFixResult g = prepare_gauged_data(build_initial_state(cfg), cfg.shape);
  const Accelerations a = rhs_reduced(g.state, g.C, cfg.shape);
  const Accelerations b = rhs_general(g.state, cfg.shape);
  double d = 0.0;
  for (auto blk : {&Accelerations::z, &Accelerations::r}) {
    const auto x = (a.*blk).values();
    const auto y = (b.*blk).values();
    for (std::size_t i = 0; i < x.size(); ++i) d = std::max(d, std::abs(x[i] - y[i]));
  }
  return {cfg.n == 256 && d < 1e-8, "max |difference| " + fmt(d) + " at n = " + std::to_string(cfg.n)};
}

Verdict collapse_stability() {
  const RunOutcome& base = runs().unperturbed;
  if (base.directions.empty() || !base.directions[0].report.t_star) return {false, "no unperturbed T*"};
  const double T0 = *base.directions[0].report.t_star;
  double lo = 1e300;
  double hi = 0.0;
  for (const RunOutcome& o : runs().random_seeds) {
    for (const DirectionOutcome& d : o.directions) {
      if (d.report.mechanism != Mechanism::ImmersivityLoss || !d.report.t_star) {
        return {false, "mechanism " + std::string(to_string(d.report.mechanism))};
      }
      const double ratio = std::abs(*d.report.t_star) / T0;
      lo = std::min(lo, ratio);
      hi = std::max(hi, ratio);
    }
  }
  return {lo >= 1.0 / 1.5 && hi <= 1.5,
          "20 seeds, T*/T0 in [" + fmt(lo) + ", " + fmt(hi) + "], T0 = " + fmt(T0)};
}

Verdict convergence_order() {
  const auto& c = cli_convergence();
  return {c.exit_code == 0 && c.observed_order >= 3.5,
          "observed order " + fmt(c.observed_order) + ", exit " + std::to_string(c.exit_code)};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria{
      {"oracle_equivalence", oracle_equivalence},
      {"finite_time_collapse", finite_time_collapse},
      {"gauge_preservation", gauge_preservation},
      {"conservation", conservation},
      {"mean_radius_convexity", convexity},
      {"apriori_bounds", apriori_bounds_hold},
      {"rhs_cross_validation", rhs_cross_validation},
      {"collapse_stability", collapse_stability},
      {"convergence_order", convergence_order},
  };
  int failures = 0;
  int index = 0;
  for (const auto& [name, check] : criteria) {
    ++index;
    Verdict v;
    try {
      v = check();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    failures += v.pass ? 0 : 1;
    std::cout << (v.pass ? "PASS" : "FAIL") << ' ' << index << ' ' << name << ": " << v.detail
              << std::endl;
  }
  return failures;
}
