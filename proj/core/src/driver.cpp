#include "membrane/driver.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <iomanip>
#include <sstream>

#include <nlohmann/json.hpp>
#include <yaml-cpp/yaml.h>

#include "membrane/error.hpp"
#include "membrane/gauge.hpp"
#include "membrane/io.hpp"
#include "membrane/version.hpp"

namespace membrane {

namespace {

using nlohmann::json;

std::string direction_dir(Direction d) { return d == Direction::Forward ? "forward" : "backward"; }

json optional_number(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

json summary_json(const RunConfig& cfg, const RunOutcome& outcome) {
  json j;
  j["exit_code"] = outcome.exit_code;
  j["message"] = outcome.message;
  j["C"] = outcome.C;
  j["n"] = cfg.n;
  for (const DirectionOutcome& d : outcome.directions) {
    json e;
    e["termination"] = std::string(to_string(d.result.termination));
    e["detail"] = d.result.detail;
    e["steps"] = d.result.steps;
    e["t_final"] = d.result.final_state.t;
    e["records"] = d.result.records.size();
    e["t_star"] = optional_number(d.report.t_star);
    e["mechanism"] = std::string(to_string(d.report.mechanism));
    e["monotone_window"] = d.report.monotone_window;
    e["budget_exceeded"] = d.report.budget_exceeded;
    e["note"] = d.report.note;
    e["velocity_bound_ok"] = d.bounds.velocity_ok;
    e["lipschitz_bound_ok"] = d.bounds.lipschitz_ok;
    e["min_velocity_margin"] = d.bounds.min_velocity_margin;
    json convex = json::array();
    for (const ConvexityVerdict& v : d.convexity) {
      convex.push_back({{"convex", v.convex},
                        {"max_second_difference", v.max_second_difference},
                        {"tolerance", v.tolerance},
                        {"first_violation", v.first_violation}});
    }
    e["convexity"] = convex;
    j["directions"][direction_dir(d.result.direction)] = e;
  }
  return j;
}

void write_outputs(const RunConfig& cfg, const RunOutcome& outcome) {
  const std::filesystem::path& dir = outcome.output_dir;
  std::filesystem::create_directories(dir);
  io::write_text_atomic(dir / "config.yaml", cfg.source_text);

  json manifest;
  manifest["tool"] = std::string(kToolName);
  manifest["version"] = std::string(kVersion);
  manifest["config_source"] = cfg.source_name;
  manifest["config_copy"] = "config.yaml";
  manifest["input_sha256"] = io::sha256_hex(cfg.source_text);
  manifest["seed"] = cfg.seed;
  manifest["n"] = cfg.n;
  io::write_text_atomic(dir / "manifest.json", manifest.dump(2) + "\n");

  std::vector<std::string> files;
  for (const DirectionOutcome& d : outcome.directions) {
    const std::string sub = direction_dir(d.result.direction);
    io::write_text_atomic(dir / sub / "diagnostics.csv",
                          io::diagnostics_csv(d.result.records, cfg.shape.k()));
    files.push_back(sub + "/diagnostics.csv");
  }
  io::write_text_atomic(dir / "run_summary.json", summary_json(cfg, outcome).dump(2) + "\n");
  io::write_text_atomic(dir / "plot.gp", io::gnuplot_script(files, cfg.shape.k()));
}

/// Per-record snapshot writer, bound to one direction's output directory.
RecordObserver snapshot_observer(const RunConfig& cfg, const std::filesystem::path& dir,
                                 int& counter) {
  if (!cfg.output.snapshots) return {};
  return [&cfg, dir, &counter](const FieldState& state, const DiagnosticsRecord&) {
    if (counter % cfg.output.snapshot_every == 0) {
      std::ostringstream name;
      name << "snapshot_" << std::setw(6) << std::setfill('0') << counter << ".csv";
      io::write_text_atomic(dir / "snapshots" / name.str(), io::snapshot_csv(state));
    }
    ++counter;
  };
}

}  // namespace

DriverOptions DriverOptions::from_environment() {
  DriverOptions o;
  if (const char* root = std::getenv(kOutputRootVariable); root && *root) o.output_root = root;
  return o;
}

std::filesystem::path resolve_output_dir(const RunConfig& config, const DriverOptions& options) {
  const std::filesystem::path& dir = config.output.dir;
  if (options.output_root && dir.is_relative()) return *options.output_root / dir;
  return dir;
}

RunOutcome run(const RunConfig& cfg, const DriverOptions& options) {
  RunOutcome outcome;
  outcome.output_dir = resolve_output_dir(cfg, options);

  GaugeFixResult gauged{FieldState{}, GaugeConstant(1.0)};
  try {
    gauged = prepare_gauged_data(build_initial_state(cfg), cfg.shape);
  } catch (const Error& e) {
    outcome.exit_code = kExitConfigError;
    outcome.message = e.what();
    return outcome;
  }
  outcome.C = gauged.C.value();

  try {
    for (Direction dir : cfg.directions) {
      int counter = 0;
      const auto observer = options.write_outputs
                                ? snapshot_observer(cfg, outcome.output_dir / direction_dir(dir),
                                                    counter)
                                : RecordObserver{};
      DirectionOutcome d;
      d.result = evolve(gauged.state, gauged.C, cfg.shape, cfg.solver, dir, observer);
      try {
        d.report = detect_breakdown(d.result, cfg.budget, cfg.trend_window);
      } catch (const Error& e) {
        if (e.code() != ErrorCode::InsufficientHistory) throw;
        d.report.direction = dir;
        d.report.trigger = d.result.termination;
        d.report.note = e.what();
      }
      d.bounds = apriori_bounds(d.result.records);
      if (d.result.records.size() >= 3) d.convexity = convexity_check(d.result.records);
      const bool bounds_ok = d.bounds.velocity_ok && d.bounds.lipschitz_ok;
      if (!bounds_ok && d.result.termination != Termination::NonTimelike) {
        outcome.exit_code = kExitInvariantViolation;
        outcome.message = "a-priori bound violated in the " + direction_dir(dir) +
                          " run without a NonTimelike termination";
      }
      outcome.directions.push_back(std::move(d));
    }
  } catch (const Error& e) {
    if (e.code() == ErrorCode::InvalidArgument) {
      outcome.exit_code = kExitConfigError;
    } else {
      outcome.exit_code = kExitInvariantViolation;
    }
    outcome.message = e.what();
  }

  if (options.write_outputs) write_outputs(cfg, outcome);
  return outcome;
}

RunOutcome run_file(const std::filesystem::path& config_path, const DriverOptions& options) {
  try {
    return run(load_run_config(config_path), options);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::ConfigError) throw;
    RunOutcome outcome;
    outcome.exit_code = kExitConfigError;
    outcome.message = e.what();
    return outcome;
  }
}

SweepTable sweep(const std::string& template_text, const std::string& grid_text,
                 const DriverOptions& options, const std::string& template_name) {
  YAML::Node grid;
  try {
    grid = YAML::Load(grid_text);
  } catch (const YAML::ParserException& e) {
    throw Error(ErrorCode::ConfigError, "sweep grid: " + e.msg);
  }
  SweepTable table;
  if (grid.IsNull()) return table;
  if (!grid.IsMap()) throw Error(ErrorCode::ConfigError, "sweep grid must map keys to value lists");

  std::vector<std::vector<std::string>> values;
  for (const auto& kv : grid) {
    table.keys.push_back(kv.first.as<std::string>());
    if (!kv.second.IsSequence() || kv.second.size() == 0) {
      throw Error(ErrorCode::ConfigError,
                  "sweep grid entry '" + table.keys.back() + "' must be a non-empty list");
    }
    std::vector<std::string> column;
    for (const YAML::Node& v : kv.second) {
      YAML::Emitter e;
      e.SetDoublePrecision(17);
      e << YAML::Flow << v;
      column.emplace_back(e.c_str());
    }
    values.push_back(std::move(column));
  }
  if (table.keys.empty()) return table;

  const YAML::Node tmpl = YAML::Load(template_text);
  std::filesystem::path base = "runs/sweep";
  if (tmpl["output"] && tmpl["output"]["dir"]) base = tmpl["output"]["dir"].as<std::string>();

  std::vector<std::size_t> index(values.size(), 0);
  for (int row = 0;; ++row) {
    SweepRow r;
    for (std::size_t i = 0; i < values.size(); ++i) r.parameters[table.keys[i]] = values[i][index[i]];
    std::map<std::string, std::string> overrides = r.parameters;
    overrides["output.dir"] = (base / ("row_" + std::to_string(row))).string();
    try {
      const RunConfig cfg = parse_run_config(override_config(template_text, overrides),
                                             template_name + "[row " + std::to_string(row) + "]");
      r.outcome = run(cfg, options);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::ConfigError) throw;
      r.outcome.exit_code = kExitConfigError;
      r.outcome.message = e.what();
    }
    r.exit_code = r.outcome.exit_code;
    r.status = r.exit_code == kExitOk               ? "ok"
               : r.exit_code == kExitConfigError ? "ConfigError"
                                                 : "InvariantViolation";
    table.rows.push_back(std::move(r));

    std::size_t i = values.size();
    while (i > 0) {
      --i;
      if (++index[i] < values[i].size()) break;
      index[i] = 0;
      if (i == 0) return table;
    }
  }
}

std::string sweep_table_csv(const SweepTable& table) {
  std::ostringstream out;
  out << "row";
  for (const auto& k : table.keys) out << ',' << k;
  out << ",status,exit_code";
  for (const char* d : {"forward", "backward"}) {
    out << ',' << d << "_termination," << d << "_t_final," << d << "_t_star," << d << "_mechanism";
  }
  out << '\n' << std::setprecision(17);
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    const SweepRow& r = table.rows[i];
    out << i;
    for (const auto& k : table.keys) out << ',' << r.parameters.at(k);
    out << ',' << r.status << ',' << r.exit_code;
    for (Direction dir : {Direction::Forward, Direction::Backward}) {
      const auto it = std::find_if(r.outcome.directions.begin(), r.outcome.directions.end(),
                                   [dir](const DirectionOutcome& d) { return d.result.direction == dir; });
      if (it == r.outcome.directions.end()) {
        out << ",,,,";
        continue;
      }
      out << ',' << to_string(it->result.termination) << ',' << it->result.final_state.t << ',';
      if (it->report.t_star) out << *it->report.t_star;
      out << ',' << to_string(it->report.mechanism);
    }
    out << '\n';
  }
  return out.str();
}

ConvergenceTable convergence(const RunConfig& config, std::vector<int> resolutions) {
  std::sort(resolutions.begin(), resolutions.end());
  if (resolutions.size() < 3) {
    throw Error(ErrorCode::InvalidArgument, "convergence needs at least three resolutions");
  }
  for (std::size_t i = 1; i < resolutions.size(); ++i) {
    if (resolutions[i] != 2 * resolutions[i - 1]) {
      throw Error(ErrorCode::InvalidArgument, "each resolution must double the previous one");
    }
  }

  ConvergenceTable table;
  std::vector<FieldState> finals;
  for (int n : resolutions) {
    RunConfig cfg = config;
    cfg.n = n;
    const GaugeFixResult g = prepare_gauged_data(build_initial_state(cfg), cfg.shape);
    const RunResult r = evolve(g.state, g.C, cfg.shape, cfg.solver, Direction::Forward);
    if (r.termination != Termination::HorizonReached) {
      std::ostringstream msg;
      msg << "run at n = " << n << " ended with " << to_string(r.termination) << " at t = "
          << r.final_state.t << " before the window end " << cfg.solver.t_end;
      throw Error(ErrorCode::WindowTooLong, msg.str());
    }
    ConvergenceRow row;
    row.n = n;
    row.C = g.C.value();
    for (const auto& rec : r.records) {
      row.max_gauge_residual = std::max({row.max_gauge_residual, rec.x_inf, rec.y_inf});
      row.max_density_spread = std::max(row.max_density_spread, rec.density_spread);
    }
    table.rows.push_back(row);
    finals.push_back(r.final_state);
  }

  for (std::size_t i = 0; i + 1 < finals.size(); ++i) {
    const FieldState& c = finals[i];
    const FieldState& f = finals[i + 1];
    double e = 0.0;
    for (auto block : {&FieldState::z, &FieldState::r, &FieldState::vz, &FieldState::vr}) {
      const FieldBlock& cb = c.*block;
      const FieldBlock& fb = f.*block;
      for (int q = 0; q < cb.rows(); ++q) {
        for (int j = 0; j < cb.cols(); ++j) e = std::max(e, std::abs(cb(q, j) - fb(q, 2 * j)));
      }
    }
    table.rows[i].error = e;
  }
  for (std::size_t i = 0; i + 2 < table.rows.size(); ++i) {
    table.rows[i].order = std::log2(*table.rows[i].error / *table.rows[i + 1].error);
  }
  table.observed_order = *table.rows[table.rows.size() - 3].order;
  return table;
}

std::string convergence_table_csv(const ConvergenceTable& table) {
  std::ostringstream out;
  out << "n,C,error_to_next,order,max_gauge_residual,max_density_spread\n" << std::setprecision(17);
  for (const ConvergenceRow& r : table.rows) {
    out << r.n << ',' << r.C << ',';
    if (r.error) out << *r.error;
    out << ',';
    if (r.order) out << *r.order;
    out << ',' << r.max_gauge_residual << ',' << r.max_density_spread << '\n';
  }
  out << "# observed_order," << table.observed_order << '\n';
  return out.str();
}

DiagnoseReport diagnose(const std::filesystem::path& run_dir) {
  const json summary = json::parse(io::read_text(run_dir / "run_summary.json"));
  const RunConfig cfg = parse_run_config(io::read_text(run_dir / "config.yaml"),
                                         (run_dir / "config.yaml").string());
  DiagnoseReport report;
  report.run_dir = run_dir;
  if (!summary.contains("directions")) return report;
  for (const auto& [name, entry] : summary["directions"].items()) {
    const auto records = io::parse_diagnostics_csv(io::read_text(run_dir / name / "diagnostics.csv"));
    const Direction dir = name == "forward" ? Direction::Forward : Direction::Backward;
    const Termination term = parse_termination(entry.at("termination").get<std::string>());
    report.directions.push_back(name);
    report.record_counts.push_back(records.size());
    try {
      report.reports.push_back(detect_breakdown(term, dir, records, cfg.budget, cfg.trend_window));
    } catch (const Error& e) {
      if (e.code() != ErrorCode::InsufficientHistory) throw;
      BreakdownReport b;
      b.direction = dir;
      b.trigger = term;
      b.note = e.what();
      report.reports.push_back(b);
    }
    report.convexity.push_back(records.size() >= 3 ? convexity_check(records)
                                                   : std::vector<ConvexityVerdict>{});
  }
  return report;
}

void print_run_outcome(std::ostream& out, const RunOutcome& o) {
  out << std::setprecision(10);
  if (!o.message.empty()) out << "message: " << o.message << '\n';
  if (o.C > 0.0) out << "C = " << o.C << '\n';
  for (const DirectionOutcome& d : o.directions) {
    out << to_string(d.result.direction) << ": " << to_string(d.result.termination)
        << " at t = " << d.result.final_state.t << " after " << d.result.steps << " steps; T* = ";
    if (d.report.t_star) {
      out << *d.report.t_star;
    } else {
      out << "n/a";
    }
    out << "; mechanism " << to_string(d.report.mechanism);
    if (!d.report.note.empty()) out << " (" << d.report.note << ")";
    out << '\n';
  }
  if (!o.output_dir.empty()) out << "output: " << o.output_dir.string() << '\n';
}

void print_diagnose_report(std::ostream& out, const DiagnoseReport& r) {
  out << std::setprecision(10) << "run: " << r.run_dir.string() << '\n';
  for (std::size_t i = 0; i < r.directions.size(); ++i) {
    const BreakdownReport& b = r.reports[i];
    out << r.directions[i] << ": " << r.record_counts[i] << " records, trigger "
        << to_string(b.trigger) << ", mechanism " << to_string(b.mechanism) << ", T* = ";
    if (b.t_star) {
      out << *b.t_star;
    } else {
      out << "n/a";
    }
    for (std::size_t j = 0; j < r.convexity[i].size(); ++j) {
      out << ", mean_r_" << j + 1 << (r.convexity[i][j].convex ? " concave" : " NOT concave");
    }
    if (!b.note.empty()) out << " (" << b.note << ")";
    out << '\n';
  }
}

}  // namespace membrane
