#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "membrane/breakdown.hpp"
#include "membrane/evolution.hpp"
#include "membrane/geometry.hpp"

namespace membrane {

/// f += amplitude * cos(mode * y + phase) on one component of z, r, vz or vr.
struct FourierTerm {
  std::string field;  // "z", "r", "vz" or "vr"
  int component = 0;  // zero-based row
  int mode = 1;
  double amplitude = 0.0;
  double phase = 0.0;
};

/// `count` terms with seeded modes in [1, max_mode], amplitudes uniform in
/// [-amplitude, amplitude] and phases uniform in [0, 2 pi).
struct RandomPerturbation {
  int count = 1;
  double amplitude = 0.0;
  int max_mode = 4;
  std::vector<std::string> targets;  // e.g. {"z1", "r1", "vr1"}
};

struct InitialData {
  std::string family = "clifford";  // clifford | torus_of_revolution
  double rho0 = 1.0;
  double a0 = 1.0;
  double rho_dot0 = 0.0;
  double a_dot0 = 0.0;
  double R0 = 2.0;
  double b = 0.5;
  /// Non-empty for the perturbed family, applied on top of the base family.
  std::vector<FourierTerm> perturbations;
  std::optional<RandomPerturbation> random;
};

struct OutputOptions {
  std::filesystem::path dir = "runs/default";
  bool snapshots = false;
  int snapshot_every = 100;
};

struct RunConfig {
  AxisymmetryShape shape = AxisymmetryShape::clifford();
  InitialData initial;
  int n = 256;
  SolverParams solver;
  std::vector<Direction> directions{Direction::Forward, Direction::Backward};
  std::uint64_t seed = 0;
  OutputOptions output;
  GaugeBudget budget;
  int trend_window = 10;
  /// Canonical text of the document the config was read from.
  std::string source_text;
  std::string source_name;
};

/// Parses and schema-validates a YAML run description. Unknown keys, wrong
/// types and out-of-range values raise Error(ConfigError) with a
/// "source:line:column: message" position.
RunConfig parse_run_config(const std::string& text, const std::string& source_name = "<config>");
RunConfig load_run_config(const std::filesystem::path& path);

/// Replaces dotted keys ("initial.rho0", "grid.n") of a config document with
/// YAML scalars and returns the re-emitted text. Missing intermediate maps are
/// created.
std::string override_config(const std::string& text,
                            const std::map<std::string, std::string>& overrides);

/// Base family, then explicit terms, then seeded random terms. Throws
/// Error(ConfigError) if the result has r <= 0 or speed >= 1 anywhere.
FieldState build_initial_state(const RunConfig& config);

}  // namespace membrane
