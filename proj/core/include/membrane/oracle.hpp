#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "membrane/evolution.hpp"
#include "membrane/gauge.hpp"
#include "membrane/geometry.hpp"

namespace membrane::oracle {

/// Homogeneous generatrix z = rho (cos y, sin y, 0, ...), r_j = a_j. With one
/// unit-dimensional sphere factor this is the Clifford-type torus.
struct CliffordState {
  double t = 0.0;
  double rho = 1.0;
  double rho_dot = 0.0;
  std::vector<double> a{1.0};
  std::vector<double> a_dot{0.0};
  double C = 1.0;
};

/// State with C chosen so the area-density gauge holds:
/// C = sqrt(1 - rho_dot^2 - sum a_dot^2) / (rho prod a_j^{d_j}).
CliffordState make_state(double rho, double a, double rho_dot = 0.0, double a_dot = 0.0);
CliffordState make_state(double rho, std::vector<double> a, double rho_dot,
                         std::vector<double> a_dot, const AxisymmetryShape& shape);

struct CliffordAccel {
  double rho_ddot = 0.0;
  std::vector<double> a_ddot;
};

/// rho'' = -C^2 (prod a_i^{2 d_i}) rho,   a_j'' = -d_j |g_tt| / a_j, with |g_tt| taken
/// from the gauge identity |g_tt| = C^2 rho^2 prod a_i^{2 d_i} rather than from
/// 1 - rho_dot^2 - sum a_dot^2 (the two agree on solutions).
/// Throws Error(NonTimelike) or Error(NonPositiveRadius).
CliffordAccel clifford_rhs(const CliffordState& s,
                           const AxisymmetryShape& shape = AxisymmetryShape::clifford());

/// |g_tt| for the homogeneous state.
double abs_gtt(const CliffordState& s);

/// min(rho, min a_j, C^2 rho^2 prod a_i^{2 d_i}): the quantity whose floor
/// crossing marks collapse.
double stopping_quantity(const CliffordState& s,
                         const AxisymmetryShape& shape = AxisymmetryShape::clifford());

struct IntegrateOptions {
  double tol = 1e-12;
  double horizon = 50.0;
  double stop_floor = 1e-8;
  double time_resolution = 1e-10;  // bisection width of the collapse time
  Direction direction = Direction::Forward;
  /// States are also reported at exactly these times (in the run direction,
  /// beyond the start, sorted).
  std::vector<double> sample_times;
  AxisymmetryShape shape = AxisymmetryShape::clifford();
};

struct OracleResult {
  std::vector<CliffordState> trajectory;  // accepted adaptive steps
  std::vector<CliffordState> samples;     // at IntegrateOptions::sample_times
  std::optional<double> collapse_time;
};

/// Adaptive Dormand-Prince integration of the homogeneous reduction until the
/// stopping quantity drops below the floor or the horizon is reached.
OracleResult clifford_integrate(const CliffordState& s0, const IntegrateOptions& options = {});

struct LiftedState {
  FieldState state;
  /// The constant that makes the lifted grid data exactly gauged for the
  /// fourth-order stencil: C / lambda(h), where lambda(h) is the stencil's
  /// symbol on the first Fourier mode.
  GaugeConstant C;
};

/// Symbol of the fourth-order first-derivative stencil on sin y / cos y.
double stencil_symbol(int n);

LiftedState lift_to_grid(const CliffordState& s, int n,
                         const AxisymmetryShape& shape = AxisymmetryShape::clifford());

/// Rest-data collapse time of the reduction, via clifford_integrate.
double rest_collapse_time(double rho0, double a0, double tol = 1e-12);

/// Named constants with tolerances: one "name value tolerance" triple per
/// line, '#' starts a comment.
struct GoldenConstant {
  double value = 0.0;
  double tolerance = 0.0;
};
using GoldenTable = std::map<std::string, GoldenConstant>;

GoldenTable read_golden(const std::filesystem::path& path);
void write_golden(const std::filesystem::path& path, const GoldenTable& table);

/// Reference constants pinned for the Clifford rest datum rho0 = a0 = 1
/// (C = 1): forward collapse time and the tolerance it is pinned to.
GoldenTable compute_reference_constants();

}  // namespace membrane::oracle
