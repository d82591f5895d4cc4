#pragma once

#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "membrane/diagnostics.hpp"
#include "membrane/gauge.hpp"
#include "membrane/geometry.hpp"

namespace membrane {

struct SolverParams {
  double cfl = 0.4;
  double t_end = 10.0;            // coordinate-time horizon per direction
  double indicator_floor = 1e-9;  // breakdown threshold on min immersivity indicator
  double radius_floor = 1e-4;
  double dt_floor = 1e-12;
  int record_every = 1;
  long max_steps = 2'000'000;
  /// dt is also capped at this fraction of the shortest time in which the
  /// immersivity indicator would reach zero at its current rate of decrease.
  double indicator_step_fraction = 0.1;
  /// evolve() refuses initial data with max|X| or max|Y| above this.
  double initial_gauge_tolerance = 1e-6;

  /// Throws Error(InvalidArgument) on non-positive entries or cfl > 1.
  void validate() const;
};

enum class Direction { Forward, Backward };

enum class Termination {
  HorizonReached,
  IndicatorFloor,
  RadiusFloor,
  DtFloor,
  NonTimelike,
  NaNDetected,
  MaxSteps,
};

std::string_view to_string(Direction d) noexcept;
std::string_view to_string(Termination t) noexcept;
Direction parse_direction(std::string_view s);
Termination parse_termination(std::string_view s);

struct RunResult {
  Termination termination = Termination::HorizonReached;
  Direction direction = Direction::Forward;
  FieldState final_state;  // last valid state, in physical time orientation
  std::vector<DiagnosticsRecord> records;
  long steps = 0;
  std::string detail;
};

/// Second time derivatives of the generatrix.
struct Accelerations {
  FieldBlock z;
  FieldBlock r;
};

/// Gauge-fixed system:
///   z_tt   = C^2 d_y(R d_y z)
///   r_j,tt = C^2 d_y(R d_y r_j) - d_j |g_tt| / r_j,    R = prod r_i^{2 d_i}.
/// Throws Error(NonPositiveRadius) or Error(NonTimelike).
Accelerations rhs_reduced(const FieldState& state, GaugeConstant C, const AxisymmetryShape& shape);

/// The same equations in an arbitrary parametrization of y, with coefficient
/// |g_tt| / sqrt|det g| and flux sqrt|det g| / g_yy taken from the metric.
/// Validation only. Throws Error(NonTimelike) or Error(DegenerateParametrization).
Accelerations rhs_general(const FieldState& state, const AxisymmetryShape& shape);

/// cfl * h / max_y (C prod r_i^{d_i}); throws Error(DtFloor) below params.dt_floor.
double cfl_dt(const FieldState& state, GaugeConstant C, const AxisymmetryShape& shape,
              const SolverParams& params);

/// One classical RK4 step of (u, v)' = (v, a(u, v)) for any acceleration
/// functor; k1 may be supplied when the caller already evaluated it.
template <typename Rhs>
FieldState rk4_step(const FieldState& s0, double dt, Rhs&& rhs, const Accelerations* k1 = nullptr);

/// rk4_step with rhs_reduced. Throws Error(NaNDetected) on non-finite output.
FieldState step_rk4(const FieldState& state, double dt, GaugeConstant C,
                    const AxisymmetryShape& shape);

/// Called with the physical-orientation state at every stored record.
using RecordObserver = std::function<void(const FieldState&, const DiagnosticsRecord&)>;

/// Integrates until the horizon or the first breakdown condition. Backward
/// runs evolve the time-reflected state forward.
RunResult evolve(const FieldState& initial, GaugeConstant C, const AxisymmetryShape& shape,
                 const SolverParams& params, Direction direction,
                 const RecordObserver& observer = {});

/// Velocities negated, time kept.
FieldState time_reflect(const FieldState& state);

namespace detail {
void axpy_into(FieldBlock& out, const FieldBlock& base, double a, const FieldBlock& x);
}

template <typename Rhs>
FieldState rk4_step(const FieldState& s0, double dt, Rhs&& rhs, const Accelerations* k1) {
  const Accelerations a1 = k1 ? *k1 : rhs(s0);

  FieldState s1 = s0;
  detail::axpy_into(s1.z, s0.z, 0.5 * dt, s0.vz);
  detail::axpy_into(s1.r, s0.r, 0.5 * dt, s0.vr);
  detail::axpy_into(s1.vz, s0.vz, 0.5 * dt, a1.z);
  detail::axpy_into(s1.vr, s0.vr, 0.5 * dt, a1.r);
  s1.t = s0.t + 0.5 * dt;
  const Accelerations a2 = rhs(s1);

  FieldState s2 = s0;
  detail::axpy_into(s2.z, s0.z, 0.5 * dt, s1.vz);
  detail::axpy_into(s2.r, s0.r, 0.5 * dt, s1.vr);
  detail::axpy_into(s2.vz, s0.vz, 0.5 * dt, a2.z);
  detail::axpy_into(s2.vr, s0.vr, 0.5 * dt, a2.r);
  s2.t = s1.t;
  const Accelerations a3 = rhs(s2);

  FieldState s3 = s0;
  detail::axpy_into(s3.z, s0.z, dt, s2.vz);
  detail::axpy_into(s3.r, s0.r, dt, s2.vr);
  detail::axpy_into(s3.vz, s0.vz, dt, a3.z);
  detail::axpy_into(s3.vr, s0.vr, dt, a3.r);
  s3.t = s0.t + dt;
  const Accelerations a4 = rhs(s3);

  FieldState out = s0;
  const double w = dt / 6.0;
  auto combine = [w](FieldBlock& dst, const FieldBlock& k1b, const FieldBlock& k2b,
                     const FieldBlock& k3b, const FieldBlock& k4b) {
    auto d = dst.values();
    auto p1 = k1b.values();
    auto p2 = k2b.values();
    auto p3 = k3b.values();
    auto p4 = k4b.values();
    for (std::size_t i = 0; i < d.size(); ++i) {
      d[i] += w * (p1[i] + 2.0 * p2[i] + 2.0 * p3[i] + p4[i]);
    }
  };
  combine(out.z, s0.vz, s1.vz, s2.vz, s3.vz);
  combine(out.r, s0.vr, s1.vr, s2.vr, s3.vr);
  combine(out.vz, a1.z, a2.z, a3.z, a4.z);
  combine(out.vr, a1.r, a2.r, a3.r, a4.r);
  out.t = s0.t + dt;
  return out;
}

}  // namespace membrane
