#include "membrane/evolution.hpp"

#include <algorithm>
#include <utility>
#include <cmath>
#include <limits>
#include <sstream>

#include "membrane/error.hpp"

namespace membrane {

namespace detail {

void axpy_into(FieldBlock& out, const FieldBlock& base, double a, const FieldBlock& x) {
  auto o = out.values();
  auto b = base.values();
  auto v = x.values();
  for (std::size_t i = 0; i < o.size(); ++i) o[i] = b[i] + a * v[i];
}

}  // namespace detail

namespace {

void require_positive_radii(const FieldState& state) {
  for (double v : state.r.values()) {
    if (!(v > 0.0)) throw Error(ErrorCode::NonPositiveRadius, "radius reached zero");
  }
}

std::vector<double> abs_gtt_checked(const FieldState& state) {
  std::vector<double> a = squared_speed(state);
  for (std::size_t j = 0; j < a.size(); ++j) {
    a[j] = 1.0 - a[j];
    if (!(a[j] > 0.0)) {
      throw Error(ErrorCode::NonTimelike, "generatrix speed reached 1 at grid index " +
                                              std::to_string(j));
    }
  }
  return a;
}

// out = scale * D(weight * D u), with an optional pointwise prefactor.
void divergence_term(std::span<const double> u, std::span<const double> weight, double scale,
                     std::span<const double> prefactor, std::span<double> out,
                     std::vector<double>& scratch) {
  const std::size_t n = u.size();
  scratch.resize(n);
  spatial_derivative(u, scratch);
  for (std::size_t j = 0; j < n; ++j) scratch[j] *= weight[j];
  spatial_derivative(scratch, out);
  if (prefactor.empty()) {
    for (std::size_t j = 0; j < n; ++j) out[j] *= scale;
  } else {
    for (std::size_t j = 0; j < n; ++j) out[j] *= scale * prefactor[j];
  }
}

void subtract_source(Accelerations& acc, const FieldState& state, const AxisymmetryShape& shape,
                     const std::vector<double>& abs_gtt) {
  for (int i = 0; i < shape.k(); ++i) {
    auto row = acc.r.row(i);
    const double d = shape.d(i);
    for (int j = 0; j < state.n(); ++j) {
      row[j] -= d * abs_gtt[static_cast<std::size_t>(j)] / state.r(i, j);
    }
  }
}

bool all_finite(const FieldState& s) {
  for (const FieldBlock* b : {&s.z, &s.r, &s.vz, &s.vr}) {
    for (double v : b->values()) {
      if (!std::isfinite(v)) return false;
    }
  }
  return true;
}

// fraction * min over points where the indicator decreases of I / |dI/dt|.
double indicator_rate_dt(const FieldState& s, const Accelerations& acc,
                         const AxisymmetryShape& shape, double fraction) {
  double tau = std::numeric_limits<double>::infinity();
  for (int j = 0; j < s.n(); ++j) {
    double v2 = 0.0;
    double power = 0.0;  // (1/2) d(v^2)/dt
    for (int a = 0; a < shape.m(); ++a) {
      v2 += s.vz(a, j) * s.vz(a, j);
      power += s.vz(a, j) * acc.z(a, j);
    }
    double prod = 1.0;
    double log_rate = 0.0;
    for (int i = 0; i < shape.k(); ++i) {
      v2 += s.vr(i, j) * s.vr(i, j);
      power += s.vr(i, j) * acc.r(i, j);
      prod *= s.r(i, j);
      log_rate += s.vr(i, j) / s.r(i, j);
    }
    const double abs_gtt = 1.0 - v2;
    const double indicator = abs_gtt * prod;
    const double rate = -2.0 * power * prod + indicator * log_rate;
    if (rate < 0.0) tau = std::min(tau, indicator / -rate);
  }
  return fraction * tau;
}

}  // namespace

void SolverParams::validate() const {
  auto positive = [](double v, const char* name) {
    if (!(std::isfinite(v) && v > 0.0)) {
      throw Error(ErrorCode::InvalidArgument, std::string(name) + " must be positive");
    }
  };
  positive(cfl, "cfl");
  positive(t_end, "t_end");
  positive(indicator_floor, "indicator_floor");
  positive(radius_floor, "radius_floor");
  positive(dt_floor, "dt_floor");
  positive(indicator_step_fraction, "indicator_step_fraction");
  positive(initial_gauge_tolerance, "initial_gauge_tolerance");
  if (cfl > 1.0) throw Error(ErrorCode::InvalidArgument, "cfl must not exceed 1");
  if (record_every < 1) throw Error(ErrorCode::InvalidArgument, "record_every must be >= 1");
  if (max_steps < 1) throw Error(ErrorCode::InvalidArgument, "max_steps must be >= 1");
}

std::string_view to_string(Direction d) noexcept {
  return d == Direction::Forward ? "forward" : "backward";
}

std::string_view to_string(Termination t) noexcept {
  switch (t) {
    case Termination::HorizonReached: return "HorizonReached";
    case Termination::IndicatorFloor: return "IndicatorFloor";
    case Termination::RadiusFloor: return "RadiusFloor";
    case Termination::DtFloor: return "DtFloor";
    case Termination::NonTimelike: return "NonTimelike";
    case Termination::NaNDetected: return "NaNDetected";
    case Termination::MaxSteps: return "MaxSteps";
  }
  return "Unknown";
}

Direction parse_direction(std::string_view s) {
  if (s == "forward") return Direction::Forward;
  if (s == "backward") return Direction::Backward;
  throw Error(ErrorCode::InvalidArgument, "unknown direction '" + std::string(s) + "'");
}

Termination parse_termination(std::string_view s) {
  for (Termination t : {Termination::HorizonReached, Termination::IndicatorFloor,
                        Termination::RadiusFloor, Termination::DtFloor, Termination::NonTimelike,
                        Termination::NaNDetected, Termination::MaxSteps}) {
    if (to_string(t) == s) return t;
  }
  throw Error(ErrorCode::InvalidArgument, "unknown termination '" + std::string(s) + "'");
}

Accelerations rhs_reduced(const FieldState& state, GaugeConstant C,
                          const AxisymmetryShape& shape) {
  require_positive_radii(state);
  const std::vector<double> abs_gtt = abs_gtt_checked(state);
  const std::vector<double> R = radius_product(state, shape, 2);
  const double c2 = C.value() * C.value();

  Accelerations acc{FieldBlock(shape.m(), state.n()), FieldBlock(shape.k(), state.n())};
  std::vector<double> scratch;
  for (int a = 0; a < shape.m(); ++a) {
    divergence_term(state.z.row(a), R, c2, {}, acc.z.row(a), scratch);
  }
  for (int i = 0; i < shape.k(); ++i) {
    divergence_term(state.r.row(i), R, c2, {}, acc.r.row(i), scratch);
  }
  subtract_source(acc, state, shape, abs_gtt);
  return acc;
}

Accelerations rhs_general(const FieldState& state, const AxisymmetryShape& shape) {
  require_positive_radii(state);
  const MetricField g = compute_metric(state, shape);
  const std::size_t n = g.gtt.size();
  std::vector<double> abs_gtt(n), coefficient(n), flux(n);
  for (std::size_t j = 0; j < n; ++j) {
    if (g.gyy[j] < 1e-14) {
      throw Error(ErrorCode::DegenerateParametrization,
                  "g_yy vanishes at grid index " + std::to_string(j));
    }
    abs_gtt[j] = std::abs(g.gtt[j]);
    coefficient[j] = abs_gtt[j] / g.sqrt_det[j];
    flux[j] = g.sqrt_det[j] / g.gyy[j];
  }

  Accelerations acc{FieldBlock(shape.m(), state.n()), FieldBlock(shape.k(), state.n())};
  std::vector<double> scratch;
  for (int a = 0; a < shape.m(); ++a) {
    divergence_term(state.z.row(a), flux, 1.0, coefficient, acc.z.row(a), scratch);
  }
  for (int i = 0; i < shape.k(); ++i) {
    divergence_term(state.r.row(i), flux, 1.0, coefficient, acc.r.row(i), scratch);
  }
  subtract_source(acc, state, shape, abs_gtt);
  return acc;
}

double cfl_dt(const FieldState& state, GaugeConstant C, const AxisymmetryShape& shape,
              const SolverParams& params) {
  require_positive_radii(state);
  double speed = 0.0;
  for (double v : radius_product(state, shape, 1)) speed = std::max(speed, C.value() * v);
  const double dt = params.cfl * grid_spacing(state.n()) / speed;
  if (!(dt >= params.dt_floor)) {
    throw Error(ErrorCode::DtFloor, "CFL step " + std::to_string(dt) + " below the floor");
  }
  return dt;
}

FieldState step_rk4(const FieldState& state, double dt, GaugeConstant C,
                    const AxisymmetryShape& shape) {
  FieldState out = rk4_step(
      state, dt, [&](const FieldState& s) { return rhs_reduced(s, C, shape); });
  if (!all_finite(out)) throw Error(ErrorCode::NaNDetected, "non-finite entry after RK4 step");
  return out;
}

FieldState time_reflect(const FieldState& state) {
  FieldState out = state;
  for (double& v : out.vz.values()) v = -v;
  for (double& v : out.vr.values()) v = -v;
  return out;
}

RunResult evolve(const FieldState& initial, GaugeConstant C, const AxisymmetryShape& shape,
                 const SolverParams& params, Direction direction, const RecordObserver& observer) {
  params.validate();
  validate_state(initial, shape);
  compute_metric(initial, shape);
  const GaugeResiduals res0 = gauge_residuals(initial, C, shape);
  if (res0.x_inf > params.initial_gauge_tolerance || res0.y_inf > params.initial_gauge_tolerance) {
    std::ostringstream msg;
    msg << "initial data is not gauged: max|X| = " << res0.x_inf << ", max|Y| = " << res0.y_inf;
    throw Error(ErrorCode::InvalidArgument, msg.str());
  }

  const bool forward = direction == Direction::Forward;
  const double t0 = initial.t;
  const double sign = forward ? 1.0 : -1.0;

  RunResult result;
  result.direction = direction;

  FieldState s = forward ? initial : time_reflect(initial);
  auto push = [&](const FieldState& internal, DiagnosticsRecord rec) {
    if (observer) {
      FieldState physical = forward ? internal : time_reflect(internal);
      physical.t = rec.t;
      observer(physical, rec);
    }
    result.records.push_back(std::move(rec));
  };
  auto record = [&](const FieldState& internal) {
    DiagnosticsRecord rec = make_record(internal, C, shape);
    rec.t = t0 + sign * (internal.t - t0);
    push(internal, std::move(rec));
  };
  record(s);
  bool recorded = true;

  auto finish = [&](Termination t, std::string detail) {
    result.termination = t;
    result.detail = std::move(detail);
  };

  const double horizon_slack = 1e-14 * std::max(1.0, params.t_end);
  for (;;) {
    const double elapsed = s.t - t0;
    const double remaining = params.t_end - elapsed;
    if (remaining <= horizon_slack) {
      finish(Termination::HorizonReached, "");
      break;
    }
    if (result.steps >= params.max_steps) {
      finish(Termination::MaxSteps, "");
      break;
    }

    Accelerations k1;
    double dt = 0.0;
    try {
      k1 = rhs_reduced(s, C, shape);
      dt = cfl_dt(s, C, shape, params);
    } catch (const Error& e) {
      const Termination t = e.code() == ErrorCode::DtFloor        ? Termination::DtFloor
                            : e.code() == ErrorCode::NonTimelike ? Termination::NonTimelike
                                                                 : Termination::RadiusFloor;
      finish(t, e.what());
      break;
    }
    dt = std::min(dt, indicator_rate_dt(s, k1, shape, params.indicator_step_fraction));
    if (dt < params.dt_floor) {
      finish(Termination::DtFloor, "step limited below dt_floor");
      break;
    }
    const bool final_step = dt >= remaining;
    if (final_step) dt = remaining;

    FieldState next;
    try {
      next = rk4_step(s, dt, [&](const FieldState& st) { return rhs_reduced(st, C, shape); }, &k1);
    } catch (const Error& e) {
      const Termination t = e.code() == ErrorCode::NonTimelike ? Termination::NonTimelike
                                                               : Termination::RadiusFloor;
      finish(t, std::string("inside RK stage: ") + e.what());
      break;
    }
    if (final_step) next.t = t0 + params.t_end;
    if (!all_finite(next)) {
      finish(Termination::NaNDetected, "non-finite entry after step");
      break;
    }
    ++result.steps;

    double min_r = std::numeric_limits<double>::infinity();
    for (double v : next.r.values()) min_r = std::min(min_r, v);
    if (!(min_r > 0.0)) {
      finish(Termination::RadiusFloor, "radius crossed zero within one step");
      break;
    }
    double v2max = 0.0;
    for (double v2 : squared_speed(next)) v2max = std::max(v2max, v2);
    if (!(v2max < 1.0)) {
      finish(Termination::NonTimelike, "generatrix speed reached 1");
      break;
    }

    s = std::move(next);
    DiagnosticsRecord rec = make_record(s, C, shape);
    rec.t = t0 + sign * (s.t - t0);
    const bool indicator_hit = rec.min_indicator <= params.indicator_floor;
    const bool radius_hit = min_r <= params.radius_floor;
    recorded = indicator_hit || radius_hit || result.steps % params.record_every == 0;
    if (recorded) push(s, std::move(rec));
    if (indicator_hit) {
      finish(Termination::IndicatorFloor, "");
      break;
    }
    if (radius_hit) {
      finish(Termination::RadiusFloor, "");
      break;
    }
  }
  if (!recorded) record(s);

  result.final_state = forward ? s : time_reflect(s);
  result.final_state.t = t0 + sign * (s.t - t0);
  return result;
}

}  // namespace membrane
