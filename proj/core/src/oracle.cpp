#include "membrane/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <span>
#include <sstream>

#include <boost/numeric/odeint.hpp>

#include "membrane/error.hpp"

namespace membrane::oracle {

namespace odeint = boost::numeric::odeint;

namespace {

using OdeState = std::vector<double>;

// Layout: [rho, a_1..a_k, rho_dot, a_dot_1..a_dot_k].
struct HomogeneousSystem {
  double C;
  std::vector<int> dims;

  void operator()(const OdeState& x, OdeState& dxdt, double /*t*/) const {
    const std::size_t k = dims.size();
    double R = 1.0;
    for (std::size_t i = 0; i < k; ++i) R *= std::pow(x[1 + i], 2 * dims[i]);
    // |g_tt| through the gauge identity C^2 rho^2 prod a^{2d}, which stays
    // accurate where 1 - v^2 cancels.
    const double abs_gtt = C * C * R * x[0] * x[0];
    dxdt[0] = x[k + 1];
    dxdt[k + 1] = -C * C * R * x[0];
    for (std::size_t i = 0; i < k; ++i) {
      dxdt[1 + i] = x[k + 2 + i];
      dxdt[k + 2 + i] = -dims[i] * abs_gtt / x[1 + i];
    }
  }
};

OdeState pack(const CliffordState& s) {
  OdeState x;
  x.push_back(s.rho);
  x.insert(x.end(), s.a.begin(), s.a.end());
  x.push_back(s.rho_dot);
  x.insert(x.end(), s.a_dot.begin(), s.a_dot.end());
  return x;
}

CliffordState unpack(const OdeState& x, double t, double C, std::size_t k) {
  CliffordState s;
  s.t = t;
  s.C = C;
  s.rho = x[0];
  s.a.assign(x.begin() + 1, x.begin() + 1 + static_cast<long>(k));
  s.rho_dot = x[k + 1];
  s.a_dot.assign(x.begin() + 2 + static_cast<long>(k), x.end());
  return s;
}

double stopping_quantity(const OdeState& x, std::size_t k, double C, std::span<const int> dims) {
  double q = x[0];
  double R = 1.0;
  for (std::size_t i = 0; i < k; ++i) {
    q = std::min(q, x[1 + i]);
    R *= std::pow(x[1 + i], 2 * dims[i]);
  }
  q = std::min(q, C * C * R * x[0] * x[0]);
  return std::isfinite(q) ? q : -1.0;
}

void check_shape(const CliffordState& s, const AxisymmetryShape& shape) {
  if (static_cast<int>(s.a.size()) != shape.k() || s.a_dot.size() != s.a.size()) {
    throw Error(ErrorCode::DimensionMismatch, "homogeneous state does not match the shape");
  }
  if (shape.m() < 2) {
    throw Error(ErrorCode::DimensionMismatch, "homogeneous ansatz needs a z-target of dimension >= 2");
  }
}

}  // namespace

CliffordState make_state(double rho, double a, double rho_dot, double a_dot) {
  return make_state(rho, std::vector<double>{a}, rho_dot, std::vector<double>{a_dot},
                    AxisymmetryShape::clifford());
}

CliffordState make_state(double rho, std::vector<double> a, double rho_dot,
                         std::vector<double> a_dot, const AxisymmetryShape& shape) {
  CliffordState s;
  s.rho = rho;
  s.rho_dot = rho_dot;
  s.a = std::move(a);
  s.a_dot = std::move(a_dot);
  check_shape(s, shape);
  const double g = abs_gtt(s);
  if (!(g > 0.0)) throw Error(ErrorCode::NonTimelike, "homogeneous state is not time-like");
  double vol = rho;
  for (int i = 0; i < shape.k(); ++i) {
    if (!(s.a[static_cast<std::size_t>(i)] > 0.0)) {
      throw Error(ErrorCode::NonPositiveRadius, "sphere radius must be positive");
    }
    vol *= std::pow(s.a[static_cast<std::size_t>(i)], shape.d(i));
  }
  if (!(rho > 0.0)) throw Error(ErrorCode::NonPositiveRadius, "rho must be positive");
  s.C = std::sqrt(g) / vol;
  return s;
}

double abs_gtt(const CliffordState& s) {
  double v2 = s.rho_dot * s.rho_dot;
  for (double v : s.a_dot) v2 += v * v;
  return 1.0 - v2;
}

double stopping_quantity(const CliffordState& s, const AxisymmetryShape& shape) {
  check_shape(s, shape);
  return stopping_quantity(pack(s), s.a.size(), s.C, shape.sphere_dims());
}

CliffordAccel clifford_rhs(const CliffordState& s, const AxisymmetryShape& shape) {
  check_shape(s, shape);
  if (!(s.rho > 0.0)) throw Error(ErrorCode::NonPositiveRadius, "rho must be positive");
  for (double a : s.a) {
    if (!(a > 0.0)) throw Error(ErrorCode::NonPositiveRadius, "sphere radius must be positive");
  }
  if (!(abs_gtt(s) > 0.0)) throw Error(ErrorCode::NonTimelike, "homogeneous state is not time-like");
  HomogeneousSystem sys{s.C, {shape.sphere_dims().begin(), shape.sphere_dims().end()}};
  const OdeState x = pack(s);
  OdeState dx(x.size());
  sys(x, dx, s.t);
  const std::size_t k = s.a.size();
  CliffordAccel out;
  out.rho_ddot = dx[k + 1];
  out.a_ddot.assign(dx.begin() + 2 + static_cast<long>(k), dx.end());
  return out;
}

OracleResult clifford_integrate(const CliffordState& s0, const IntegrateOptions& options) {
  check_shape(s0, options.shape);
  const std::size_t k = s0.a.size();
  const bool forward = options.direction == Direction::Forward;
  const double sign = forward ? 1.0 : -1.0;

  HomogeneousSystem sys{s0.C,
                        {options.shape.sphere_dims().begin(), options.shape.sphere_dims().end()}};
  OdeState x = pack(s0);
  if (!forward) {
    for (std::size_t i = k + 1; i < x.size(); ++i) x[i] = -x[i];
  }

  auto physical = [&](const OdeState& state, double tau) {
    CliffordState s = unpack(state, s0.t + sign * tau, s0.C, k);
    if (!forward) {
      s.rho_dot = -s.rho_dot;
      for (double& v : s.a_dot) v = -v;
    }
    return s;
  };

  std::vector<double> sample_tau;
  for (double ts : options.sample_times) {
    const double tau = sign * (ts - s0.t);
    if (tau > 0.0) sample_tau.push_back(tau);
  }
  std::sort(sample_tau.begin(), sample_tau.end());
  std::size_t next_sample = 0;

  using Stepper = odeint::runge_kutta_dopri5<OdeState>;
  auto controlled = odeint::make_controlled(options.tol, options.tol, Stepper());

  OracleResult result;
  result.trajectory.push_back(physical(x, 0.0));
  if (stopping_quantity(x, k, s0.C, sys.dims) < options.stop_floor) {
    result.collapse_time = s0.t;
    return result;
  }

  double tau = 0.0;
  double dt = 1e-3;
  while (tau < options.horizon) {
    double trial = std::min(dt, options.horizon - tau);
    bool hits_sample = false;
    if (next_sample < sample_tau.size() && tau + trial >= sample_tau[next_sample]) {
      trial = sample_tau[next_sample] - tau;
      hits_sample = true;
    }
    const OdeState x_prev = x;
    const double tau_prev = tau;
    double step = trial;
    if (controlled.try_step(sys, x, tau, step) == odeint::fail) {
      dt = step;
      continue;
    }
    if (!hits_sample || trial >= dt) dt = step;
    const double taken = tau - tau_prev;

    if (stopping_quantity(x, k, s0.C, sys.dims) < options.stop_floor) {
      // Bisect the step length for the first floor crossing.
      double lo = 0.0;
      double hi = taken;
      OdeState probe(x.size());
      OdeState at_hi = x;
      while (hi - lo > options.time_resolution) {
        const double mid = 0.5 * (lo + hi);
        Stepper plain;
        plain.do_step(sys, x_prev, tau_prev, probe, mid);
        if (stopping_quantity(probe, k, s0.C, sys.dims) < options.stop_floor) {
          hi = mid;
          at_hi = probe;
        } else {
          lo = mid;
        }
      }
      result.collapse_time = s0.t + sign * (tau_prev + hi);
      result.trajectory.push_back(physical(at_hi, tau_prev + hi));
      return result;
    }

    result.trajectory.push_back(physical(x, tau));
    if (hits_sample && std::abs(tau - sample_tau[next_sample]) <= 1e-14 * std::max(1.0, tau)) {
      tau = sample_tau[next_sample];
      result.samples.push_back(physical(x, tau));
      ++next_sample;
    }
  }
  return result;
}

double stencil_symbol(int n) {
  const double h = grid_spacing(n);
  return (8.0 * std::sin(h) - std::sin(2.0 * h)) / (6.0 * h);
}

LiftedState lift_to_grid(const CliffordState& s, int n, const AxisymmetryShape& shape) {
  check_shape(s, shape);
  FieldState f = FieldState::at_rest(shape, n, s.t);
  for (int j = 0; j < n; ++j) {
    const double y = grid_point(j, n);
    f.z(0, j) = s.rho * std::cos(y);
    f.z(1, j) = s.rho * std::sin(y);
    f.vz(0, j) = s.rho_dot * std::cos(y);
    f.vz(1, j) = s.rho_dot * std::sin(y);
    for (int i = 0; i < shape.k(); ++i) {
      f.r(i, j) = s.a[static_cast<std::size_t>(i)];
      f.vr(i, j) = s.a_dot[static_cast<std::size_t>(i)];
    }
  }
  return {std::move(f), GaugeConstant(s.C / stencil_symbol(n))};
}

double rest_collapse_time(double rho0, double a0, double tol) {
  IntegrateOptions opts;
  opts.tol = tol;
  const OracleResult res = clifford_integrate(make_state(rho0, a0), opts);
  if (!res.collapse_time) {
    throw Error(ErrorCode::InvariantViolation, "rest data did not collapse before the horizon");
  }
  return *res.collapse_time;
}

GoldenTable read_golden(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open golden file " + path.string());
  GoldenTable table;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream ss(line);
    std::string name;
    if (!(ss >> name)) continue;
    GoldenConstant c;
    if (!(ss >> c.value >> c.tolerance)) {
      throw Error(ErrorCode::IoError,
                  path.string() + ":" + std::to_string(lineno) + ": expected 'name value tolerance'");
    }
    table[name] = c;
  }
  return table;
}

void write_golden(const std::filesystem::path& path, const GoldenTable& table) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::IoError, "cannot write golden file " + path.string());
  out << "# name value tolerance\n" << std::setprecision(17);
  for (const auto& [name, c] : table) out << name << ' ' << c.value << ' ' << c.tolerance << '\n';
}

GoldenTable compute_reference_constants() {
  GoldenTable t;
  t["clifford_rest_collapse_time"] = {rest_collapse_time(1.0, 1.0, 1e-12), 1e-9};
  return t;
}

}  // namespace membrane::oracle
