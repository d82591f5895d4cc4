#include "membrane/gauge.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "membrane/error.hpp"

namespace membrane {

namespace {

constexpr double kDegenerateGyy = 1e-14;

void require_nondegenerate(const std::vector<double>& gyy) {
  for (std::size_t j = 0; j < gyy.size(); ++j) {
    if (gyy[j] < kDegenerateGyy) {
      throw Error(ErrorCode::DegenerateParametrization,
                  "g_yy = " + std::to_string(gyy[j]) + " at grid index " + std::to_string(j));
    }
  }
}

// Solves phi(y) = target for y in [lo, hi] where phi is increasing and
// phi(lo) <= target <= phi(hi); Newton steps that leave the bracket fall back
// to bisection.
template <typename Phi, typename DPhi>
double invert_monotone(const Phi& phi, const DPhi& dphi, double target, double lo, double hi,
                       double phi_lo, double phi_hi) {
  double y = phi_hi > phi_lo ? lo + (hi - lo) * (target - phi_lo) / (phi_hi - phi_lo) : lo;
  for (int it = 0; it < 100; ++it) {
    const double f = phi(y) - target;
    if (f > 0.0) {
      hi = y;
    } else {
      lo = y;
    }
    const double slope = dphi(y);
    double next = slope > 0.0 ? y - f / slope : 0.5 * (lo + hi);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::abs(next - y) <= 4e-16 * kTwoPi) return next;
    y = next;
  }
  return y;
}

FieldBlock resample_block(const FieldBlock& block, Resampler kind,
                          const std::vector<double>& positions) {
  FieldBlock out(block.rows(), block.cols());
  for (int i = 0; i < block.rows(); ++i) {
    const auto interp = make_interpolant(kind, block.row(i));
    auto dst = out.row(i);
    for (std::size_t j = 0; j < positions.size(); ++j) dst[j] = interp->value(positions[j]);
  }
  return out;
}

struct DensityProfile {
  std::vector<double> w;  // sqrt|det g| / |g_tt| = prod r^d sqrt(g_yy / |g_tt|)
  double mean = 0.0;
  double spread = 0.0;
};

DensityProfile density_profile(const FieldState& state, const AxisymmetryShape& shape) {
  const MetricField g = compute_metric(state, shape);
  require_nondegenerate(g.gyy);
  const std::vector<double> vol = radius_product(state, shape, 1);
  DensityProfile p;
  p.w.resize(g.gtt.size());
  double sum = 0.0;
  for (std::size_t j = 0; j < p.w.size(); ++j) {
    p.w[j] = vol[j] * std::sqrt(g.gyy[j] / std::abs(g.gtt[j]));
    sum += p.w[j];
  }
  p.mean = sum / static_cast<double>(p.w.size());
  for (double v : p.w) p.spread = std::max(p.spread, std::abs(p.mean / v - 1.0));
  return p;
}

}  // namespace

GaugeConstant::GaugeConstant(double c) : value_(c) {
  if (!(std::isfinite(c) && c > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "gauge constant must be finite and positive");
  }
}

FieldState comoving_project(const FieldState& state) {
  const int n = state.n();
  const FieldBlock dz = spatial_derivative(state.z);
  const FieldBlock dr = spatial_derivative(state.r);
  std::vector<double> gyy(static_cast<std::size_t>(n), 0.0);
  std::vector<double> gty(static_cast<std::size_t>(n), 0.0);
  auto accumulate = [&](const FieldBlock& v, const FieldBlock& d) {
    for (int i = 0; i < v.rows(); ++i) {
      for (int j = 0; j < n; ++j) {
        gyy[static_cast<std::size_t>(j)] += d(i, j) * d(i, j);
        gty[static_cast<std::size_t>(j)] += v(i, j) * d(i, j);
      }
    }
  };
  accumulate(state.vz, dz);
  accumulate(state.vr, dr);
  require_nondegenerate(gyy);

  FieldState out = state;
  auto project = [&](FieldBlock& v, const FieldBlock& d) {
    for (int i = 0; i < v.rows(); ++i) {
      for (int j = 0; j < n; ++j) {
        const auto q = static_cast<std::size_t>(j);
        v(i, j) -= gty[q] / gyy[q] * d(i, j);
      }
    }
  };
  project(out.vz, dz);
  project(out.vr, dr);
  return out;
}

GaugeFixResult fix_parametrization(const FieldState& state, const AxisymmetryShape& shape,
                                   const GaugeFixOptions& options) {
  validate_state(state, shape);
  const int n = state.n();
  const double h = grid_spacing(n);

  FieldState current = state;
  for (int iteration = 0;; ++iteration) {
    const DensityProfile p = density_profile(current, shape);
    const double C = 1.0 / p.mean;
    if (p.spread <= options.spread_tolerance || iteration >= options.max_iterations) {
      return {std::move(current), GaugeConstant(C), iteration, p.spread};
    }

    // New coordinate ytilde(y) = C * int_0^y w, which has period exactly 2 pi
    // because C is the reciprocal of the (trapezoidal) mean of w.
    const auto w = make_interpolant(options.resampler, p.w);
    auto phi = [&](double y) { return C * w->antiderivative(y); };
    auto dphi = [&](double y) { return C * w->value(y); };

    std::vector<double> node_phi(static_cast<std::size_t>(n) + 1);
    for (int i = 0; i <= n; ++i) node_phi[static_cast<std::size_t>(i)] = phi(i * h);

    std::vector<double> positions(static_cast<std::size_t>(n));
    positions[0] = 0.0;
    std::size_t seg = 0;
    for (int j = 1; j < n; ++j) {
      const double target = grid_point(j, n);
      while (seg + 1 < node_phi.size() - 1 && node_phi[seg + 1] <= target) ++seg;
      positions[static_cast<std::size_t>(j)] =
          invert_monotone(phi, dphi, target, static_cast<double>(seg) * h,
                          static_cast<double>(seg + 1) * h, node_phi[seg], node_phi[seg + 1]);
    }

    FieldState next;
    next.t = current.t;
    next.z = resample_block(current.z, options.resampler, positions);
    next.r = resample_block(current.r, options.resampler, positions);
    next.vz = resample_block(current.vz, options.resampler, positions);
    next.vr = resample_block(current.vr, options.resampler, positions);
    validate_state(next, shape);
    current = std::move(next);
  }
}

GaugeFixResult prepare_gauged_data(const FieldState& state, const AxisymmetryShape& shape,
                                   const GaugeFixOptions& options, int rounds) {
  FieldState s = state;
  for (int round = 0;; ++round) {
    s = comoving_project(s);
    GaugeFixResult res = fix_parametrization(s, shape, options);
    const MetricField g = metric_components(res.state, shape);
    double y_rel = 0.0;
    for (std::size_t j = 0; j < g.gty.size(); ++j) {
      y_rel = std::max(y_rel, std::abs(g.gty[j]) / std::sqrt(g.gyy[j]));
    }
    if ((y_rel <= options.spread_tolerance && res.spread <= options.spread_tolerance) ||
        round + 1 >= rounds) {
      return res;
    }
    s = std::move(res.state);
  }
}

GaugeResiduals gauge_residuals(const FieldState& state, GaugeConstant C,
                               const AxisymmetryShape& shape) {
  const MetricField g = metric_components(state, shape);
  const std::vector<double> R = radius_product(state, shape, 2);
  const double c2 = C.value() * C.value();
  const double h = grid_spacing(state.n());

  GaugeResiduals res;
  res.X.resize(g.gtt.size());
  res.Y = g.gty;
  double x2 = 0.0;
  double y2 = 0.0;
  for (std::size_t j = 0; j < res.X.size(); ++j) {
    res.X[j] = g.gtt[j] / R[j] + c2 * g.gyy[j];
    res.x_inf = std::max(res.x_inf, std::abs(res.X[j]));
    res.y_inf = std::max(res.y_inf, std::abs(res.Y[j]));
    x2 += res.X[j] * res.X[j];
    y2 += res.Y[j] * res.Y[j];
  }
  res.x_l2 = std::sqrt(h * x2);
  res.y_l2 = std::sqrt(h * y2);
  return res;
}

double gauge_energy(const FieldState& state, GaugeConstant C, const AxisymmetryShape& shape) {
  const GaugeResiduals res = gauge_residuals(state, C, shape);
  const std::vector<double> R = radius_product(state, shape, 2);
  const double c2 = C.value() * C.value();
  double sum = 0.0;
  for (std::size_t j = 0; j < R.size(); ++j) {
    sum += res.Y[j] * res.Y[j] + R[j] * res.X[j] * res.X[j] / (4.0 * c2);
  }
  return grid_spacing(state.n()) * sum;
}

}  // namespace membrane
