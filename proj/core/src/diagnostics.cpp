#include "membrane/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "membrane/error.hpp"

namespace membrane {

namespace {

// Rounding allowance per mean-radius sample, in units of max rbar_j.
constexpr double kSampleRounding = 8.0 * std::numeric_limits<double>::epsilon();

}  // namespace

DensityField conserved_density(const FieldState& state, GaugeConstant C,
                               const AxisymmetryShape& shape) {
  const MetricField g = compute_metric(state, shape);
  DensityField out;
  out.values.resize(g.gtt.size());
  for (std::size_t j = 0; j < out.values.size(); ++j) {
    out.values[j] = g.sqrt_det[j] / std::abs(g.gtt[j]);
    out.spread = std::max(out.spread, std::abs(C.value() * out.values[j] - 1.0));
  }
  return out;
}

std::vector<double> mean_radii(const FieldState& state) {
  std::vector<double> out(static_cast<std::size_t>(state.r.rows()), 0.0);
  for (int i = 0; i < state.r.rows(); ++i) {
    // Neumaier summation keeps the record-to-record noise at a few ulps.
    double sum = 0.0;
    double carry = 0.0;
    for (double v : state.r.row(i)) {
      const double t = sum + v;
      carry += std::abs(sum) >= std::abs(v) ? (sum - t) + v : (v - t) + sum;
      sum = t;
    }
    out[static_cast<std::size_t>(i)] = (sum + carry) / state.n();
  }
  return out;
}

double gtt_integral(const FieldState& state) {
  double sum = 0.0;
  for (double v2 : squared_speed(state)) sum += std::abs(v2 - 1.0);
  return grid_spacing(state.n()) * sum;
}

DiagnosticsRecord make_record(const FieldState& state, GaugeConstant C,
                              const AxisymmetryShape& shape) {
  DiagnosticsRecord rec;
  rec.t = state.t;
  const MetricField g = compute_metric(state, shape);
  rec.min_indicator = immersivity_indicator(state, g, shape).min;
  rec.mean_radii = mean_radii(state);
  for (std::size_t j = 0; j < g.gtt.size(); ++j) {
    rec.density_spread =
        std::max(rec.density_spread, std::abs(C.value() * g.sqrt_det[j] / std::abs(g.gtt[j]) - 1.0));
  }
  const GaugeResiduals res = gauge_residuals(state, C, shape);
  rec.x_inf = res.x_inf;
  rec.y_inf = res.y_inf;
  for (double v : radius_product(state, shape, 1)) {
    rec.max_speed = std::max(rec.max_speed, C.value() * v);
  }
  double v2max = 0.0;
  for (double v2 : squared_speed(state)) v2max = std::max(v2max, v2);
  rec.velocity_margin = 1.0 - v2max;
  rec.gtt_integral = gtt_integral(state);
  rec.max_radii.resize(static_cast<std::size_t>(shape.k()));
  for (int i = 0; i < shape.k(); ++i) {
    const auto row = state.r.row(i);
    rec.max_radii[static_cast<std::size_t>(i)] = *std::max_element(row.begin(), row.end());
  }
  return rec;
}

std::vector<double> mean_radius_second_differences(std::span<const DiagnosticsRecord> records,
                                                   int j) {
  std::vector<double> out;
  if (records.size() < 3) return out;
  const auto q = static_cast<std::size_t>(j);
  for (std::size_t i = 1; i + 1 < records.size(); ++i) {
    const double h0 = records[i].t - records[i - 1].t;
    const double h1 = records[i + 1].t - records[i].t;
    const double f0 = records[i - 1].mean_radii[q];
    const double f1 = records[i].mean_radii[q];
    const double f2 = records[i + 1].mean_radii[q];
    out.push_back(2.0 * ((f2 - f1) / h1 - (f1 - f0) / h0) / (h0 + h1));
  }
  return out;
}

std::vector<ConvexityVerdict> convexity_check(std::span<const DiagnosticsRecord> records) {
  if (records.size() < 3) {
    throw Error(ErrorCode::InsufficientHistory, "convexity check needs at least 3 records");
  }
  const std::size_t k = records.front().mean_radii.size();
  std::vector<ConvexityVerdict> verdicts(k);
  for (std::size_t j = 0; j < k; ++j) {
    double scale = 0.0;
    for (const auto& rec : records) scale = std::max(scale, std::abs(rec.mean_radii[j]));
    ConvexityVerdict& v = verdicts[j];
    v.tolerance = 1e-8 * scale;
    v.max_second_difference = -std::numeric_limits<double>::infinity();
    const std::vector<double> d2 = mean_radius_second_differences(records, static_cast<int>(j));
    for (std::size_t i = 0; i < d2.size(); ++i) {
      const double h0 = std::abs(records[i + 1].t - records[i].t);
      const double h1 = std::abs(records[i + 2].t - records[i + 1].t);
      // Worst-case effect of sample rounding on the quotient.
      const double rounding = 4.0 * kSampleRounding * scale * (1.0 / h0 + 1.0 / h1) / (h0 + h1);
      v.max_second_difference = std::max(v.max_second_difference, d2[i]);
      if (!(d2[i] < v.tolerance + rounding) && v.first_violation < 0) {
        v.convex = false;
        v.first_violation = static_cast<int>(i + 1);
      }
    }
  }
  return verdicts;
}

BoundsVerdict apriori_bounds(std::span<const DiagnosticsRecord> records, double tolerance) {
  BoundsVerdict v;
  v.max_lipschitz_excess = -std::numeric_limits<double>::infinity();
  if (records.empty()) return v;
  const DiagnosticsRecord& first = records.front();
  for (std::size_t i = 0; i < records.size(); ++i) {
    const DiagnosticsRecord& rec = records[i];
    bool ok = true;
    v.min_velocity_margin = std::min(v.min_velocity_margin, rec.velocity_margin);
    if (!(rec.velocity_margin > 0.0)) {
      v.velocity_ok = false;
      ok = false;
    }
    for (std::size_t j = 0; j < rec.max_radii.size(); ++j) {
      const double excess = rec.max_radii[j] - first.max_radii[j] - std::abs(rec.t - first.t);
      v.max_lipschitz_excess = std::max(v.max_lipschitz_excess, excess);
      if (!(excess <= tolerance)) {
        v.lipschitz_ok = false;
        ok = false;
      }
    }
    if (!ok && v.first_violation < 0) v.first_violation = static_cast<int>(i);
  }
  return v;
}

}  // namespace membrane
