#include "membrane/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "membrane/error.hpp"

namespace membrane {

AxisymmetryShape::AxisymmetryShape(std::vector<int> sphere_dims, int z_dim)
    : sphere_dims_(std::move(sphere_dims)), z_dim_(z_dim) {
  if (sphere_dims_.empty()) {
    throw Error(ErrorCode::InvalidArgument, "axial symmetry needs at least one sphere factor");
  }
  for (int d : sphere_dims_) {
    if (d < 1) {
      throw Error(ErrorCode::InvalidArgument,
                  "sphere dimension must be >= 1, got " + std::to_string(d));
    }
  }
  if (z_dim_ < 1) {
    throw Error(ErrorCode::InvalidArgument, "z dimension must be >= 1");
  }
}

AxisymmetryShape AxisymmetryShape::clifford() { return AxisymmetryShape({1}, 2); }

int AxisymmetryShape::spatial_dim() const noexcept {
  return 1 + std::accumulate(sphere_dims_.begin(), sphere_dims_.end(), 0);
}

int AxisymmetryShape::ambient_dim() const noexcept {
  return z_dim_ + k() + std::accumulate(sphere_dims_.begin(), sphere_dims_.end(), 0);
}

FieldBlock::FieldBlock(int rows, int cols, double fill)
    : rows_(rows),
      cols_(cols),
      data_(static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols), fill) {}

std::span<double> FieldBlock::row(int i) {
  return std::span<double>(data_).subspan(index(i, 0), static_cast<std::size_t>(cols_));
}

std::span<const double> FieldBlock::row(int i) const {
  return std::span<const double>(data_).subspan(index(i, 0), static_cast<std::size_t>(cols_));
}

FieldState FieldState::at_rest(const AxisymmetryShape& shape, int n, double t) {
  FieldState s;
  s.t = t;
  s.z = FieldBlock(shape.m(), n);
  s.r = FieldBlock(shape.k(), n, 1.0);
  s.vz = FieldBlock(shape.m(), n);
  s.vr = FieldBlock(shape.k(), n);
  return s;
}

std::vector<double> grid_points(int n) {
  std::vector<double> y(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j) y[static_cast<std::size_t>(j)] = grid_point(j, n);
  return y;
}

void validate_state(const FieldState& state, const AxisymmetryShape& shape) {
  const int n = state.n();
  if (n < 8 || n % 2 != 0) {
    throw Error(ErrorCode::InvalidArgument,
                "grid size must be even and >= 8, got " + std::to_string(n));
  }
  auto check = [&](const FieldBlock& b, int rows, const char* name) {
    if (b.rows() != rows || b.cols() != n) {
      throw Error(ErrorCode::DimensionMismatch,
                  std::string(name) + " has shape " + std::to_string(b.rows()) + "x" +
                      std::to_string(b.cols()) + ", expected " + std::to_string(rows) + "x" +
                      std::to_string(n));
    }
    for (double v : b.values()) {
      if (!std::isfinite(v)) {
        throw Error(ErrorCode::NaNDetected, std::string(name) + " has a non-finite entry");
      }
    }
  };
  check(state.z, shape.m(), "z");
  check(state.r, shape.k(), "r");
  check(state.vz, shape.m(), "vz");
  check(state.vr, shape.k(), "vr");
  for (double v : state.r.values()) {
    if (!(v > 0.0)) throw Error(ErrorCode::NonPositiveRadius, "radius must be positive");
  }
}

void spatial_derivative(std::span<const double> f, std::span<double> out) {
  const std::size_t n = f.size();
  if (n < 8) {
    throw Error(ErrorCode::InvalidArgument, "spatial_derivative needs at least 8 points");
  }
  if (out.size() != n) {
    throw Error(ErrorCode::DimensionMismatch, "spatial_derivative output size mismatch");
  }
  const double scale = static_cast<double>(n) / (12.0 * kTwoPi);
  auto at = [&](std::size_t j) { return f[j % n]; };
  // Wrapped stencils at both ends, straight-line loop in the interior.
  for (std::size_t j : {std::size_t{0}, std::size_t{1}, n - 2, n - 1}) {
    out[j] = (at(j + n - 2) - 8.0 * at(j + n - 1) + 8.0 * at(j + 1) - at(j + 2)) * scale;
  }
  for (std::size_t j = 2; j + 2 < n; ++j) {
    out[j] = (f[j - 2] - 8.0 * f[j - 1] + 8.0 * f[j + 1] - f[j + 2]) * scale;
  }
}

std::vector<double> spatial_derivative(std::span<const double> field) {
  std::vector<double> out(field.size());
  spatial_derivative(field, out);
  return out;
}

FieldBlock spatial_derivative(const FieldBlock& block) {
  FieldBlock out(block.rows(), block.cols());
  for (int i = 0; i < block.rows(); ++i) spatial_derivative(block.row(i), out.row(i));
  return out;
}

std::vector<double> squared_speed(const FieldState& state) {
  const int n = state.n();
  std::vector<double> v2(static_cast<std::size_t>(n), 0.0);
  for (const FieldBlock* b : {&state.vz, &state.vr}) {
    for (int i = 0; i < b->rows(); ++i) {
      auto row = b->row(i);
      for (int j = 0; j < n; ++j) v2[static_cast<std::size_t>(j)] += row[j] * row[j];
    }
  }
  return v2;
}

std::vector<double> radius_product(const FieldState& state, const AxisymmetryShape& shape,
                                   int power) {
  const int n = state.n();
  std::vector<double> p(static_cast<std::size_t>(n), 1.0);
  for (int i = 0; i < shape.k(); ++i) {
    const int e = power * shape.d(i);
    auto row = state.r.row(i);
    for (int j = 0; j < n; ++j) {
      double f = 1.0;
      for (int q = 0; q < e; ++q) f *= row[j];
      p[static_cast<std::size_t>(j)] *= f;
    }
  }
  return p;
}

MetricField metric_components(const FieldState& state, const AxisymmetryShape& shape) {
  const int n = state.n();
  const FieldBlock dz = spatial_derivative(state.z);
  const FieldBlock dr = spatial_derivative(state.r);
  MetricField g;
  g.gtt = squared_speed(state);
  g.gyy.assign(static_cast<std::size_t>(n), 0.0);
  g.gty.assign(static_cast<std::size_t>(n), 0.0);
  for (auto& v : g.gtt) v -= 1.0;

  auto accumulate = [&](const FieldBlock& vel, const FieldBlock& dpos) {
    for (int i = 0; i < vel.rows(); ++i) {
      auto v = vel.row(i);
      auto d = dpos.row(i);
      for (int j = 0; j < n; ++j) {
        g.gyy[static_cast<std::size_t>(j)] += d[j] * d[j];
        g.gty[static_cast<std::size_t>(j)] += v[j] * d[j];
      }
    }
  };
  accumulate(state.vz, dz);
  accumulate(state.vr, dr);

  const std::vector<double> vol = radius_product(state, shape, 1);
  g.sqrt_det.resize(static_cast<std::size_t>(n));
  for (std::size_t j = 0; j < g.sqrt_det.size(); ++j) {
    g.sqrt_det[j] = std::sqrt(std::abs(g.gtt[j]) * g.gyy[j]) * vol[j];
  }
  return g;
}

MetricField compute_metric(const FieldState& state, const AxisymmetryShape& shape) {
  MetricField g = metric_components(state, shape);
  for (std::size_t j = 0; j < g.gtt.size(); ++j) {
    if (!(g.gtt[j] < 0.0)) {
      throw Error(ErrorCode::NonTimelike,
                  "g_tt = " + std::to_string(g.gtt[j]) + " at grid index " + std::to_string(j));
    }
  }
  return g;
}

IndicatorField immersivity_indicator(const FieldState& state, const MetricField& metric,
                                     const AxisymmetryShape& shape) {
  const int n = state.n();
  IndicatorField out;
  out.values.resize(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j) {
    double prod = std::abs(metric.gtt[static_cast<std::size_t>(j)]);
    for (int i = 0; i < shape.k(); ++i) prod *= state.r(i, j);
    out.values[static_cast<std::size_t>(j)] = prod;
  }
  out.min = out.values.empty() ? 0.0 : out.values.front();
  for (double v : out.values) out.min = std::min(out.min, v);
  return out;
}

std::vector<std::vector<double>> reconstruct_embedding(const FieldState& state,
                                                       const AxisymmetryShape& shape,
                                                       const SphereSamples& samples) {
  if (static_cast<int>(samples.size()) != shape.k()) {
    throw Error(ErrorCode::DimensionMismatch, "need one sample list per sphere factor");
  }
  for (int i = 0; i < shape.k(); ++i) {
    for (const auto& theta : samples[static_cast<std::size_t>(i)]) {
      if (static_cast<int>(theta.size()) != shape.d(i) + 1) {
        throw Error(ErrorCode::DimensionMismatch,
                    "sphere sample for factor " + std::to_string(i) + " has dimension " +
                        std::to_string(theta.size()));
      }
      double norm2 = 0.0;
      for (double c : theta) norm2 += c * c;
      if (std::abs(std::sqrt(norm2) - 1.0) > 1e-12) {
        throw Error(ErrorCode::DimensionMismatch, "sphere sample is not a unit vector");
      }
    }
  }

  // Odometer over the per-factor sample indices.
  std::vector<std::size_t> counts;
  std::size_t combos = 1;
  for (const auto& list : samples) {
    counts.push_back(list.size());
    combos *= list.size();
  }

  std::vector<std::vector<double>> points;
  points.reserve(combos * static_cast<std::size_t>(state.n()));
  for (int j = 0; j < state.n(); ++j) {
    std::vector<std::size_t> pick(counts.size(), 0);
    for (std::size_t c = 0; c < combos; ++c) {
      std::vector<double> p;
      p.reserve(static_cast<std::size_t>(1 + shape.ambient_dim()));
      p.push_back(state.t);
      for (int a = 0; a < shape.m(); ++a) p.push_back(state.z(a, j));
      for (int i = 0; i < shape.k(); ++i) {
        for (double comp : samples[static_cast<std::size_t>(i)][pick[static_cast<std::size_t>(i)]]) {
          p.push_back(state.r(i, j) * comp);
        }
      }
      points.push_back(std::move(p));
      for (std::size_t q = 0; q < pick.size(); ++q) {
        if (++pick[q] < counts[q]) break;
        pick[q] = 0;
      }
    }
  }
  return points;
}

}  // namespace membrane
