#pragma once

#include <numbers>
#include <span>
#include <vector>

namespace membrane {

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Symmetry data of an axially symmetric membrane: the generatrix
/// (z, r_1, ..., r_k) sweeps S^1 x S^{d_1} x ... x S^{d_k} into
/// R^m x R^{d_1+1} x ... x R^{d_k+1}.
class AxisymmetryShape {
 public:
  /// Throws Error(InvalidArgument) unless k >= 1, every d_j >= 1 and m >= 1.
  AxisymmetryShape(std::vector<int> sphere_dims, int z_dim);

  /// The S^1 x S^1 torus in R^4 (k = 1, d_1 = 1, m = 2).
  static AxisymmetryShape clifford();

  int k() const noexcept { return static_cast<int>(sphere_dims_.size()); }
  int m() const noexcept { return z_dim_; }
  int d(int j) const { return sphere_dims_.at(static_cast<std::size_t>(j)); }
  std::span<const int> sphere_dims() const noexcept { return sphere_dims_; }

  /// Dimension of a constant-time slice: 1 + sum d_j.
  int spatial_dim() const noexcept;
  /// Dimension N of the Euclidean target: m + sum (d_j + 1).
  int ambient_dim() const noexcept;

  bool operator==(const AxisymmetryShape&) const = default;

 private:
  std::vector<int> sphere_dims_;
  int z_dim_;
};

/// Row-major rows x cols block of doubles; each row is one field component
/// sampled on the periodic grid.
class FieldBlock {
 public:
  FieldBlock() = default;
  FieldBlock(int rows, int cols, double fill = 0.0);

  int rows() const noexcept { return rows_; }
  int cols() const noexcept { return cols_; }

  std::span<double> row(int i);
  std::span<const double> row(int i) const;

  double& operator()(int i, int j) { return data_[index(i, j)]; }
  double operator()(int i, int j) const { return data_[index(i, j)]; }

  std::span<double> values() noexcept { return data_; }
  std::span<const double> values() const noexcept { return data_; }

  bool operator==(const FieldBlock&) const = default;

 private:
  std::size_t index(int i, int j) const noexcept {
    return static_cast<std::size_t>(i) * static_cast<std::size_t>(cols_) +
           static_cast<std::size_t>(j);
  }

  int rows_ = 0;
  int cols_ = 0;
  std::vector<double> data_;
};

/// Generatrix positions and velocities on the grid y_j = 2 pi j / n.
struct FieldState {
  double t = 0.0;
  FieldBlock z;   // m x n
  FieldBlock r;   // k x n, strictly positive
  FieldBlock vz;  // dz/dt
  FieldBlock vr;  // dr/dt

  /// Zero-filled state with r = 1.
  static FieldState at_rest(const AxisymmetryShape& shape, int n, double t = 0.0);

  int n() const noexcept { return z.cols(); }

  bool operator==(const FieldState&) const = default;
};

/// Induced metric coefficients per grid point.
struct MetricField {
  std::vector<double> gtt;
  std::vector<double> gyy;
  std::vector<double> gty;
  std::vector<double> sqrt_det;
};

struct IndicatorField {
  std::vector<double> values;
  double min = 0.0;
};

inline double grid_point(int j, int n) { return kTwoPi * j / n; }
inline double grid_spacing(int n) { return kTwoPi / n; }
std::vector<double> grid_points(int n);

/// Checks dimensions against the shape, n even and >= 8, r > 0 and finiteness.
void validate_state(const FieldState& state, const AxisymmetryShape& shape);

/// Fourth-order centred periodic derivative on the 2 pi grid.
std::vector<double> spatial_derivative(std::span<const double> field);
void spatial_derivative(std::span<const double> field, std::span<double> out);
FieldBlock spatial_derivative(const FieldBlock& block);

/// g_tt, g_yy, g_ty and sqrt|det g| without the time-like check.
MetricField metric_components(const FieldState& state, const AxisymmetryShape& shape);

/// As metric_components, but throws Error(NonTimelike) if g_tt >= 0 anywhere.
MetricField compute_metric(const FieldState& state, const AxisymmetryShape& shape);

/// |g_tt| r_1 ... r_k per point, with its minimum over the grid.
IndicatorField immersivity_indicator(const FieldState& state, const MetricField& metric,
                                     const AxisymmetryShape& shape);

/// |dz/dt|^2 + sum (dr_i/dt)^2 at each grid point.
std::vector<double> squared_speed(const FieldState& state);

/// prod_i r_i^{p d_i} at each point (p = 1 gives the sphere-volume factor).
std::vector<double> radius_product(const FieldState& state, const AxisymmetryShape& shape,
                                   int power);

/// Unit vectors of dimension d_j + 1 to place on the j-th sphere factor.
using SphereSamples = std::vector<std::vector<std::vector<double>>>;

/// Points (t, z, r_1 theta_1, ..., r_k theta_k) in R^{1+N} for every grid point
/// and every combination of sphere samples. Samples must be unit vectors of
/// dimension d_j + 1 (tolerance 1e-12), else Error(DimensionMismatch).
std::vector<std::vector<double>> reconstruct_embedding(const FieldState& state,
                                                       const AxisymmetryShape& shape,
                                                       const SphereSamples& samples);

}  // namespace membrane
