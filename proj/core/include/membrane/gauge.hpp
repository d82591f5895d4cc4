#pragma once

#include <vector>

#include "membrane/geometry.hpp"
#include "membrane/interpolation.hpp"

namespace membrane {

/// The constant C of the area-density gauge |g_tt| / sqrt|det g| = C.
class GaugeConstant {
 public:
  /// Throws Error(InvalidArgument) unless c is finite and positive.
  explicit GaugeConstant(double c);

  double value() const noexcept { return value_; }
  bool operator==(const GaugeConstant&) const = default;

 private:
  double value_;
};

/// X = R^{-1} g_tt + C^2 g_yy and Y = g_ty, with R = prod r_i^{2 d_i}.
/// Both vanish identically on exactly gauged data.
struct GaugeResiduals {
  std::vector<double> X;
  std::vector<double> Y;
  double x_inf = 0.0;
  double y_inf = 0.0;
  double x_l2 = 0.0;
  double y_l2 = 0.0;
};

/// Removes the component of the velocity along the spatial tangent so that
/// g_ty = 0. Throws Error(DegenerateParametrization) if g_yy < 1e-14.
FieldState comoving_project(const FieldState& state);

struct GaugeFixOptions {
  Resampler resampler = Resampler::Trigonometric;
  /// Reparametrizations are composed until the discrete |g_tt| / sqrt|det g|
  /// has relative spread below spread_tolerance or the budget runs out.
  int max_iterations = 8;
  double spread_tolerance = 1e-12;
};

struct GaugeFixResult {
  FieldState state;
  GaugeConstant C;
  int iterations = 0;
  /// max_j | |g_tt| / (C sqrt|det g|) - 1 | on the returned state.
  double spread = 0.0;
};

/// Reparametrizes y so that |g_tt| / sqrt|det g| is constant in y while y
/// keeps period 2 pi. Requires g_tt < 0, r > 0 and g_ty = 0 on input.
GaugeFixResult fix_parametrization(const FieldState& state, const AxisymmetryShape& shape,
                                   const GaugeFixOptions& options = {});

/// Alternates comoving_project and fix_parametrization until both conditions
/// hold to the gauge-fix tolerance (at most `rounds` alternations).
GaugeFixResult prepare_gauged_data(const FieldState& state, const AxisymmetryShape& shape,
                                   const GaugeFixOptions& options = {}, int rounds = 4);

GaugeResiduals gauge_residuals(const FieldState& state, GaugeConstant C,
                               const AxisymmetryShape& shape);

/// The weighted energy integral of Y^2 + R X^2 / (4 C^2) over the circle,
/// which controls the growth of the residuals along the evolution.
double gauge_energy(const FieldState& state, GaugeConstant C, const AxisymmetryShape& shape);

}  // namespace membrane
