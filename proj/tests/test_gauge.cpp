#include <gtest/gtest.h>

#include <cmath>

#include "membrane/error.hpp"
#include "membrane/gauge.hpp"
#include "membrane/oracle.hpp"
#include "test_support.hpp"

namespace membrane {
namespace {

using testing::unit_torus;

TEST(GaugeConstant, RejectsNonPositive) {
  EXPECT_THROW(GaugeConstant(0.0), Error);
  EXPECT_THROW(GaugeConstant(-1.0), Error);
  EXPECT_THROW(GaugeConstant(std::nan("")), Error);
  EXPECT_DOUBLE_EQ(GaugeConstant(2.5).value(), 2.5);
}

TEST(Comoving, RemovesTangentialVelocity) {
  FieldState s = unit_torus(64);
  const auto dz = spatial_derivative(s.z);
  for (int j = 0; j < 64; ++j) {
    s.vz(0, j) = 0.3 * dz(0, j);
    s.vz(1, j) = 0.3 * dz(1, j);
  }
  const FieldState p = comoving_project(s);
  for (double v : p.vz.values()) EXPECT_NEAR(v, 0.0, 1e-15);
  for (double v : p.vr.values()) EXPECT_NEAR(v, 0.0, 1e-15);
}

TEST(Comoving, DegenerateParametrizationThrows) {
  FieldState s = FieldState::at_rest(AxisymmetryShape::clifford(), 16);
  try {
    comoving_project(s);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::DegenerateParametrization);
  }
}

FieldState reparametrized_torus(int n) {
  FieldState s = unit_torus(n);
  for (int j = 0; j < n; ++j) {
    const double y = grid_point(j, n);
    const double u = y + 0.3 * std::sin(y);
    s.z(0, j) = std::cos(u);
    s.z(1, j) = std::sin(u);
  }
  return s;
}

double density_spread(const FieldState& s, const AxisymmetryShape& shape) {
  const MetricField g = compute_metric(s, shape);
  double lo = 1e300;
  double hi = 0.0;
  for (std::size_t j = 0; j < g.gtt.size(); ++j) {
    const double q = std::abs(g.gtt[j]) / g.sqrt_det[j];
    lo = std::min(lo, q);
    hi = std::max(hi, q);
  }
  return (hi - lo) / lo;
}

class FixParametrization : public ::testing::TestWithParam<Resampler> {};

TEST_P(FixParametrization, NonUniformTorusBecomesUniform) {
  const auto shape = AxisymmetryShape::clifford();
  const FieldState s = reparametrized_torus(256);
  EXPECT_GT(density_spread(s, shape), 0.5);
  GaugeFixOptions o;
  o.resampler = GetParam();
  const GaugeFixResult r = fix_parametrization(s, shape, o);
  EXPECT_LT(density_spread(r.state, shape), 1e-6);
  EXPECT_LT(r.spread, 1e-6);
  EXPECT_NEAR(r.C.value(), 1.0, 1e-6);
}

INSTANTIATE_TEST_SUITE_P(Resamplers, FixParametrization,
                         ::testing::Values(Resampler::Trigonometric,
                                           Resampler::PeriodicCubicSpline));

TEST(FixParametrization, TrigonometricReachesRoundoff) {
  const auto shape = AxisymmetryShape::clifford();
  const GaugeFixResult r = fix_parametrization(reparametrized_torus(256), shape);
  EXPECT_LT(r.spread, 1e-11);
}

TEST(Residuals, GaugedUnitTorusVanishes) {
  const auto lifted = oracle::lift_to_grid(oracle::make_state(1.0, 1.0), 64);
  const GaugeResiduals res =
      gauge_residuals(lifted.state, lifted.C, AxisymmetryShape::clifford());
  EXPECT_LT(res.x_inf, 1e-12);
  EXPECT_LT(res.y_inf, 1e-12);
}

TEST(Residuals, DoubledConstant) {
  const auto lifted = oracle::lift_to_grid(oracle::make_state(1.0, 1.0), 64);
  const GaugeConstant doubled(2.0 * lifted.C.value());
  const GaugeResiduals res = gauge_residuals(lifted.state, doubled, AxisymmetryShape::clifford());
  EXPECT_NEAR(res.x_inf, 3.0, 1e-12);
  EXPECT_LT(res.y_inf, 1e-12);
}

TEST(Prepare, PerturbedTorusIsGauged) {
  const AxisymmetryShape shape({1}, 1);
  const GaugeFixResult g = prepare_gauged_data(testing::perturbed_revolution_torus(128), shape);
  const GaugeResiduals res = gauge_residuals(g.state, g.C, shape);
  EXPECT_LT(res.x_inf, 1e-10);
  EXPECT_LT(res.y_inf, 1e-10);
  EXPECT_GT(gauge_energy(g.state, g.C, shape), 0.0);
  EXPECT_LT(gauge_energy(g.state, g.C, shape), 1e-20);
}

}  // namespace
}  // namespace membrane
