#include <gtest/gtest.h>

#include <cmath>

#include "membrane/breakdown.hpp"
#include "membrane/diagnostics.hpp"
#include "membrane/error.hpp"
#include "membrane/oracle.hpp"
#include "test_support.hpp"

namespace membrane {
namespace {

DiagnosticsRecord rec(double t, double indicator, double mean_r, double x = 0.0) {
  DiagnosticsRecord r;
  r.t = t;
  r.min_indicator = indicator;
  r.mean_radii = {mean_r};
  r.max_radii = {mean_r};
  r.x_inf = x;
  r.velocity_margin = 0.5;
  return r;
}

TEST(Density, GaugedUnitTorusIsConstant) {
  const auto lifted = oracle::lift_to_grid(oracle::make_state(1.0, 1.0), 64);
  const DensityField d = conserved_density(lifted.state, lifted.C, AxisymmetryShape::clifford());
  EXPECT_LT(d.spread, 1e-12);
  for (double v : d.values) EXPECT_NEAR(v, 1.0 / lifted.C.value(), 1e-12);
}

TEST(Record, StaticUnitTorus) {
  const FieldState s = testing::unit_torus(32);
  EXPECT_NEAR(gtt_integral(s), kTwoPi, 1e-13);
  EXPECT_DOUBLE_EQ(mean_radii(s)[0], 1.0);
  const DiagnosticsRecord r = make_record(s, GaugeConstant(1.0), AxisymmetryShape::clifford());
  EXPECT_DOUBLE_EQ(r.min_indicator, 1.0);
  EXPECT_DOUBLE_EQ(r.velocity_margin, 1.0);
  EXPECT_DOUBLE_EQ(r.max_speed, 1.0);
  EXPECT_DOUBLE_EQ(r.max_radii[0], 1.0);
}

TEST(Convexity, ConcaveSeriesPasses) {
  std::vector<DiagnosticsRecord> rs;
  for (int i = 0; i < 12; ++i) {
    const double t = 0.1 * i * (1.0 + 0.01 * i);
    rs.push_back(rec(t, 1.0, std::cos(t)));
  }
  const auto v = convexity_check(rs);
  ASSERT_EQ(v.size(), 1u);
  EXPECT_TRUE(v[0].convex);
  EXPECT_EQ(v[0].first_violation, -1);
  EXPECT_LT(v[0].max_second_difference, 0.0);
}

TEST(Convexity, ConvexBumpFails) {
  std::vector<DiagnosticsRecord> rs;
  for (int i = 0; i < 10; ++i) rs.push_back(rec(0.1 * i, 1.0, 1.0 - 0.01 * i * i));
  rs[5].mean_radii[0] -= 0.05;
  const auto v = convexity_check(rs);
  EXPECT_FALSE(v[0].convex);
  EXPECT_EQ(v[0].first_violation, 5);
}

TEST(Convexity, NeedsThreeRecords) {
  std::vector<DiagnosticsRecord> rs{rec(0.0, 1.0, 1.0), rec(0.1, 1.0, 1.0)};
  try {
    convexity_check(rs);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::InsufficientHistory);
  }
}

TEST(Bounds, LipschitzAndVelocity) {
  std::vector<DiagnosticsRecord> rs{rec(0.0, 1.0, 1.0), rec(0.5, 1.0, 1.4), rec(1.0, 1.0, 1.2)};
  BoundsVerdict v = apriori_bounds(rs);
  EXPECT_TRUE(v.velocity_ok);
  EXPECT_TRUE(v.lipschitz_ok);
  rs[1].max_radii[0] = 1.6;
  rs[2].velocity_margin = -0.1;
  v = apriori_bounds(rs);
  EXPECT_FALSE(v.lipschitz_ok);
  EXPECT_FALSE(v.velocity_ok);
  EXPECT_EQ(v.first_violation, 1);
}

TEST(Breakdown, LinearExtrapolation) {
  std::vector<DiagnosticsRecord> rs;
  for (int i = 0; i < 10; ++i) rs.push_back(rec(0.1 * i, 2.0 - 0.2 * i, 1.0 - 0.01 * i * i));
  const auto t = extrapolate_zero_crossing(rs);
  ASSERT_TRUE(t.has_value());
  EXPECT_NEAR(*t, 1.0, 1e-12);
  const BreakdownReport r =
      detect_breakdown(Termination::IndicatorFloor, Direction::Forward, rs, GaugeBudget{});
  EXPECT_EQ(r.mechanism, Mechanism::ImmersivityLoss);
  EXPECT_TRUE(r.monotone_window);
  EXPECT_EQ(r.trend_times.size(), 10u);
  ASSERT_EQ(r.trend_mean_radius_d2.size(), 1u);
  EXPECT_EQ(r.trend_mean_radius_d2[0].size(), 8u);
}

TEST(Breakdown, BackwardExtrapolation) {
  std::vector<DiagnosticsRecord> rs;
  for (int i = 0; i < 10; ++i) rs.push_back(rec(-0.1 * i, 2.0 - 0.2 * i, 1.0));
  const auto t = extrapolate_zero_crossing(rs);
  ASSERT_TRUE(t.has_value());
  EXPECT_NEAR(*t, -1.0, 1e-12);
}

TEST(Breakdown, Classification) {
  std::vector<DiagnosticsRecord> rs;
  for (int i = 0; i < 12; ++i) rs.push_back(rec(0.1 * i, 1.0 - 0.05 * i, 1.0));
  EXPECT_EQ(detect_breakdown(Termination::NaNDetected, Direction::Forward, rs, {}).mechanism,
            Mechanism::RegularitySuspected);

  auto drifting = rs;
  drifting[6].x_inf = 0.5;
  const BreakdownReport b =
      detect_breakdown(Termination::IndicatorFloor, Direction::Forward, drifting, {});
  EXPECT_TRUE(b.budget_exceeded);
  EXPECT_EQ(b.mechanism, Mechanism::RegularitySuspected);

  auto wobbly = rs;
  wobbly[10].min_indicator = 2.0;
  EXPECT_EQ(detect_breakdown(Termination::IndicatorFloor, Direction::Forward, wobbly, {}).mechanism,
            Mechanism::Undetermined);

  const BreakdownReport h =
      detect_breakdown(Termination::HorizonReached, Direction::Forward, rs, {});
  EXPECT_EQ(h.mechanism, Mechanism::Undetermined);
  EXPECT_FALSE(h.t_star.has_value());
}

TEST(Breakdown, ShortHistoryThrows) {
  std::vector<DiagnosticsRecord> rs{rec(0.0, 1.0, 1.0), rec(0.1, 0.5, 1.0)};
  EXPECT_THROW(detect_breakdown(Termination::IndicatorFloor, Direction::Forward, rs, {}), Error);
  EXPECT_NO_THROW(detect_breakdown(Termination::HorizonReached, Direction::Forward, rs, {}));
}

TEST(Breakdown, MechanismNames) {
  EXPECT_EQ(parse_mechanism(to_string(Mechanism::ImmersivityLoss)), Mechanism::ImmersivityLoss);
  EXPECT_THROW(parse_mechanism("Other"), Error);
}

}  // namespace
}  // namespace membrane
