#include <gtest/gtest.h>

#include <cmath>

#include "membrane/error.hpp"
#include "membrane/oracle.hpp"

#ifndef MEMBRANE_GOLDEN_DIR
#error "MEMBRANE_GOLDEN_DIR must be defined"
#endif

namespace membrane {
namespace {

using oracle::CliffordState;

// rho = a solves rho'' = -rho^3 from rest at 1; rho'^2 = (1 - rho^4) / 2 gives
// T(rho_f) = sqrt(2) int_{rho_f}^1 (1 - s^4)^{-1/2} ds = K(1/sqrt 2) - sqrt(2) int_0^{rho_f} ...
double closed_form_time_to(double rho_f) {
  const double tail = rho_f + std::pow(rho_f, 5) / 10.0 + std::pow(rho_f, 9) / 24.0;
  return std::comp_ellint_1(1.0 / std::sqrt(2.0)) - std::sqrt(2.0) * tail;
}

TEST(Oracle, MakeStateGaugeIdentity) {
  const CliffordState s = oracle::make_state(0.8, 1.25, 0.1, -0.2);
  const double ident = s.C * s.C * s.a[0] * s.a[0] * s.rho * s.rho;
  EXPECT_NEAR(oracle::abs_gtt(s), ident, 1e-15);
  EXPECT_DOUBLE_EQ(oracle::make_state(1.0, 1.0).C, 1.0);
  EXPECT_THROW(oracle::make_state(1.0, -1.0), Error);
  EXPECT_THROW(oracle::make_state(1.0, 1.0, 0.8, 0.8), Error);
}

TEST(Oracle, RhsAtRest) {
  const auto acc = oracle::clifford_rhs(oracle::make_state(1.0, 1.0));
  EXPECT_DOUBLE_EQ(acc.rho_ddot, -1.0);
  EXPECT_DOUBLE_EQ(acc.a_ddot[0], -1.0);
}

TEST(Oracle, CollapseTimeMatchesEllipticIntegral) {
  // |g_tt| = rho^4 here, so the 1e-8 floor is met at rho = 1e-2.
  const double t = oracle::rest_collapse_time(1.0, 1.0);
  EXPECT_NEAR(t, closed_form_time_to(1e-2), 1e-9);
}

TEST(Oracle, GaugeIdentityHeldAlongTrajectory) {
  const CliffordState s0 = oracle::make_state(1.25, 0.8);
  const auto res = oracle::clifford_integrate(s0);
  ASSERT_TRUE(res.collapse_time.has_value());
  double worst = 0.0;
  for (const CliffordState& s : res.trajectory) {
    const double ident = s0.C * s0.C * s.rho * s.rho * s.a[0] * s.a[0];
    if (ident > 1e-3) worst = std::max(worst, std::abs(oracle::abs_gtt(s) - ident) / ident);
  }
  EXPECT_LT(worst, 1e-9);
}

TEST(Oracle, BackwardIsMirrorOfForwardAtRest) {
  const CliffordState s = oracle::make_state(0.8, 1.0);
  oracle::IntegrateOptions back;
  back.direction = Direction::Backward;
  const double tf = *oracle::clifford_integrate(s).collapse_time;
  const double tb = *oracle::clifford_integrate(s, back).collapse_time;
  EXPECT_NEAR(tf, -tb, 1e-12);
}

TEST(Oracle, SamplesAtRequestedTimes) {
  oracle::IntegrateOptions o;
  o.sample_times = {0.25, 0.5, 1.0};
  const auto res = oracle::clifford_integrate(oracle::make_state(1.0, 1.0), o);
  ASSERT_EQ(res.samples.size(), 3u);
  EXPECT_DOUBLE_EQ(res.samples[1].t, 0.5);
  // Energy rho'^2 / 2 + rho^4 / 4 = 1 / 4 for rho = a.
  for (const auto& s : res.samples) {
    EXPECT_NEAR(s.rho, s.a[0], 1e-12);
    EXPECT_NEAR(0.5 * s.rho_dot * s.rho_dot + 0.25 * std::pow(s.rho, 4), 0.25, 1e-11);
  }
}

TEST(Oracle, TighterToleranceConverges) {
  const double coarse = oracle::rest_collapse_time(1.0, 1.0, 1e-10);
  const double fine = oracle::rest_collapse_time(1.0, 1.0, 1e-13);
  EXPECT_NEAR(coarse, fine, 1e-7);
}

TEST(Oracle, LiftedStateHasDiscreteConstant) {
  const int n = 64;
  const auto lifted = oracle::lift_to_grid(oracle::make_state(1.0, 1.0), n);
  EXPECT_NEAR(lifted.C.value(), 1.0 / oracle::stencil_symbol(n), 1e-15);
  EXPECT_LT(oracle::stencil_symbol(n), 1.0);
  EXPECT_GT(oracle::stencil_symbol(n), 0.999);
  EXPECT_DOUBLE_EQ(lifted.state.z(0, 0), 1.0);
  EXPECT_THROW(oracle::lift_to_grid(oracle::make_state(1.0, 1.0), n, AxisymmetryShape({1}, 1)),
               Error);
}

TEST(Oracle, GoldenConstants) {
  const auto golden = oracle::read_golden(std::string(MEMBRANE_GOLDEN_DIR) + "/oracle_constants.txt");
  const auto fresh = oracle::compute_reference_constants();
  ASSERT_EQ(golden.size(), fresh.size());
  for (const auto& [name, c] : fresh) {
    ASSERT_TRUE(golden.count(name)) << name;
    EXPECT_NEAR(c.value, golden.at(name).value, golden.at(name).tolerance) << name;
  }
}

}  // namespace
}  // namespace membrane
