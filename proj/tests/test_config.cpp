#include <gtest/gtest.h>

#include <cmath>

#include "membrane/error.hpp"
#include "membrane/run_config.hpp"

namespace membrane {
namespace {

std::string config_error(const std::string& text) {
  try {
    parse_run_config(text, "cfg");
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ConfigError);
    return e.what();
  }
  ADD_FAILURE() << "no error for:\n" << text;
  return {};
}

TEST(Config, Defaults) {
  const RunConfig c = parse_run_config("{}");
  EXPECT_EQ(c.initial.family, "clifford");
  EXPECT_EQ(c.n, 256);
  EXPECT_EQ(c.directions.size(), 2u);
  EXPECT_EQ(c.shape, AxisymmetryShape::clifford());
}

TEST(Config, FullDocument) {
  const RunConfig c = parse_run_config(R"(
shape: {sphere_dims: [1, 2], z_dim: 3}
initial:
  family: perturbed
  base: {family: torus_of_revolution, R0: 3, b: 1}
  perturbations:
    - {target: r2, mode: 2, amplitude: 0.01, phase: 0.5}
  random: {count: 3, amplitude: 0.001, max_mode: 5, targets: [z3, vr1]}
grid: {n: 64}
solver: {cfl: 0.3, t_end: 2, record_every: 5}
run: {directions: [backward], seed: 42}
output: {dir: out/x, snapshots: true, snapshot_every: 7}
breakdown: {x_budget: 0.01, y_budget: 0.02, window: 6}
)");
  EXPECT_EQ(c.shape, AxisymmetryShape({1, 2}, 3));
  EXPECT_EQ(c.initial.family, "torus_of_revolution");
  EXPECT_DOUBLE_EQ(c.initial.R0, 3.0);
  ASSERT_EQ(c.initial.perturbations.size(), 1u);
  EXPECT_EQ(c.initial.perturbations[0].field, "r");
  EXPECT_EQ(c.initial.perturbations[0].component, 1);
  ASSERT_TRUE(c.initial.random.has_value());
  EXPECT_EQ(c.initial.random->targets.size(), 2u);
  EXPECT_EQ(c.n, 64);
  EXPECT_DOUBLE_EQ(c.solver.cfl, 0.3);
  EXPECT_EQ(c.solver.record_every, 5);
  EXPECT_EQ(c.directions, std::vector<Direction>{Direction::Backward});
  EXPECT_EQ(c.seed, 42u);
  EXPECT_TRUE(c.output.snapshots);
  EXPECT_EQ(c.trend_window, 6);
  EXPECT_DOUBLE_EQ(c.budget.y_inf, 0.02);
}

TEST(Config, ErrorsCarryPositions) {
  EXPECT_EQ(config_error("initial:\n  family: clifford\n  a0: -1\n"), "ConfigError: cfg:3:7: 'a0' must be positive");
  EXPECT_NE(config_error("grid:\n  n: 7\n").find("cfg:2:6"), std::string::npos);
  EXPECT_NE(config_error("solver:\n  cfl: fast\n").find("must be a number"), std::string::npos);
  EXPECT_NE(config_error("colour: blue\n").find("unknown key 'colour'"), std::string::npos);
  EXPECT_NE(config_error("grid: [1, 2\n").find("cfg:"), std::string::npos);
  EXPECT_NE(config_error("solver: {cfl: 2}\n").find("cfl"), std::string::npos);
  EXPECT_NE(config_error("initial: {family: klein_bottle}\n").find("unknown initial family"),
            std::string::npos);
  EXPECT_NE(config_error("run: {directions: [up]}\n").find("direction"), std::string::npos);
  EXPECT_NE(config_error("initial: {family: perturbed, base: {family: clifford},"
                         " perturbations: [{target: r3, mode: 1, amplitude: 0.1}]}\n")
                .find("invalid perturbation target"),
            std::string::npos);
  EXPECT_NE(config_error("shape: {z_dim: 1}\n").find("z_dim >= 2"), std::string::npos);
}

TEST(Config, InitialStateFamilies) {
  RunConfig c = parse_run_config("initial: {family: clifford, rho0: 0.8, a0: 1.25}\ngrid: {n: 16}\n");
  FieldState s = build_initial_state(c);
  EXPECT_NEAR(std::hypot(s.z(0, 3), s.z(1, 3)), 0.8, 1e-15);
  EXPECT_DOUBLE_EQ(s.r(0, 5), 1.25);

  c = parse_run_config(
      "shape: {z_dim: 1}\ninitial: {family: torus_of_revolution, R0: 2, b: 0.5}\ngrid: {n: 16}\n");
  s = build_initial_state(c);
  EXPECT_DOUBLE_EQ(s.r(0, 0), 2.5);
  EXPECT_NEAR(s.z(0, 4), 0.5, 1e-15);
}

TEST(Config, PerturbationsApplied) {
  const RunConfig c = parse_run_config(R"(
initial:
  family: perturbed
  base: {family: clifford}
  perturbations: [{target: vr1, mode: 2, amplitude: 0.1, phase: 0.0}]
grid: {n: 16}
)");
  const FieldState s = build_initial_state(c);
  EXPECT_NEAR(s.vr(0, 0), 0.1, 1e-15);
  EXPECT_NEAR(s.vr(0, 2), 0.1 * std::cos(2 * grid_point(2, 16)), 1e-15);
}

TEST(Config, RandomPerturbationIsSeeded) {
  const std::string text = R"(
initial:
  family: perturbed
  base: {family: clifford}
  random: {count: 4, amplitude: 0.01, max_mode: 4, targets: [z1, r1, vr1]}
grid: {n: 32}
run: {seed: SEED}
)";
  auto with_seed = [&](const char* seed) {
    std::string t = text;
    t.replace(t.find("SEED"), 4, seed);
    return build_initial_state(parse_run_config(t));
  };
  EXPECT_EQ(with_seed("7"), with_seed("7"));
  EXPECT_NE(with_seed("7"), with_seed("8"));
  const FieldState s = with_seed("7");
  for (double r : s.r.values()) EXPECT_NEAR(r, 1.0, 0.04 + 1e-12);
}

TEST(Config, InvalidPerturbedStateRejected) {
  const RunConfig c = parse_run_config(R"(
initial:
  family: perturbed
  base: {family: clifford}
  perturbations: [{target: vr1, mode: 1, amplitude: 1.5}]
grid: {n: 16}
)");
  try {
    build_initial_state(c);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ConfigError);
  }
}

TEST(Config, Overrides) {
  const std::string text = "initial:\n  family: clifford\n  rho0: 1.0\ngrid: {n: 64}\n";
  const std::string out =
      override_config(text, {{"initial.rho0", "0.8"}, {"grid.n", "32"}, {"output.dir", "a/b"}});
  const RunConfig c = parse_run_config(out);
  EXPECT_DOUBLE_EQ(c.initial.rho0, 0.8);
  EXPECT_EQ(c.n, 32);
  EXPECT_EQ(c.output.dir, "a/b");
}

}  // namespace
}  // namespace membrane
