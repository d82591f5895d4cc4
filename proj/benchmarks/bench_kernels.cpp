#include <benchmark/benchmark.h>

#include <cmath>

#include "membrane/evolution.hpp"
#include "membrane/gauge.hpp"
#include "membrane/geometry.hpp"
#include "membrane/oracle.hpp"

namespace {

using namespace membrane;

FieldState wobbly_torus(int n) {
  FieldState s = FieldState::at_rest(AxisymmetryShape({1}, 1), n);
  for (int j = 0; j < n; ++j) {
    const double y = grid_point(j, n);
    const double u = y + 0.2 * std::sin(y);
    s.z(0, j) = std::sin(u) + 0.01 * std::cos(3 * u);
    s.r(0, j) = 3.0 + std::cos(u);
    s.vr(0, j) = 0.025 * std::cos(u + 0.7);
  }
  return s;
}

void BM_SpatialDerivative(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  std::vector<double> f(n);
  std::vector<double> out(n);
  for (int j = 0; j < n; ++j) f[j] = std::sin(grid_point(j, n));
  for (auto _ : state) {
    spatial_derivative(f, out);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * n);
}
BENCHMARK(BM_SpatialDerivative)->RangeMultiplier(2)->Range(64, 1024);

void BM_RhsReduced(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const auto lifted = oracle::lift_to_grid(oracle::make_state(1.0, 1.0), n);
  for (auto _ : state) {
    benchmark::DoNotOptimize(rhs_reduced(lifted.state, lifted.C, AxisymmetryShape::clifford()));
  }
}
BENCHMARK(BM_RhsReduced)->RangeMultiplier(2)->Range(64, 1024);

void BM_StepRk4(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const auto lifted = oracle::lift_to_grid(oracle::make_state(1.0, 1.0), n);
  const double dt = 0.4 * grid_spacing(n);
  for (auto _ : state) {
    benchmark::DoNotOptimize(step_rk4(lifted.state, dt, lifted.C, AxisymmetryShape::clifford()));
  }
}
BENCHMARK(BM_StepRk4)->RangeMultiplier(2)->Range(64, 1024);

void BM_FixParametrization(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const FieldState s = wobbly_torus(n);
  const AxisymmetryShape shape({1}, 1);
  for (auto _ : state) benchmark::DoNotOptimize(fix_parametrization(s, shape));
}
BENCHMARK(BM_FixParametrization)->RangeMultiplier(2)->Range(64, 512);

void BM_OracleRestCollapse(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(oracle::rest_collapse_time(1.0, 1.0));
}
BENCHMARK(BM_OracleRestCollapse);

}  // namespace
BENCHMARK_MAIN();
