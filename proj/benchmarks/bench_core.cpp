#include <complex>

#include <benchmark/benchmark.h>

#include "bdl/divsolve1d.hpp"
#include "bdl/kernel1d.hpp"
#include "bdl/scriptf.hpp"
#include "bdl/zeroscan.hpp"

namespace {

using cd = std::complex<double>;

void BM_LogScriptF(benchmark::State& state) {
  const auto p = bdl::catalog("quartic", {1.0, 0.25});
  const double lambda = static_cast<double>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(bdl::log_scriptF(p, cd(0.3, 0.2), lambda));
}
BENCHMARK(BM_LogScriptF)->Arg(10)->Arg(100)->Arg(1000);

void BM_LogBergman(benchmark::State& state) {
  const auto p = bdl::catalog("quadratic", {1.0});
  const double lambda = static_cast<double>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(bdl::log_bergman(p, cd(0.0, 1.0), 0.0, lambda));
}
BENCHMARK(BM_LogBergman)->Arg(50)->Arg(800)->Unit(benchmark::kMillisecond);

void BM_FindZeros(benchmark::State& state) {
  const auto p = bdl::catalog("analytic_trig", {1.0, 0.025, 6.0});
  for (auto _ : state) benchmark::DoNotOptimize(bdl::find_zeros(p, 40.0, {0.3, 0.7, 0.6, 0.9}));
}
BENCHMARK(BM_FindZeros)->Unit(benchmark::kMillisecond);

// Solve plus both weighted norms. Below ~4096 nodes the seeded input misses the discrete
// mean-zero tolerance.
void BM_BoundRatio51(benchmark::State& state) {
  const auto p = bdl::catalog("quadratic", {1.0});
  const auto ctx = bdl::weight_context(p, cd(0.3, 0.0), 100.0, 3.0);
  const auto grid = bdl::covering_grid(ctx, static_cast<int>(state.range(0)));
  const auto f = bdl::random_mean_zero_input(ctx, grid, 7);
  for (auto _ : state) benchmark::DoNotOptimize(bdl::bound_ratio_51(ctx, f));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_BoundRatio51)->RangeMultiplier(2)->Range(4096, 16384)->Complexity(benchmark::oN);

}  // namespace

BENCHMARK_MAIN();
