#include <benchmark/benchmark.h>

#include "rtourn/adversary.hpp"
#include "rtourn/equilibrium.hpp"
#include "rtourn/kernel.hpp"
#include "rtourn/solver.hpp"

using namespace rtourn;

static void BM_EvalA(benchmark::State& state) {
  const auto d = asymptotic_d(static_cast<int>(state.range(0)));
  double z = 0.0;
  for (auto _ : state) {
    z += 0.618033988749895;
    if (z >= 1.0) z -= 1.0;
    benchmark::DoNotOptimize(eval_a(z, d));
  }
}
BENCHMARK(BM_EvalA)->Arg(3)->Arg(10)->Arg(50)->Arg(200);

static void BM_GradientL(benchmark::State& state) {
  const auto d = asymptotic_d(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(gradient_l(d));
}
BENCHMARK(BM_GradientL)->Arg(3)->Arg(10)->Arg(50)->Unit(benchmark::kMicrosecond);

static void BM_SolveRobust(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(solve_robust(n));
}
BENCHMARK(BM_SolveRobust)->Arg(3)->Arg(10)->Arg(25)->Arg(50)->Unit(benchmark::kMillisecond);

static void BM_Reconstruct(benchmark::State& state) {
  const auto m = adversarial_m(solve_robust(10).differentials(), EntropyBound(0.0));
  for (auto _ : state) benchmark::DoNotOptimize(reconstruct_distribution(m));
}
BENCHMARK(BM_Reconstruct)->Unit(benchmark::kMillisecond);

static void BM_MonteCarloB(benchmark::State& state) {
  const auto dist = reconstruct_distribution(QuantileDensity::uniform());
  MonteCarloOptions opts;
  opts.samples = state.range(0);
  for (auto _ : state) benchmark::DoNotOptimize(monte_carlo_B(dist, 5, opts));
}
BENCHMARK(BM_MonteCarloB)->Arg(100000)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
