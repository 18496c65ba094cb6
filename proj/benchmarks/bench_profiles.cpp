#include <benchmark/benchmark.h>

#include "evoset/bounds.hpp"
#include "evoset/generators.hpp"
#include "evoset/profiles.hpp"

using namespace evoset;

static void BM_EnumerateConductance(benchmark::State& state) {
  const ChainKernel chain = cycle(static_cast<std::size_t>(state.range(0)), 0.5).chain;
  for (auto _ : state) benchmark::DoNotOptimize(conductance_profile(chain, Enumerate{}));
  state.SetItemsProcessed(state.iterations() * (std::int64_t{1} << state.range(0)));
}
BENCHMARK(BM_EnumerateConductance)->Arg(12)->Arg(16)->Arg(20)->Unit(benchmark::kMillisecond);

static void BM_EnumerateRoot(benchmark::State& state) {
  const ChainKernel chain = cycle(static_cast<std::size_t>(state.range(0)), 0.5).chain;
  for (auto _ : state) benchmark::DoNotOptimize(root_profile(chain, Enumerate{}));
  state.SetItemsProcessed(state.iterations() * (std::int64_t{1} << state.range(0)));
}
BENCHMARK(BM_EnumerateRoot)->Arg(12)->Arg(16)->Arg(20)->Unit(benchmark::kMillisecond);

static void BM_MonteCarloRoot(benchmark::State& state) {
  const ChainKernel chain = lazy_box(static_cast<std::size_t>(state.range(0))).chain;
  for (auto _ : state) benchmark::DoNotOptimize(root_profile(chain, MonteCarlo{8, 1}));
}
BENCHMARK(BM_MonteCarloRoot)->Arg(8)->Arg(16)->Unit(benchmark::kMillisecond);

static void BM_StepIntegral(benchmark::State& state) {
  const AnyProfile phi = conductance_profile(lazy_box(4).chain, Enumerate{});
  for (auto _ : state) benchmark::DoNotOptimize(weighted_log_integral(phi, 0.01, 16.0, Transform::square));
}
BENCHMARK(BM_StepIntegral);
