#include <benchmark/benchmark.h>

#include "evoset/exact_mixing.hpp"
#include "evoset/generators.hpp"

using namespace evoset;

static void BM_PowerStep(benchmark::State& state) {
  const ChainKernel chain = lazy_box(static_cast<std::size_t>(state.range(0))).chain;
  PowerSequence seq(chain);
  for (auto _ : state) seq.step();
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(chain.nonzeros() * chain.size()));
}
BENCHMARK(BM_PowerStep)->Arg(8)->Arg(16)->Arg(32);

static void BM_TauUniform(benchmark::State& state) {
  const ChainKernel chain = lazy_box(static_cast<std::size_t>(state.range(0))).chain;
  for (auto _ : state) benchmark::DoNotOptimize(tau_uniform(chain, 0.25));
}
BENCHMARK(BM_TauUniform)->Arg(4)->Arg(8)->Arg(16)->Unit(benchmark::kMillisecond);

static void BM_SpectralGap(benchmark::State& state) {
  const ChainKernel chain = hypercube(static_cast<std::size_t>(state.range(0))).chain;
  for (auto _ : state) benchmark::DoNotOptimize(spectral_gap(chain));
}
BENCHMARK(BM_SpectralGap)->Arg(6)->Arg(8)->Unit(benchmark::kMillisecond);

static void BM_ContinuousKernel(benchmark::State& state) {
  const ChainKernel chain = lazy_box(static_cast<std::size_t>(state.range(0))).chain;
  for (auto _ : state) benchmark::DoNotOptimize(continuous_kernel(chain, 50.0));
}
BENCHMARK(BM_ContinuousKernel)->Arg(4)->Arg(8)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
