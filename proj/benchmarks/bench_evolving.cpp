#include <benchmark/benchmark.h>

#include "evoset/evolving.hpp"
#include "evoset/generators.hpp"
#include "evoset/set_kernel.hpp"

using namespace evoset;

static void BM_EvolveStep(benchmark::State& state) {
  const ChainKernel chain = lazy_box(static_cast<std::size_t>(state.range(0))).chain;
  std::vector<StateId> half;
  for (StateId x = 0; x < chain.size() / 2; ++x) half.push_back(x);
  const StateSet set = chain.subset(half);
  double u = 0.1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(evolve_step(chain, set, u));
    u = u < 0.9 ? u + 0.1 : 0.1;
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_EvolveStep)->Arg(8)->Arg(32)->Arg(64);

static void BM_Psi(benchmark::State& state) {
  const ChainKernel chain = lazy_box(static_cast<std::size_t>(state.range(0))).chain;
  std::vector<StateId> half;
  for (StateId x = 0; x < chain.size() / 2; ++x) half.push_back(x);
  const StateSet set = chain.subset(half);
  for (auto _ : state) benchmark::DoNotOptimize(psi(chain, set));
}
BENCHMARK(BM_Psi)->Arg(8)->Arg(32)->Arg(64);

static void BM_SampleTrace(benchmark::State& state) {
  const ChainKernel chain = lazy_box(16).chain;
  const StateSet start = chain.singleton(0);
  std::uint64_t seed = 1;
  for (auto _ : state) benchmark::DoNotOptimize(sample_trace(chain, start, 200, seed++, TraceMode::doob_exact));
}
BENCHMARK(BM_SampleTrace)->Unit(benchmark::kMillisecond);

static void BM_SetKernel(benchmark::State& state) {
  const ChainKernel chain = random_chain(static_cast<std::size_t>(state.range(0)), 3).chain;
  for (auto _ : state) benchmark::DoNotOptimize(set_kernel(chain));
}
BENCHMARK(BM_SetKernel)->Arg(8)->Arg(12)->Arg(16)->Unit(benchmark::kMillisecond);
