#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <sstream>

#include "evoset/error.hpp"
#include "evoset/evolving.hpp"
#include "evoset/generators.hpp"
#include "oracles.hpp"

using namespace evoset;

TEST(Evolving, LazyThreeCycleStepByLevel) {
  const ChainKernel c3 = cycle(3, 0.5).chain;
  const StateSet s = c3.singleton(0);
  EXPECT_EQ(evolve_step(c3, s, 0.2), c3.whole());
  EXPECT_EQ(evolve_step(c3, s, 0.25), c3.whole());
  EXPECT_EQ(evolve_step(c3, s, 0.4), s);
  EXPECT_EQ(evolve_step(c3, s, 0.5), s);
  EXPECT_TRUE(evolve_step(c3, s, 0.7).empty());
}

TEST(Evolving, LevelPartitionCoversUnitInterval) {
  const ChainKernel c3 = cycle(3, 0.5).chain;
  const auto pieces = level_partition(c3, c3.singleton(0));
  ASSERT_EQ(pieces.size(), 3u);
  EXPECT_DOUBLE_EQ(pieces.front().lower, 0.0);
  EXPECT_DOUBLE_EQ(pieces.back().upper, 1.0);
  double total = 0.0;
  for (const auto& p : pieces) total += p.length();
  EXPECT_NEAR(total, 1.0, 1e-15);
  EXPECT_EQ(breakpoints(c3, c3.singleton(0)), (std::vector<double>{0.25, 0.5}));
}

TEST(Evolving, GaugesOnLazyThreeCycle) {
  const ChainKernel c3 = cycle(3, 0.5).chain;
  const StateSet s = c3.singleton(0);
  EXPECT_NEAR(psi(c3, s), 0.75 - std::sqrt(3.0) / 4.0, 1e-15);
  EXPECT_NEAR(varphi(c3, s), 0.5, 1e-15);
  EXPECT_NEAR(theta(c3, s), std::sqrt(0.5), 1e-15);
}

TEST(Evolving, PsiAndThetaMatchOracleOnRandomChain) {
  const ChainKernel chain = random_chain(8, 17).chain;
  for (std::uint64_t mask = 1; mask < 255; ++mask) {
    const StateSet s = StateSet::from_mask(mask, chain.pi());
    EXPECT_NEAR(psi(chain, s), oracle::psi(chain, mask), 1e-12) << mask;
    EXPECT_NEAR(theta(chain, s), oracle::theta(chain, mask), 1e-12) << mask;
  }
}

TEST(Evolving, GaugeInequalitiesOnAllSets) {
  const ChainKernel chain = random_chain(8, 4, {.density = 0.6, .holding = 0.3}).chain;
  const double g = std::min(chain.gamma(), 0.5);
  ASSERT_GT(g, 0.0);
  const double coefficient = g * g / (2.0 * (1.0 - g) * (1.0 - g));
  for (std::uint64_t mask = 1; mask < 255; ++mask) {
    const StateSet s = StateSet::from_mask(mask, chain.pi());
    if (s.measure() > 0.5) continue;
    const double phi = conductance(chain, s);
    const double ps = psi(chain, s);
    EXPECT_GE(ps + 1e-12, coefficient * phi * phi);
    EXPECT_GE(theta(chain, s) + 1e-12, phi);
    EXPECT_GE(varphi(chain, s) + 1e-12, g * phi / (1.0 - g));
    EXPECT_LE(ps, 1.0);
    EXPECT_GE(ps, -1e-15);
  }
}

TEST(Evolving, TraceIsReproducibleAndConsistent) {
  const ChainKernel chain = lazy_box(4).chain;
  const StateSet start = chain.singleton(5);
  for (TraceMode mode : {TraceMode::plain, TraceMode::doob_exact, TraceMode::doob_weighted}) {
    const EvolvingTrace a = sample_trace(chain, start, 30, 99, mode);
    const EvolvingTrace b = sample_trace(chain, start, 30, 99, mode);
    ASSERT_EQ(a.steps(), 30u);
    for (std::size_t k = 0; k < a.steps(); ++k) {
      EXPECT_EQ(a.sets[k + 1], b.sets[k + 1]);
      EXPECT_EQ(a.sets[k + 1], evolve_step(chain, a.sets[k], a.u_draws[k]));
      EXPECT_NEAR(a.weights[k + 1], a.sets[k + 1].measure() / start.measure(), 1e-12);
    }
    if (mode == TraceMode::doob_exact) {
      for (const StateSet& s : a.sets) EXPECT_FALSE(s.empty());
    }
  }
}

TEST(Evolving, TraceRejectsEmptyStart) {
  const ChainKernel chain = cycle(3, 0.5).chain;
  try {
    sample_trace(chain, chain.none(), 3, 1, TraceMode::plain);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::EmptyStart);
  }
}

TEST(Evolving, ZStatistic) {
  const ChainKernel c3 = cycle(3, 0.5).chain;
  EvolvingTrace t;
  t.sets = {c3.singleton(0), c3.subset({0, 1}), c3.none()};
  EXPECT_NEAR(t.z(0), std::sqrt(1.0 / 3.0) * 3.0, 1e-14);
  EXPECT_NEAR(t.z(1), std::sqrt(1.0 / 3.0) * 1.5, 1e-14);
  EXPECT_TRUE(std::isnan(t.z(2)));
}

TEST(Evolving, TraceCsvHeader) {
  const ChainKernel c3 = cycle(3, 0.5).chain;
  std::ostringstream out;
  write_trace_csv(out, sample_trace(c3, c3.singleton(0), 2, 1, TraceMode::plain));
  const std::string text = out.str();
  EXPECT_EQ(text.substr(0, text.find('\n')), "step,set,measure,weight,u");
}

TEST(Evolving, ModeNames) {
  for (TraceMode mode : {TraceMode::plain, TraceMode::doob_exact, TraceMode::doob_weighted}) {
    EXPECT_EQ(parse_trace_mode(to_string(mode)), mode);
  }
  EXPECT_THROW(parse_trace_mode("bogus"), Error);
}

TEST(Evolving, TransitionEstimateWithinErrorBars) {
  const ChainKernel c3 = cycle(3, 0.5).chain;
  const oracle::Matrix p2 = oracle::power(c3, 2);
  const Estimate est = estimate_transition(c3, 0, 0, 2, 20000, 7);
  EXPECT_NEAR(p2[0][0], 0.375, 1e-15);
  EXPECT_NEAR(est.value, p2[0][0], 5.0 * est.standard_error + 1e-9);
}

TEST(Evolving, GaugesOnLazyTwoCycle) {
  const ChainKernel c2 = make_benchmark("c2").chain;
  const StateSet s = c2.singleton(0);
  EXPECT_NEAR(psi(c2, s), 1.0 - std::sqrt(2.0) / 2.0, 1e-15);
  EXPECT_NEAR(varphi(c2, s), 0.5, 1e-15);
  EXPECT_NEAR(theta(c2, s), 1.0 / std::sqrt(2.0), 1e-15);
  EXPECT_EQ(breakpoints(c2, s), (std::vector<double>{0.5}));
}

TEST(Evolving, DoobExactLeavesSingletonForWholeSpace) {
  const ChainKernel c2 = make_benchmark("c2").chain;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const EvolvingTrace t = sample_trace(c2, c2.singleton(0), 1, seed, TraceMode::doob_exact);
    EXPECT_TRUE(t.sets[1].is_full());
  }
}
