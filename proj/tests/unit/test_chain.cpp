#include <gtest/gtest.h>

#include <cmath>

#include "evoset/chain.hpp"
#include "evoset/error.hpp"
#include "evoset/generators.hpp"
#include "oracles.hpp"

using namespace evoset;

namespace {

ErrorKind kind_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorKind::InvalidArgument;
}

}  // namespace

TEST(Chain, LazyTwoCycleConstants) {
  const ChainKernel c2 = make_benchmark("c2").chain;
  EXPECT_DOUBLE_EQ(c2.gamma(), 0.5);
  EXPECT_DOUBLE_EQ(c2.prob(0, 1), 0.5);
  EXPECT_NEAR(q_flow(c2, c2.singleton(0), c2.singleton(1)), 0.25, 1e-15);
}

TEST(Chain, DeterministicTwoCycleConstants) {
  const ChainKernel c2 = cycle(2, 0.0).chain;
  EXPECT_EQ(c2.size(), 2u);
  EXPECT_DOUBLE_EQ(c2.pi(0), 0.5);
  EXPECT_DOUBLE_EQ(c2.gamma(), 0.0);
  EXPECT_TRUE(c2.reversible());
  EXPECT_DOUBLE_EQ(c2.prob(0, 1), 1.0);
}

TEST(Chain, LazyThreeCycleConstants) {
  const ChainKernel c3 = cycle(3, 0.5).chain;
  for (StateId x = 0; x < 3; ++x) EXPECT_NEAR(c3.pi(x), 1.0 / 3.0, 1e-15);
  EXPECT_DOUBLE_EQ(c3.gamma(), 0.5);
  EXPECT_DOUBLE_EQ(c3.prob(0, 1), 0.25);
  EXPECT_DOUBLE_EQ(c3.prob(0, 2), 0.25);
  EXPECT_NEAR(conductance(c3, c3.singleton(0)), 0.5, 1e-15);
}

TEST(Chain, StationarySolveMatchesPowerLimit) {
  SparseRows rows{{{0, 0.2}, {1, 0.8}}, {{0, 0.3}, {2, 0.7}}, {{0, 0.6}, {2, 0.4}}};
  const ChainKernel chain = build_chain(rows);
  const oracle::Matrix p = oracle::power(chain, 400);
  for (StateId y = 0; y < 3; ++y) EXPECT_NEAR(chain.pi(y), p[0][y], 1e-12);
  EXPECT_FALSE(chain.reversible());
}

TEST(Chain, ValidationErrors) {
  EXPECT_EQ(kind_of([] { build_chain({{{0, 0.5}}, {{1, 1.0}}}); }), ErrorKind::NotStochastic);
  EXPECT_EQ(kind_of([] { build_chain({{{0, 1.0}}, {{1, 1.0}}}); }), ErrorKind::Reducible);
  EXPECT_EQ(kind_of([] { build_chain({{{0, -0.5}, {1, 1.5}}, {{0, 1.0}}}); }),
            ErrorKind::NotStochastic);
  EXPECT_EQ(kind_of([] {
              build_chain({{{1, 1.0}}, {{0, 1.0}}}, std::vector<double>{0.9, 0.1});
            }),
            ErrorKind::BadStationary);
}

TEST(Chain, SuppliedPiIsNormalized) {
  const ChainKernel chain = build_chain({{{1, 1.0}}, {{0, 1.0}}}, std::vector<double>{3.0, 3.0});
  EXPECT_DOUBLE_EQ(chain.pi(0), 0.5);
}

TEST(Chain, TimeReversalIsInvolutionAndPreservesPi) {
  const ChainKernel chain = random_chain(7, 11).chain;
  const ChainKernel rev = time_reversal(chain);
  const ChainKernel back = time_reversal(rev);
  for (StateId x = 0; x < 7; ++x) {
    EXPECT_NEAR(rev.pi(x), chain.pi(x), 1e-14);
    for (StateId y = 0; y < 7; ++y) {
      EXPECT_NEAR(back.prob(x, y), chain.prob(x, y), 1e-12);
      EXPECT_NEAR(rev.flow(y, x), chain.flow(x, y), 1e-14);
    }
  }
}

TEST(Chain, ReversalKeepsConductance) {
  const ChainKernel chain = random_chain(8, 5).chain;
  const ChainKernel rev = time_reversal(chain);
  for (std::uint64_t mask = 1; mask < 255; mask += 7) {
    const StateSet s = StateSet::from_mask(mask, chain.pi());
    EXPECT_NEAR(conductance(chain, s), conductance(rev, s), 1e-12);
  }
}

TEST(Chain, LazifyMixesIdentity) {
  const ChainKernel c2 = cycle(2, 0.0).chain;
  const ChainKernel lazy = lazify(c2, 0.25);
  EXPECT_DOUBLE_EQ(lazy.prob(0, 0), 0.25);
  EXPECT_DOUBLE_EQ(lazy.prob(0, 1), 0.75);
  EXPECT_DOUBLE_EQ(lazy.gamma(), 0.25);
  EXPECT_THROW(lazify(c2, 1.0), Error);
}

TEST(Chain, FlowSymmetryAcrossCut) {
  const ChainKernel chain = random_chain(9, 3).chain;
  for (std::uint64_t mask = 1; mask < 511; mask += 13) {
    const StateSet s = StateSet::from_mask(mask, chain.pi());
    const StateSet c = s.complement(chain.pi());
    EXPECT_NEAR(q_flow(chain, s, c), q_flow(chain, c, s), 1e-13);
  }
}

TEST(Chain, ConductanceMatchesOracle) {
  const ChainKernel chain = random_chain(6, 21).chain;
  for (std::uint64_t mask = 1; mask < 63; ++mask) {
    EXPECT_NEAR(conductance(chain, StateSet::from_mask(mask, chain.pi())),
                oracle::conductance(chain, mask), 1e-12);
  }
}
