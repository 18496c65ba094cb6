#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "evoset/error.hpp"
#include "evoset/exact_mixing.hpp"
#include "evoset/generators.hpp"

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

TEST(Generators, BoxStationaryIsDegreeProportional) {
  const ChainKernel chain = lazy_box(3).chain;
  EXPECT_EQ(chain.size(), 9u);
  EXPECT_DOUBLE_EQ(chain.gamma(), 0.5);
  EXPECT_TRUE(chain.reversible());
  // Degrees 2 (corners), 3 (edges), 4 (centre): total 24.
  EXPECT_NEAR(chain.pi(0), 2.0 / 24.0, 1e-15);
  EXPECT_NEAR(chain.pi(1), 3.0 / 24.0, 1e-15);
  EXPECT_NEAR(chain.pi(4), 4.0 / 24.0, 1e-15);
  EXPECT_NEAR(chain.prob(4, 1), 0.125, 1e-15);
}

TEST(Generators, BoxFamilyIsColumnBlocks) {
  const Benchmark b = lazy_box(4);
  ASSERT_FALSE(b.family.empty());
  for (std::size_t i = 1; i < b.family.size(); ++i) {
    EXPECT_GT(b.family[i].measure(), b.family[i - 1].measure());
  }
}

TEST(Generators, BoxHoles) {
  const std::vector<Cell> holes{{1, 1}};
  const Benchmark b = lazy_box(3, holes);
  EXPECT_EQ(b.chain.size(), 8u);
  const std::vector<Cell> cut{{0, 1}, {1, 0}};
  EXPECT_EQ(kind_of([&] { lazy_box(3, cut); }), ErrorKind::Disconnected);
  const auto r1 = random_holes(16, 0.1, 1);
  EXPECT_EQ(r1, random_holes(16, 0.1, 1));
  EXPECT_EQ(r1.size(), 26u);
  EXPECT_EQ(lazy_box(16, r1).chain.size(), 256u - 26u);
}

TEST(Generators, PercolationKeepsGiantComponent) {
  const Benchmark b = percolation_box(16, 0.8, 3);
  EXPECT_LE(b.chain.size(), 256u);
  EXPECT_GT(b.chain.size(), 128u);
  EXPECT_DOUBLE_EQ(b.chain.gamma(), 0.5);
  bool noted = false;
  for (const auto& n : b.notes) noted |= n.rfind("component_size=", 0) == 0;
  EXPECT_TRUE(noted);
  EXPECT_EQ(percolation_box(16, 0.8, 3).chain.size(), b.chain.size());
  EXPECT_THROW(percolation_box(16, 0.4, 3), Error);
}

TEST(Generators, LamplighterStructure) {
  const ChainKernel chain = lamplighter_cycle(4).chain;
  EXPECT_EQ(chain.size(), 64u);
  EXPECT_DOUBLE_EQ(chain.gamma(), 0.5);
  EXPECT_TRUE(chain.reversible());
  EXPECT_NEAR(chain.pi(0), 1.0 / 64.0, 1e-15);
  for (StateId x = 0; x < chain.size(); ++x) EXPECT_EQ(chain.row(x).size(), 4u);
}

TEST(Generators, HypercubeFamilyAndGap) {
  const Benchmark b = hypercube(5);
  EXPECT_EQ(b.chain.size(), 32u);
  EXPECT_FALSE(b.family.empty());
  for (std::size_t i = 1; i < b.family.size(); ++i) {
    EXPECT_GT(b.family[i].count(), b.family[i - 1].count());
    b.family[i - 1].for_each([&](StateId x) { EXPECT_TRUE(b.family[i].contains(x)); });
  }
  EXPECT_NEAR(spectral_gap(b.chain), 0.2, 1e-12);
}

TEST(Generators, TwoExpanders) {
  const Benchmark b = two_expanders(16, 32, 4, 7);
  EXPECT_EQ(b.chain.size(), 48u);
  EXPECT_TRUE(b.chain.reversible());
  EXPECT_GE(b.chain.gamma(), 0.5);
  ASSERT_EQ(b.family.size(), 1u);
  EXPECT_EQ(b.family[0].count(), 16u);
  EXPECT_EQ(kind_of([] { two_expanders(16, 32, 2, 7); }), ErrorKind::BadDegree);
  EXPECT_EQ(kind_of([] { two_expanders(15, 32, 3, 7); }), ErrorKind::BadDegree);
}

TEST(Generators, RandomChainOptions) {
  const ChainKernel plain = random_chain(10, 1).chain;
  EXPECT_EQ(plain.size(), 10u);
  const ChainKernel rev = random_chain(10, 1, {.reversible = true}).chain;
  EXPECT_TRUE(rev.reversible());
  const ChainKernel lazy = random_chain(10, 1, {.holding = 0.5}).chain;
  EXPECT_GE(lazy.gamma(), 0.5);
}

TEST(Generators, MakeBenchmarkNames) {
  EXPECT_EQ(make_benchmark("c2").chain.size(), 2u);
  EXPECT_DOUBLE_EQ(make_benchmark("c3").chain.gamma(), 0.5);
  EXPECT_EQ(make_benchmark("box:side=5").chain.size(), 25u);
  EXPECT_EQ(make_benchmark("box:side=16,holes=0.1,seed=2").chain.size(), 230u);
  EXPECT_EQ(make_benchmark("hypercube:n=3").chain.size(), 8u);
  EXPECT_EQ(make_benchmark("lamplighter:n=3").chain.size(), 24u);
  EXPECT_EQ(make_benchmark("clique:n=5").chain.size(), 5u);
  EXPECT_EQ(make_benchmark("random:n=6,seed=4,reversible=1").name, "random:n=6,seed=4,reversible=1");
}

TEST(Generators, MakeBenchmarkErrors) {
  EXPECT_EQ(kind_of([] { make_benchmark("percolation:side=8,p=0.8"); }), ErrorKind::MissingSeed);
  EXPECT_EQ(kind_of([] { make_benchmark("box:side=8,holes=0.1"); }), ErrorKind::MissingSeed);
  EXPECT_EQ(kind_of([] { make_benchmark("box:side=8,colour=3"); }), ErrorKind::InvalidArgument);
  EXPECT_EQ(kind_of([] { make_benchmark("torus:n=3"); }), ErrorKind::InvalidArgument);
  EXPECT_EQ(kind_of([] { make_benchmark("clique:n=5000"); }), ErrorKind::TooLarge);
}

TEST(Generators, SeededGeneratorsAreDeterministic) {
  const ChainKernel a = two_expanders(16, 16, 3, 9).chain;
  const ChainKernel b = two_expanders(16, 16, 3, 9).chain;
  for (StateId x = 0; x < a.size(); ++x) {
    for (StateId y = 0; y < a.size(); ++y) EXPECT_EQ(a.prob(x, y), b.prob(x, y));
  }
}
