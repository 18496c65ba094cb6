#include <gtest/gtest.h>

#include <cmath>
#include <nlohmann/json.hpp>

#include "evoset/error.hpp"
#include "evoset/exact_mixing.hpp"
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

TEST(ExactMixing, LazyThreeCycleConstants) {
  const ChainKernel c3 = cycle(3, 0.5).chain;
  EXPECT_NEAR(transition_power(c3, 2)(0, 0), 0.375, 1e-15);
  EXPECT_EQ(tau_uniform(c3, 0.25), 2u);
  EXPECT_EQ(tau_tv(c3, 0.25), 1u);
  EXPECT_NEAR(spectral_gap(c3), 0.75, 1e-12);
}

TEST(ExactMixing, PowersMatchOracle) {
  const ChainKernel chain = random_chain(9, 12, {.density = 0.3}).chain;
  PowerSequence seq(chain);
  for (std::size_t k = 0; k <= 250; ++k) {
    if (k % 50 == 0) {
      const oracle::Matrix p = oracle::power(chain, k);
      for (StateId x = 0; x < 9; ++x) {
        for (StateId y = 0; y < 9; ++y) EXPECT_NEAR(seq.at(x, y), p[x][y], 1e-12);
      }
      EXPECT_NEAR(seq.stats(false).max_relative_deviation, oracle::max_relative_deviation(p, chain), 1e-10);
    }
    seq.step();
  }
  const auto mu = distribution_at(chain, 3, 7);
  const oracle::Matrix p7 = oracle::power(chain, 7);
  for (StateId y = 0; y < 9; ++y) EXPECT_NEAR(mu[y], p7[3][y], 1e-13);
}

TEST(ExactMixing, TauMatchesOracle) {
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    const ChainKernel chain = random_chain(7, seed, {.holding = 0.1}).chain;
    for (double eps : {0.5, 0.25, 0.1}) {
      EXPECT_EQ(tau_uniform(chain, eps), oracle::tau_uniform(chain, eps));
      EXPECT_LE(tau_tv(chain, eps), tau_uniform(chain, eps));
    }
  }
}

TEST(ExactMixing, PeriodicChainNeverMixes) {
  const ChainKernel c2 = cycle(2, 0.0).chain;
  EXPECT_EQ(kind_of([&] { tau_uniform(c2, 0.25, 500); }), ErrorKind::NotMixed);
  EXPECT_EQ(kind_of([&] { tau_tv(c2, 0.25, 500); }), ErrorKind::NotMixed);
  EXPECT_EQ(kind_of([&] { chi_square_time(c2, 0, 0.25, 500); }), ErrorKind::NotMixed);
}

TEST(ExactMixing, DistancesAgree) {
  const std::vector<double> pi{0.25, 0.25, 0.5};
  const std::vector<double> mu{0.5, 0.25, 0.25};
  EXPECT_NEAR(chi_square(mu, pi), chi_square_moment_form(mu, pi), 1e-15);
  EXPECT_NEAR(chi_square(mu, pi), 0.25 + 0.0 + 0.125, 1e-15);
  EXPECT_NEAR(total_variation(mu, pi), 0.25, 1e-15);
  EXPECT_LE(2.0 * total_variation(mu, pi), std::sqrt(chi_square(mu, pi)));
}

TEST(ExactMixing, HypercubeGap) {
  EXPECT_NEAR(spectral_gap(hypercube(4).chain), 0.25, 1e-12);
  EXPECT_NEAR(spectral_gap(clique(8).chain), 0.5 + 0.5 / 7.0, 1e-12);
}

TEST(ExactMixing, SpectralGapErrors) {
  EXPECT_EQ(kind_of([] { spectral_gap(random_chain(6, 1).chain); }), ErrorKind::NotReversible);
}

TEST(ExactMixing, TwoStateContinuousClosedForm) {
  const ChainKernel c2 = cycle(2, 0.0).chain;
  for (double t : {0.0, 0.1, 0.7, 3.0, 20.0}) {
    const auto h = continuous_distribution(c2, 0, t);
    EXPECT_NEAR(h[0], (1.0 + std::exp(-2.0 * t)) / 2.0, 1e-11) << t;
    EXPECT_NEAR(h[1], (1.0 - std::exp(-2.0 * t)) / 2.0, 1e-11) << t;
  }
  const double tau = tau_uniform_continuous(c2, 0.25, 10.0, 0.01);
  EXPECT_NEAR(tau, std::log(4.0) / 2.0, 1e-4);
  EXPECT_EQ(kind_of([&] { tau_uniform_continuous(c2, 1e-9, 1.0, 0.01); }), ErrorKind::NotMixed);
}

TEST(ExactMixing, ContinuousKernelIsStochasticAndStationary) {
  const ChainKernel chain = random_chain(8, 4).chain;
  const DenseKernel h = continuous_kernel(chain, 2.5);
  for (std::size_t y = 0; y < 8; ++y) {
    double row = 0.0, col = 0.0;
    for (std::size_t x = 0; x < 8; ++x) {
      row += h(y, x);
      col += chain.pi(static_cast<StateId>(x)) * h(x, y);
    }
    EXPECT_NEAR(row, 1.0, 1e-12);
    EXPECT_NEAR(col, chain.pi(static_cast<StateId>(y)), 1e-12);
  }
}

TEST(ExactMixing, ReportJson) {
  MixingOptions options;
  options.epsilons = {0.5, 0.25};
  const MixingReport r = mixing_report(cycle(3, 0.5).chain, options);
  ASSERT_EQ(r.tau_uniform.size(), 2u);
  EXPECT_EQ(r.tau_uniform[1], 2u);
  const auto j = nlohmann::json::parse(to_json(r));
  EXPECT_EQ(j["tau"]["0.25"], 2);
  EXPECT_EQ(j["tau_tv"]["0.25"], 1);
  EXPECT_NEAR(j["gap"].get<double>(), 0.75, 1e-12);
  EXPECT_EQ(j["params"]["states"], 3);
  EXPECT_FALSE(j["chi_curve"].empty());
}

TEST(ExactMixing, ReportOnPeriodicChain) {
  MixingOptions options;
  options.n_max = 50;
  const MixingReport r = mixing_report(cycle(2, 0.0).chain, options);
  EXPECT_FALSE(r.tau_uniform[0].has_value());
  EXPECT_EQ(r.steps_run, 50u);
  EXPECT_TRUE(nlohmann::json::parse(to_json(r))["tau"]["0.25"].is_null());
}
