// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "evoset/bounds.hpp"
#include "evoset/error.hpp"
#include "evoset/evolving.hpp"
#include "evoset/exact_mixing.hpp"
#include "evoset/generators.hpp"
#include "evoset/profiles.hpp"
#include "evoset/rng.hpp"
#include "evoset/set_kernel.hpp"
#include "evoset/verify.hpp"

using namespace evoset;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

std::string fmt(const char* format, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, format, args...);
  return buf;
}

// Random irreducible chains with n <= 10, mixing reversible and nonreversible, lazy and not.
std::vector<ChainKernel> small_corpus(std::size_t count, std::size_t max_states) {
  std::vector<ChainKernel> chains;
  Rng rng(20240601);
  const double holdings[] = {0.0, 0.1, 0.3, 0.5};
  for (std::size_t i = 0; i < count; ++i) {
    RandomChainOptions options;
    options.density = 0.2 + 0.6 * rng.uniform_open();
    options.holding = holdings[i % 4];
    options.reversible = i % 3 == 0;
    const std::size_t n = 2 + static_cast<std::size_t>(rng.below(max_states - 1));
    chains.push_back(random_chain(n, 1000 + i, options).chain);
  }
  return chains;
}

Outcome evolving_set_identity() {
  Outcome o;
  const auto start = std::chrono::steady_clock::now();
  double worst = 0.0;
  for (const ChainKernel& chain : small_corpus(50, 10)) {
    const std::size_t n = chain.size();
    const SetChainKernel kernel = set_kernel(chain);
    for (StateId x = 0; x < n; ++x) {
      PowerSequence powers(chain);
      std::vector<double> dist(kernel.subset_count(), 0.0);
      dist[SubsetIndex{1} << x] = 1.0;
      for (std::size_t k = 1; k <= 20; ++k) {
        dist = kernel.step(dist);
        powers.step();
        for (StateId y = 0; y < n; ++y) {
          double hit = 0.0;
          for (SubsetIndex a = 0; a < kernel.subset_count(); ++a) {
            if ((a >> y) & 1u) hit += dist[a];
          }
          worst = std::max(worst, std::abs(powers.at(x, y) - chain.pi(y) / chain.pi(x) * hit));
        }
      }
    }
  }
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  o.pass = worst < 1e-10 && seconds < 120.0;
  o.detail = fmt("max deviation %.3g over 50 chains, %.1f s", worst, seconds);
  return o;
}

Outcome structural_suite() {
  Outcome o;
  const std::vector<std::string> wanted{"martingale", "duality", "doob_row_sums", "doob_power"};
  std::vector<double> worst(wanted.size(), 0.0);
  VerifyOptions options;
  options.max_steps = 20;
  for (const ChainKernel& chain : small_corpus(50, 10)) {
    for (const PropertyCheck& c : run_verify_suite(chain, VerifySuite::identities, options)) {
      const auto it = std::find(wanted.begin(), wanted.end(), c.property);
      if (it != wanted.end()) {
        auto& w = worst[static_cast<std::size_t>(it - wanted.begin())];
        w = std::max(w, c.max_violation);
      }
    }
  }
  for (std::size_t i = 0; i < wanted.size(); ++i) {
    o.pass &= worst[i] < 1e-12;
    o.detail += fmt("%s%s %.3g", i ? ", " : "", wanted[i].c_str(), worst[i]);
  }
  return o;
}

Outcome inequality_suite() {
  Outcome o;
  std::size_t failures = 0;
  std::size_t properties = 0;
  const double holdings[] = {0.1, 0.25, 0.5, 0.6};
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    RandomChainOptions chain_options;
    chain_options.holding = holdings[seed % 4];
    chain_options.reversible = seed % 2 == 0;
    const std::size_t n = 2 + seed % 7;
    const ChainKernel chain = random_chain(n, seed, chain_options).chain;
    VerifyOptions options;
    options.seed = seed;
    options.random_sets = 200;
    for (const PropertyCheck& c : run_verify_suite(chain, VerifySuite::inequalities, options)) {
      ++properties;
      if (!c.pass()) {
        ++failures;
        if (failures <= 3) o.detail += fmt("[seed %llu %s %.3g] ", static_cast<unsigned long long>(seed),
                                           c.property.c_str(), c.max_violation);
      }
    }
  }
  o.pass = failures == 0;
  o.detail += fmt("%zu violations in %zu property checks over 100 chains", failures, properties);
  return o;
}

Outcome bound_soundness() {
  Outcome o;
  const auto start = std::chrono::steady_clock::now();
  const std::vector<Benchmark> chains{cycle(2, 0.5), cycle(3, 0.5), lazy_box(3),  lazy_box(4),
                                      hypercube(3),  hypercube(4),  clique(8),    lamplighter_cycle(3)};
  VerifyOptions options;
  options.epsilons = {0.5, 0.25, 0.125};
  std::size_t failures = 0;
  std::size_t checks = 0;
  for (const Benchmark& b : chains) {
    for (const PropertyCheck& c : run_verify_suite(b.chain, VerifySuite::bounds, options)) {
      ++checks;
      if (!c.pass()) {
        ++failures;
        o.detail += fmt("[%s %s %.3g] ", b.name.c_str(), c.property.c_str(), c.max_violation);
      }
    }
  }
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  o.pass = failures == 0 && seconds < 600.0;
  o.detail += fmt("%zu failures in %zu checks, %.1f s", failures, checks, seconds);
  return o;
}

Outcome box_scaling(std::size_t& tau16) {
  Outcome o;
  std::vector<std::size_t> taus;
  for (std::size_t side : {4u, 8u, 16u, 32u}) taus.push_back(tau_uniform(lazy_box(side).chain, 0.25));
  tau16 = taus[2];
  o.detail = fmt("tau(1/4) = %zu, %zu, %zu, %zu; ratios", taus[0], taus[1], taus[2], taus[3]);
  for (std::size_t i = 1; i < taus.size(); ++i) {
    const double ratio = static_cast<double>(taus[i]) / static_cast<double>(taus[i - 1]);
    o.pass &= ratio >= 3.0 && ratio <= 5.0;
    o.detail += fmt(" %.3f", ratio);
  }
  o.detail += "; holes:";
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    const std::size_t t = tau_uniform(lazy_box(16, random_holes(16, 0.1, seed)).chain, 0.25);
    const double ratio = static_cast<double>(t) / static_cast<double>(tau16);
    o.pass &= ratio <= 4.0 && ratio >= 0.25;
    o.detail += fmt(" %zu", t);
  }
  return o;
}

Outcome percolation(std::size_t tau16) {
  Outcome o;
  o.detail = "tau(1/4) =";
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    try {
      const std::size_t t = tau_uniform(percolation_box(16, 0.8, seed).chain, 0.25);
      const double ratio = static_cast<double>(t) / static_cast<double>(tau16);
      o.pass &= ratio <= 8.0 && ratio >= 0.125;
      o.detail += fmt(" %zu", t);
    } catch (const Error& e) {
      o.pass = false;
      o.detail += fmt(" [seed %llu: %s]", static_cast<unsigned long long>(seed), e.what());
    }
  }
  o.detail += fmt(" vs intact %zu", tau16);
  return o;
}

Outcome lamplighter() {
  Outcome o;
  double previous = 0.0;
  o.detail = "tau/tau_V =";
  for (std::size_t n : {4u, 6u, 8u}) {
    const ChainKernel chain = lamplighter_cycle(n).chain;
    MixingOptions options;
    options.epsilons = {0.25};
    const MixingReport r = mixing_report(chain, options);
    if (!r.tau_uniform[0] || !r.tau_tv[0]) {
      o.pass = false;
      continue;
    }
    const double ratio = static_cast<double>(*r.tau_uniform[0]) / static_cast<double>(*r.tau_tv[0]);
    o.pass &= ratio > previous;
    previous = ratio;
    o.detail += fmt(" %zu/%zu=%.4f", *r.tau_uniform[0], *r.tau_tv[0], ratio);
  }
  return o;
}

Outcome separation() {
  Outcome o;
  const ChainKernel k64 = clique(64).chain;
  const std::size_t tv = tau_tv(k64, 0.25);
  const std::size_t unif = tau_uniform(k64, 0.25);
  o.pass = tv <= 2 && unif >= 4;
  o.detail = fmt("clique(64) tau_V %zu tau %zu; two_expanders ratio", tv, unif);
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    const ChainKernel chain = two_expanders(64, 256, 4, seed).chain;
    const double ratio = static_cast<double>(tau_uniform(chain, 0.25)) / static_cast<double>(tau_tv(chain, 0.25));
    o.pass &= ratio >= 2.0;
    o.detail += fmt(" %.3f", ratio);
  }
  return o;
}

Outcome gap_bound() {
  Outcome o;
  std::vector<Benchmark> chains{cycle(2, 0.0), cycle(2, 0.5), cycle(3, 0.5), cycle(6, 0.5), cycle(12, 0.5), lazy_box(2),
                                lazy_box(3),   hypercube(2),  hypercube(3),  clique(8),      clique(12)};
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    RandomChainOptions options;
    options.reversible = true;
    options.holding = seed % 2 == 0 ? 0.5 : 0.2;
    chains.push_back(random_chain(4 + seed % 9, seed, options));
  }
  std::size_t violations = 0;
  for (const Benchmark& b : chains) {
    const double gap = spectral_gap(b.chain);
    double lower = 0.0;
    // psi_* vanishes for periodic chains; the bound is then trivially 0.
    try {
      lower = gap_lower_bound(b.chain).value;
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::ZeroConductance) throw;
    }
    if (gap < lower - 1e-12) ++violations;
  }
  const ChainKernel c3 = cycle(3, 0.5).chain;
  const double gap = spectral_gap(c3);
  const double psi_star = gap_lower_bound(c3).psi_star;
  o.pass = violations == 0 && std::abs(gap - 0.75) < 1e-12 && std::abs(psi_star - 0.316987) < 1e-6 &&
           std::abs(psi_star - (0.75 - std::sqrt(3.0) / 4.0)) < 1e-9;
  o.detail = fmt("%zu violations over %zu chains; C3 gap %.12f psi_* %.12f", violations, chains.size(), gap,
                 psi_star);
  return o;
}

Outcome hypercube_profile() {
  Outcome o;
  double lo = std::numeric_limits<double>::infinity();
  double hi = 0.0;
  o.detail = "bound_n =";
  for (std::size_t n = 4; n <= 10; ++n) {
    const Benchmark cube = hypercube(n);
    const StepFunctionProfile psi = root_profile(cube.chain, Family{cube.family});
    const BoundReport r = chi_square_bound(psi, std::ldexp(1.0, -static_cast<int>(n)), 0.25);
    const double scaled = r.bound / (static_cast<double>(n) * std::log(static_cast<double>(n)));
    lo = std::min(lo, scaled);
    hi = std::max(hi, scaled);
    o.detail += fmt(" %.0f", r.bound);
  }
  o.pass = hi / lo <= 2.0;
  o.detail += fmt("; bound/(n ln n) in [%.3f, %.3f], spread %.3f", lo, hi, hi / lo);
  return o;
}

Outcome decay_recursion() {
  Outcome o;
  Rng rng(77);
  std::size_t failures = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const double a = 0.01 + 0.4 * rng.uniform_open();
    const double b = rng.uniform_open();
    const double c = 0.5 + 1.5 * rng.uniform_open();
    const auto f = [=](double z) { return std::min(1.0, a + b * std::pow(z, c)); };
    const double l0 = 0.5 + 9.5 * rng.uniform_open();
    const double delta = l0 * std::pow(10.0, -1.0 - 5.0 * rng.uniform_open());
    const std::size_t steps = lemma_rr_steps(f, l0, delta);
    double level = l0;
    for (std::size_t k = 0; k < steps; ++k) level *= 1.0 - f(level);
    if (level > delta) ++failures;
  }
  o.pass = failures == 0;
  o.detail = fmt("%zu failures in 100 trials", failures);
  return o;
}

Outcome continuous_consistency() {
  Outcome o;
  double worst = 0.0;
  for (const ChainKernel& chain : small_corpus(20, 10)) {
    const ChainKernel lazy = lazify(chain, 0.5);
    for (double t : {0.3, 1.7, 5.0}) {
      const DenseKernel direct = continuous_kernel(chain, t);
      const DenseKernel doubled = continuous_kernel(lazy, 2.0 * t);
      for (std::size_t i = 0; i < direct.values.size(); ++i) {
        worst = std::max(worst, std::abs(direct.values[i] - doubled.values[i]));
      }
    }
  }
  // Two-state chain with rates p (0 -> 1) and q (1 -> 0).
  const double p = 0.3;
  const double q = 0.6;
  const ChainKernel two = build_chain({{{0, 1 - p}, {1, p}}, {{0, q}, {1, 1 - q}}});
  double closed = 0.0;
  for (double t : {0.1, 1.0, 4.0}) {
    const auto h = continuous_distribution(two, 0, t);
    closed = std::max(closed, std::abs(h[0] - (q + p * std::exp(-(p + q) * t)) / (p + q)));
  }
  // Deterministic two-cycle mixes at ln(4)/2, the lazy one at ln(4).
  const double resolution = 0.01;
  const double tau_error =
      std::max(std::abs(tau_uniform_continuous(cycle(2, 0.0).chain, 0.25, 10.0, resolution) - std::log(4.0) / 2.0),
               std::abs(tau_uniform_continuous(cycle(2, 0.5).chain, 0.25, 10.0, resolution) - std::log(4.0)));
  o.pass = worst < 1e-10 && closed < 1e-10 && tau_error <= resolution / 100.0;
  o.detail = fmt("time-change %.3g, two-state kernel %.3g, two-cycle tau errors %.3g", worst, closed, tau_error);
  return o;
}

}  // namespace

int main() {
  std::size_t tau16 = 0;
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"evolving-set transition identity", evolving_set_identity},
      {"structural identities", structural_suite},
      {"gauge inequalities", inequality_suite},
      {"bound soundness", bound_soundness},
      {"box scaling", [&] { return box_scaling(tau16); }},
      {"percolation robustness", [&] { return percolation(tau16); }},
      {"lamplighter separation", lamplighter},
      {"uniform versus total-variation separation", separation},
      {"spectral gap lower bound", gap_bound},
      {"hypercube restricted profile", hypercube_profile},
      {"decay recursion steps", decay_recursion},
      {"continuous-time consistency", continuous_consistency},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    if (!o.pass) ++failed;
    std::printf("%s %2zu %s: %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(), o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria failed\n", failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
