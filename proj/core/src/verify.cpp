#include "evoset/verify.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <functional>
#include <limits>
#include <optional>
#include <ostream>

#include "evoset/bounds.hpp"
#include "evoset/chain_io.hpp"
#include "evoset/error.hpp"
#include "evoset/evolving.hpp"
#include "evoset/exact_mixing.hpp"
#include "evoset/profiles.hpp"
#include "evoset/rng.hpp"
#include "evoset/set_kernel.hpp"

namespace evoset {
namespace {

constexpr double kIdentityTolerance = 1e-12;
constexpr double kInequalityTolerance = 1e-12;

class Checks {
 public:
  PropertyCheck& add(const std::string& name, double tolerance) {
    checks_.push_back({name, 0.0, tolerance, 0});
    return checks_.back();
  }
  std::vector<PropertyCheck> take() const { return {checks_.begin(), checks_.end()}; }

 private:
  std::deque<PropertyCheck> checks_;  // stable references across add()
};

void record(PropertyCheck& check, double violation) {
  ++check.cases;
  if (std::isnan(violation)) violation = std::numeric_limits<double>::infinity();
  check.max_violation = std::max(check.max_violation, violation);
}

/// lhs >= rhs, violation measured as the shortfall.
void record_at_least(PropertyCheck& check, double lhs, double rhs) { record(check, std::max(0.0, rhs - lhs)); }

/// Proper nonempty subsets to test: all of them when small enough, else random ones.
std::vector<StateSet> test_sets(const ChainKernel& chain, const VerifyOptions& options) {
  const std::size_t n = chain.size();
  std::vector<StateSet> sets;
  if (n <= kMaxExhaustiveStates) {
    const std::uint64_t count = std::uint64_t{1} << n;
    sets.reserve(count - 2);
    for (std::uint64_t s = 1; s + 1 < count; ++s) sets.push_back(StateSet::from_mask(s, chain.pi()));
    return sets;
  }
  if (!options.monte_carlo) {
    throw Error(ErrorKind::TooLarge, "exhaustive set checks need <= " + std::to_string(kMaxExhaustiveStates) +
                                         " states; request the monte-carlo fallback");
  }
  Rng rng(options.seed);
  while (sets.size() < options.random_sets) {
    std::vector<StateId> members;
    for (StateId x = 0; x < n; ++x) {
      if (rng.bernoulli(0.5)) members.push_back(x);
    }
    if (members.empty() || members.size() == n) continue;
    sets.push_back(chain.subset(members));
  }
  return sets;
}

std::vector<DenseKernel> powers(const ChainKernel& chain, std::size_t count) {
  std::vector<DenseKernel> out;
  PowerSequence seq(chain);
  out.push_back(seq.dense());
  while (out.size() <= count) {
    seq.step();
    out.push_back(seq.dense());
  }
  return out;
}

/// Distributions over subsets after 0..steps steps of K from the singleton {x}.
std::vector<std::vector<double>> set_distributions(const SetChainKernel& kernel, StateId x, std::size_t steps) {
  std::vector<std::vector<double>> out;
  std::vector<double> dist(kernel.subset_count(), 0.0);
  dist[SubsetIndex{1} << x] = 1.0;
  out.push_back(dist);
  for (std::size_t k = 0; k < steps; ++k) out.push_back(kernel.step(out.back()));
  return out;
}

void identities(const ChainKernel& chain, const VerifyOptions& options, Checks& checks) {
  const std::size_t n = chain.size();
  {
    auto& c = checks.add("row_sums", kIdentityTolerance);
    for (StateId x = 0; x < n; ++x) {
      double total = 0.0;
      for (const Transition& t : chain.row(x)) total += t.prob;
      record(c, std::abs(total - 1.0));
    }
  }
  {
    auto& c = checks.add("stationarity", kIdentityTolerance);
    for (StateId y = 0; y < n; ++y) {
      double total = 0.0;
      for (const Transition& in : chain.column(y)) total += chain.pi(in.target) * in.prob;
      record(c, std::abs(total - chain.pi(y)));
    }
  }
  const ChainKernel reversed = time_reversal(chain);
  {
    auto& c = checks.add("reversal_involution", kIdentityTolerance);
    const ChainKernel back = time_reversal(reversed);
    for (StateId x = 0; x < n; ++x) {
      for (const Transition& t : chain.row(x)) record(c, std::abs(back.prob(x, t.target) - t.prob));
      for (const Transition& t : back.row(x)) record(c, std::abs(chain.prob(x, t.target) - t.prob));
    }
  }
  {
    auto& flow = checks.add("flow_symmetry", kIdentityTolerance);
    auto& rev = checks.add("reversal_conductance", kIdentityTolerance);
    for (const StateSet& s : test_sets(chain, options)) {
      const StateSet sc = s.complement(chain.pi());
      record(flow, std::abs(q_flow(chain, s, sc) - q_flow(chain, sc, s)));
      record(rev, std::abs(conductance(chain, s) - conductance(reversed, s)));
    }
  }
  if (n <= kMaxDenseStates) {
    auto& c = checks.add("chi_square_forms", kIdentityTolerance);
    PowerSequence seq(chain);
    for (std::size_t k = 0; k <= options.max_steps; ++k) {
      for (StateId x = 0; x < n; ++x) {
        const auto mu = seq.row(x);
        const double direct = chi_square(mu, chain.pi());
        record(c, std::abs(direct - chi_square_moment_form(mu, chain.pi())) / std::max(1.0, direct));
      }
      seq.step();
    }
  }
  if (n <= kMaxVerifySetKernelStates) {
    const SetChainKernel kernel = set_kernel(chain);
    const SubsetIndex full = kernel.full();
    auto& martingale = checks.add("martingale", kIdentityTolerance);
    auto& duality = checks.add("duality", kIdentityTolerance);
    auto& doob_rows = checks.add("doob_row_sums", kIdentityTolerance);
    for (SubsetIndex s = 0; s <= full; ++s) {
      double mean = 0.0, doob_total = 0.0;
      for (const SetTransition& t : kernel.row(s)) {
        mean += t.prob * kernel.measure(t.target);
        record(duality, std::abs(t.prob - kernel.prob(kernel.complement(s), kernel.complement(t.target))));
        if (s != 0) doob_total += kernel.doob_prob(s, t.target);
      }
      record(martingale, std::abs(mean - kernel.measure(s)));
      if (s != 0) record(doob_rows, std::abs(doob_total - 1.0));
    }
    auto& prop4 = checks.add("transition_from_evolving_sets", 1e-10);
    auto& doob_power = checks.add("doob_power", kIdentityTolerance);
    const auto p = powers(chain, options.max_steps);
    for (StateId x = 0; x < n; ++x) {
      const auto dists = set_distributions(kernel, x, options.max_steps);
      std::vector<double> doob(kernel.subset_count(), 0.0);
      const SubsetIndex start = SubsetIndex{1} << x;
      doob[start] = 1.0;
      for (std::size_t k = 0; k <= options.max_steps; ++k) {
        if (k > 0) doob = kernel.doob_step(doob);
        for (SubsetIndex a = 0; a <= full; ++a) {
          record(doob_power, std::abs(doob[a] - kernel.measure(a) / kernel.measure(start) * dists[k][a]));
        }
        for (StateId y = 0; y < n; ++y) {
          double hit = 0.0;
          for (SubsetIndex a = 0; a <= full; ++a) {
            if ((a >> y) & 1u) hit += dists[k][a];
          }
          record(prop4, std::abs(p[k](x, y) - chain.pi(y) / chain.pi(x) * hit));
        }
      }
    }
    if (n <= 8) {
      auto& replicas = checks.add("chi_square_two_replicas", 1e-10);
      const std::size_t steps = std::min<std::size_t>(options.max_steps, 4);
      for (StateId x = 0; x < n; ++x) {
        const auto dists = set_distributions(kernel, x, steps);
        for (std::size_t k = 0; k <= steps; ++k) {
          double expectation = 0.0;
          for (SubsetIndex a = 0; a <= full; ++a) {
            if (dists[k][a] == 0.0) continue;
            for (SubsetIndex b = 0; b <= full; ++b) {
              if (dists[k][b] == 0.0) continue;
              expectation += dists[k][a] * dists[k][b] *
                             (kernel.measure(a & b) - kernel.measure(a) * kernel.measure(b));
            }
          }
          const double chi2 = chi_square(p[k].row(x), chain.pi());
          record(replicas, std::abs(chi2 - expectation / (chain.pi(x) * chain.pi(x))) / std::max(1.0, chi2));
        }
      }
    }
  }
  if (n <= kMaxDenseStates) {
    auto& c = checks.add("uniformization_time_change", 1e-10);
    const ChainKernel lazy = lazify(chain, 0.5);
    for (double t : {0.5, 1.0, 2.0}) {
      const DenseKernel direct = continuous_kernel(chain, t);
      const DenseKernel slowed = continuous_kernel(lazy, 2.0 * t);
      for (std::size_t i = 0; i < direct.values.size(); ++i) {
        record(c, std::abs(direct.values[i] - slowed.values[i]));
      }
    }
  }
}

double increasing_function(int kind, double threshold, double z) {
  switch (kind) {
    case 0: return z;
    case 1: return z * z;
    case 2: return 1.0 - std::exp(-z);
    case 3: return std::min(1.0, z);
    case 4: return z >= threshold ? 1.0 : 0.0;
    default: return std::log1p(z);
  }
}

void inequalities(const ChainKernel& chain, const VerifyOptions& options, Checks& checks) {
  const std::size_t n = chain.size();
  const double gamma = chain.gamma();
  const bool lazy = gamma >= 0.5;
  {
    auto* lemma3 = lazy ? &checks.add("psi_vs_phi_squared", kInequalityTolerance) : nullptr;
    auto* lemma3_gamma = gamma > 0.0 ? &checks.add("psi_vs_phi_squared_gamma", kInequalityTolerance) : nullptr;
    auto* varphi_gamma = gamma > 0.0 ? &checks.add("varphi_vs_phi_gamma", kInequalityTolerance) : nullptr;
    auto& jensen = checks.add("psi_vs_varphi_roots", kInequalityTolerance);
    auto& quadratic = checks.add("varphi_roots_vs_quadratic", kInequalityTolerance);
    auto* theta_psi = lazy ? &checks.add("psi_vs_theta", kInequalityTolerance) : nullptr;
    auto& theta_phi = checks.add("theta_vs_phi", kInequalityTolerance);
    const double g = std::min(gamma, 0.5);
    const double coefficient = g * g / (2.0 * (1.0 - g) * (1.0 - g));
    for (const StateSet& s : test_sets(chain, options)) {
      const double ps = psi(chain, s);
      const double phi = conductance(chain, s);
      const double vp = varphi(chain, s);
      const double th = theta(chain, s);
      if (lemma3) record_at_least(*lemma3, ps, phi * phi / 2.0);
      if (lemma3_gamma) record_at_least(*lemma3_gamma, ps, coefficient * phi * phi);
      if (varphi_gamma) record_at_least(*varphi_gamma, vp, g / (1.0 - g) * phi);
      const double roots = (std::sqrt(1.0 + 2.0 * vp) + std::sqrt(std::max(0.0, 1.0 - 2.0 * vp))) / 2.0;
      record_at_least(jensen, roots, 1.0 - ps);
      record_at_least(quadratic, 1.0 - vp * vp / 2.0, roots);
      if (theta_psi) {
        const double t2 = th * th;
        if (t2 < 2.0) record_at_least(*theta_psi, ps, t2 / (8.0 * std::log(2.0 / t2)));
      }
      record_at_least(theta_phi, th, phi);
    }
  }
  if (n <= kMaxDenseStates) {
    auto& c = checks.add("tv_vs_chi", kInequalityTolerance);
    PowerSequence seq(chain);
    for (std::size_t k = 0; k <= options.max_steps; ++k) {
      for (StateId x = 0; x < n; ++x) {
        const auto mu = seq.row(x);
        record_at_least(c, std::sqrt(chi_square(mu, chain.pi())), 2.0 * total_variation(mu, chain.pi()));
      }
      seq.step();
    }
  }
  if (n <= kMaxVerifySetKernelStates) {
    auto& c = checks.add("chi_vs_evolving_sets", kInequalityTolerance);
    const SetChainKernel kernel = set_kernel(chain);
    const auto p = powers(chain, options.max_steps);
    for (StateId x = 0; x < n; ++x) {
      const auto dists = set_distributions(kernel, x, options.max_steps);
      for (std::size_t k = 0; k <= options.max_steps; ++k) {
        double expectation = 0.0;
        for (SubsetIndex a = 0; a <= kernel.full(); ++a) {
          if (dists[k][a] == 0.0) continue;
          const double m = std::min(kernel.measure(a), kernel.measure(kernel.complement(a)));
          expectation += dists[k][a] * std::sqrt(std::max(0.0, m));
        }
        record_at_least(c, expectation / chain.pi(x), std::sqrt(chi_square(p[k].row(x), chain.pi())));
      }
    }
  }
  if (n <= 10) {
    auto& c = checks.add("composition", kInequalityTolerance);
    const std::size_t horizon = std::min<std::size_t>(options.max_steps, 10);
    const auto p = powers(chain, 2 * horizon);
    const auto back = powers(time_reversal(chain), horizon);
    for (std::size_t a = 0; a <= horizon; ++a) {
      for (std::size_t b = 0; b <= horizon; ++b) {
        for (StateId x = 0; x < n; ++x) {
          const double left = std::sqrt(chi_square(p[a].row(x), chain.pi()));
          for (StateId z = 0; z < n; ++z) {
            const double right = std::sqrt(chi_square(back[b].row(z), chain.pi()));
            const double deviation = std::abs(p[a + b](x, z) - chain.pi(z)) / chain.pi(z);
            record_at_least(c, left * right * (1.0 + 1e-12), deviation);
          }
        }
      }
    }
  }
  if (chain.reversible() && n <= kMaxEnumerationStates && n <= kMaxDenseStates) {
    auto& c = checks.add("gap_lower_bound", kInequalityTolerance);
    const double gap = spectral_gap(chain);
    const GapLowerBound lower = gap_lower_bound(chain);
    record_at_least(c, gap, lower.psi_star);
    if (lower.theta_term) record_at_least(c, gap, *lower.theta_term);
  }
  {
    auto& c = checks.add("size_biased_expectation", kInequalityTolerance);
    Rng rng(options.seed);
    for (int trial = 0; trial < 1000; ++trial) {
      const std::size_t support = 1 + rng.below(10);
      std::vector<double> values(support), weights(support);
      double total = 0.0;
      for (std::size_t i = 0; i < support; ++i) {
        values[i] = 10.0 * rng.uniform_open();
        weights[i] = rng.uniform_open();
        total += weights[i];
      }
      const int kind = static_cast<int>(rng.below(6));
      const double threshold = 10.0 * rng.uniform_open();
      double mean = 0.0, lhs = 0.0;
      for (std::size_t i = 0; i < support; ++i) {
        const double w = weights[i] / total;
        mean += w * values[i];
        lhs += w * values[i] * increasing_function(kind, threshold, 2.0 * values[i]);
      }
      const double rhs = mean / 2.0 * increasing_function(kind, threshold, mean);
      record_at_least(c, lhs * (1.0 + 1e-12), rhs);
    }
  }
  {
    auto& c = checks.add("root_average_grid", kInequalityTolerance);
    for (int i = 0; i <= 2000; ++i) {
      const double beta = -0.5 + i / 2000.0;
      const double lhs = (std::sqrt(1.0 + 2.0 * beta) + std::sqrt(std::max(0.0, 1.0 - 2.0 * beta))) / 2.0;
      const double mid = std::sqrt(1.0 - beta * beta);
      record_at_least(c, mid, lhs);
      record_at_least(c, 1.0 - beta * beta / 2.0, mid);
    }
  }
}

void bound_checks(const ChainKernel& chain, const VerifyOptions& options, Checks& checks) {
  const std::size_t n = chain.size();
  ProfileMethod method = Enumerate{};
  if (n > kMaxEnumerationStates) {
    if (!options.monte_carlo) {
      throw Error(ErrorKind::TooLarge, "bound checks need exact profiles (<= " +
                                           std::to_string(kMaxEnumerationStates) + " states)");
    }
    method = MonteCarlo{64, options.seed};
  }
  const StepFunctionProfile phi = conductance_profile(chain, method);
  // A vanishing root profile (periodic chains) makes the chi-square bound infinite, so
  // there is nothing to check.
  std::optional<AnyProfile> root_any;
  try {
    root_any = root_profile(chain, method);
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::ZeroConductance) throw;
  }
  const AnyProfile phi_any = phi;
  if (chain.gamma() > 0.0) {
    auto& c = checks.add("uniform_bound_soundness", 0.0);
    auto& mono = checks.add("uniform_bound_monotone", 0.0);
    double previous = std::numeric_limits<double>::infinity();
    std::vector<double> sorted = options.epsilons;
    std::sort(sorted.begin(), sorted.end());
    for (double eps : sorted) {
      const BoundReport report = tau_uniform_bound(phi_any, eps, chain.gamma());
      record(c, std::max(0.0, static_cast<double>(tau_uniform(chain, eps)) - report.bound));
      record(mono, std::max(0.0, report.bound - previous));
      previous = report.bound;
    }
  }
  if (root_any) {
    auto& c = checks.add("chi_square_bound_soundness", 0.0);
    for (double eps : options.epsilons) {
      for (StateId x = 0; x < n; ++x) {
        const BoundReport report = chi_square_bound(*root_any, chain.pi(x), eps);
        record(c, std::max(0.0, static_cast<double>(chi_square_time(chain, x, eps)) - report.bound));
      }
    }
  }
  if (n <= kMaxEnumerationStates) {
    auto& c = checks.add("continuous_bound_soundness", 0.0);
    for (double eps : options.epsilons) {
      const BoundReport report = continuous_bound(phi_any, std::nullopt, std::nullopt, eps);
      const double exact = tau_uniform_continuous(chain, eps, report.bound + 1.0, 0.01);
      record(c, std::max(0.0, exact - report.bound));
    }
  }
}

}  // namespace

std::string_view to_string(VerifySuite suite) noexcept {
  switch (suite) {
    case VerifySuite::identities: return "identities";
    case VerifySuite::inequalities: return "inequalities";
    case VerifySuite::bounds: return "bounds";
  }
  return "identities";
}

VerifySuite parse_verify_suite(std::string_view text) {
  if (text == "identities") return VerifySuite::identities;
  if (text == "inequalities") return VerifySuite::inequalities;
  if (text == "bounds") return VerifySuite::bounds;
  throw Error(ErrorKind::InvalidArgument, "unknown suite '" + std::string(text) + "'");
}

std::vector<PropertyCheck> run_verify_suite(const ChainKernel& chain, VerifySuite suite,
                                            const VerifyOptions& options) {
  Checks checks;
  switch (suite) {
    case VerifySuite::identities: identities(chain, options, checks); break;
    case VerifySuite::inequalities: inequalities(chain, options, checks); break;
    case VerifySuite::bounds: bound_checks(chain, options, checks); break;
  }
  return checks.take();
}

void write_verify_csv(std::ostream& out, const std::vector<PropertyCheck>& checks) {
  out << "property,max_violation,tolerance,pass\n";
  for (const PropertyCheck& c : checks) {
    out << c.property << ',' << format_double(c.max_violation) << ',' << format_double(c.tolerance) << ','
        << (c.pass() ? "true" : "false") << '\n';
  }
}

}  // namespace evoset
