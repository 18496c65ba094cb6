#include "evoset/compare.hpp"

#include <ostream>

#include "evoset/bounds.hpp"
#include "evoset/chain_io.hpp"
#include "evoset/error.hpp"
#include "evoset/exact_mixing.hpp"
#include "evoset/generators.hpp"
#include "evoset/profiles.hpp"

namespace evoset {

std::vector<CompareRow> compare_benchmarks(const std::vector<std::string>& specs,
                                           const std::vector<double>& epsilons, const CompareOptions& options) {
  if (specs.empty()) throw Error(ErrorKind::InvalidArgument, "benchmark list is empty");
  if (epsilons.empty()) throw Error(ErrorKind::InvalidArgument, "epsilon list is empty");
  std::vector<CompareRow> rows;
  for (const std::string& spec : specs) {
    const Benchmark bench = make_benchmark(spec);
    const ChainKernel& chain = bench.chain;
    ProfileMethod method = Enumerate{};
    if (chain.size() > kMaxEnumerationStates) {
      if (!options.seed) {
        throw Error(ErrorKind::MissingSeed, spec + " is too large to enumerate; Monte-Carlo profiles need a seed");
      }
      method = MonteCarlo{options.monte_carlo_samples, *options.seed};
    }
    const AnyProfile phi = conductance_profile(chain, method);
    const StepFunctionProfile root = root_profile(chain, method);
    const AnyProfile root_any = root;
    const double h2 = theta_profile(chain, method).tail_value;

    MixingOptions mixing;
    mixing.epsilons = epsilons;
    mixing.n_max = options.n_max;
    const MixingReport report = mixing_report(chain, mixing);

    for (std::size_t i = 0; i < epsilons.size(); ++i) {
      CompareRow row;
      row.chain = spec;
      row.epsilon = epsilons[i];
      if (chain.gamma() > 0.0) row.bound_hk = tau_uniform_bound(phi, epsilons[i], chain.gamma()).bound;
      row.bound_psith = chi_square_bound(root_any, chain.pi_min(), epsilons[i]).bound;
      row.bound_cont = continuous_bound(phi, std::nullopt, std::nullopt, epsilons[i]).bound;
      row.tau_exact = report.tau_uniform[i];
      row.tau_tv_exact = report.tau_tv[i];
      row.gap = report.spectral_gap;
      row.psi_star = root.tail_value;
      row.h2plus = h2;
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

void write_compare_csv(std::ostream& out, const std::vector<CompareRow>& rows) {
  auto opt = [](const auto& v) -> std::string {
    if (!v) return "";
    if constexpr (std::is_same_v<std::decay_t<decltype(*v)>, double>) {
      return format_double(*v);
    } else {
      return std::to_string(*v);
    }
  };
  out << "chain,epsilon,bound_hk,bound_psith,bound_cont,tau_exact,tau_tv_exact,gap,psi_star,h2plus\n";
  for (const CompareRow& r : rows) {
    out << '"' << r.chain << '"' << ',' << format_double(r.epsilon) << ',' << opt(r.bound_hk) << ','
        << format_double(r.bound_psith) << ',' << format_double(r.bound_cont) << ',' << opt(r.tau_exact) << ','
        << opt(r.tau_tv_exact) << ',' << opt(r.gap) << ',' << format_double(r.psi_star) << ','
        << format_double(r.h2plus) << '\n';
  }
}

}  // namespace evoset
