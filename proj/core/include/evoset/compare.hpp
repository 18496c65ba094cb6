#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace evoset {

struct CompareRow {
  std::string chain;
  double epsilon = 0.0;
  std::optional<double> bound_hk;
  double bound_psith = 0.0;
  double bound_cont = 0.0;
  std::optional<std::size_t> tau_exact;
  std::optional<std::size_t> tau_tv_exact;
  std::optional<double> gap;
  double psi_star = 0.0;
  double h2plus = 0.0;
};

struct CompareOptions {
  /// Seed for Monte-Carlo profiles of chains too large to enumerate.
  std::optional<std::uint64_t> seed;
  std::size_t monte_carlo_samples = 64;
  std::size_t n_max = 100000;
};

/// One row per (benchmark spec, epsilon): bounds from the best feasible profiles beside the
/// exact mixing quantities. The chi-square bound uses the worst start pi_*.
std::vector<CompareRow> compare_benchmarks(const std::vector<std::string>& specs,
                                           const std::vector<double>& epsilons,
                                           const CompareOptions& options = {});

/// Long-form CSV; unavailable values are empty cells.
void write_compare_csv(std::ostream& out, const std::vector<CompareRow>& rows);

}  // namespace evoset
