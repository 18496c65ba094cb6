#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "evoset/chain.hpp"

namespace evoset {

/// Exhaustive set checks run up to this many states.
inline constexpr std::size_t kMaxExhaustiveStates = 16;
/// Checks that need the subset-space kernel run up to this many states.
inline constexpr std::size_t kMaxVerifySetKernelStates = 12;

enum class VerifySuite { identities, inequalities, bounds };

std::string_view to_string(VerifySuite suite) noexcept;
VerifySuite parse_verify_suite(std::string_view text);

struct PropertyCheck {
  std::string property;
  double max_violation = 0.0;
  double tolerance = 0.0;
  std::size_t cases = 0;
  bool pass() const { return max_violation <= tolerance; }
};

struct VerifyOptions {
  std::uint64_t seed = 0;
  /// Matrix-power horizon for identities and inequalities.
  std::size_t max_steps = 8;
  /// Above kMaxExhaustiveStates, check set properties on random sets instead of failing.
  bool monte_carlo = false;
  std::size_t random_sets = 2000;
  std::vector<double> epsilons{0.5, 0.25, 0.125};
};

/// Runs one suite. Properties that do not apply to the chain (for instance laziness
/// conditions) are omitted. Throws TooLarge when exhaustive checks are infeasible and
/// monte_carlo is off.
std::vector<PropertyCheck> run_verify_suite(const ChainKernel& chain, VerifySuite suite,
                                            const VerifyOptions& options);

/// CSV with columns property,max_violation,tolerance,pass.
void write_verify_csv(std::ostream& out, const std::vector<PropertyCheck>& checks);

}  // namespace evoset
