#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "evoset/chain.hpp"

namespace evoset {

/// Enumeration ceiling for the exact subset-space kernel (2^20 subsets).
inline constexpr std::size_t kMaxSetKernelStates = 20;

using SubsetIndex = std::uint32_t;

struct SetTransition {
  SubsetIndex target;
  double prob;
};

/// Exact transition kernel K(S, A) = P_S(S~ = A) of the evolving-set process over all
/// 2^n subsets, indexed by membership bit masks. The Doob transform
/// K^(S, A) = pi(A) / pi(S) K(S, A) shares K's support and is evaluated on demand; it is
/// undefined (NaN) on the empty set.
class SetChainKernel {
 public:
  std::size_t states() const noexcept { return states_; }
  std::size_t subset_count() const noexcept { return measures_.size(); }

  std::span<const SetTransition> row(SubsetIndex s) const noexcept {
    return {entries_.data() + offsets_[s], offsets_[s + 1] - offsets_[s]};
  }
  /// K(S, A); zero when A is unreachable from S.
  double prob(SubsetIndex s, SubsetIndex a) const noexcept;
  /// K^(S, A); NaN when S is empty.
  double doob_prob(SubsetIndex s, SubsetIndex a) const noexcept;
  double measure(SubsetIndex s) const noexcept { return measures_[s]; }

  SubsetIndex full() const noexcept { return static_cast<SubsetIndex>(subset_count() - 1); }
  SubsetIndex complement(SubsetIndex s) const noexcept { return full() ^ s; }

  /// dist K: one step of a distribution over subsets.
  std::vector<double> step(std::span<const double> dist) const;
  /// dist K^; mass on the empty set is not allowed (it would be dropped).
  std::vector<double> doob_step(std::span<const double> dist) const;

 private:
  friend SetChainKernel set_kernel(const ChainKernel& chain);

  std::size_t states_ = 0;
  std::vector<double> measures_;
  std::vector<std::size_t> offsets_;
  std::vector<SetTransition> entries_;
};

/// Builds K exactly from the level partitions of every subset. Throws TooLarge above
/// kMaxSetKernelStates states.
SetChainKernel set_kernel(const ChainKernel& chain);

}  // namespace evoset
