#include "evoset/set_kernel.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <string>

#include "evoset/error.hpp"
#include "evoset/parallel.hpp"
#include "flow_scratch.hpp"

namespace evoset {

double SetChainKernel::prob(SubsetIndex s, SubsetIndex a) const noexcept {
  for (const SetTransition& t : row(s)) {
    if (t.target == a) return t.prob;
  }
  return 0.0;
}

double SetChainKernel::doob_prob(SubsetIndex s, SubsetIndex a) const noexcept {
  if (s == 0) return std::numeric_limits<double>::quiet_NaN();
  return measures_[a] / measures_[s] * prob(s, a);
}

std::vector<double> SetChainKernel::step(std::span<const double> dist) const {
  std::vector<double> next(subset_count(), 0.0);
  for (SubsetIndex s = 0; s < subset_count(); ++s) {
    const double mass = dist[s];
    if (mass == 0.0) continue;
    for (const SetTransition& t : row(s)) next[t.target] += mass * t.prob;
  }
  return next;
}

std::vector<double> SetChainKernel::doob_step(std::span<const double> dist) const {
  std::vector<double> next(subset_count(), 0.0);
  for (SubsetIndex s = 1; s < subset_count(); ++s) {
    const double mass = dist[s];
    if (mass == 0.0) continue;
    for (const SetTransition& t : row(s)) {
      next[t.target] += mass * measures_[t.target] / measures_[s] * t.prob;
    }
  }
  return next;
}

SetChainKernel set_kernel(const ChainKernel& chain) {
  const std::size_t n = chain.size();
  if (n > kMaxSetKernelStates) {
    throw Error(ErrorKind::TooLarge, "set kernel needs <= " + std::to_string(kMaxSetKernelStates) +
                                         " states, chain has " + std::to_string(n));
  }
  const SubsetIndex count = SubsetIndex{1} << n;

  SetChainKernel kernel;
  kernel.states_ = n;
  kernel.measures_.assign(count, 0.0);
  for (SubsetIndex s = 1; s < count; ++s) {
    const int low = std::countr_zero(s);
    kernel.measures_[s] = kernel.measures_[s & (s - 1)] + chain.pi(static_cast<StateId>(low));
  }

  // Rows are built per chunk and concatenated in index order.
  const std::size_t chunks = chunk_count(count);
  std::vector<std::vector<std::size_t>> chunk_sizes(chunks);
  std::vector<std::vector<SetTransition>> chunk_entries(chunks);
  parallel_chunks(count, [&](std::size_t c, std::uint64_t begin, std::uint64_t end) {
    detail::FlowScratch scratch(chain);
    detail::RatioLevels levels;
    std::vector<StateId> members;
    auto& sizes = chunk_sizes[c];
    auto& entries = chunk_entries[c];
    for (std::uint64_t s = begin; s < end; ++s) {
      members.clear();
      for (std::uint64_t bits = s; bits != 0; bits &= bits - 1) {
        members.push_back(static_cast<StateId>(std::countr_zero(bits)));
      }
      scratch.load(std::span<const StateId>(members));
      detail::compute_levels(scratch, chain, levels);
      const std::size_t before = entries.size();
      SubsetIndex prefix = 0;
      std::size_t cursor = 0;
      // groups[0] has the highest threshold; its cell sits just below the empty cell.
      double top = 0.0;
      for (std::size_t i = 0; i < levels.groups.size(); ++i) {
        for (; cursor < levels.groups[i].end; ++cursor) prefix |= SubsetIndex{1} << levels.order[cursor];
        const double length = detail::group_interval_length(levels, i);
        if (length > 0.0) entries.push_back({prefix, length});
        if (i == 0) top = levels.groups[i].threshold;
      }
      if (top < 1.0) entries.push_back({0, 1.0 - top});
      std::sort(entries.begin() + static_cast<std::ptrdiff_t>(before), entries.end(),
                [](const SetTransition& a, const SetTransition& b) { return a.target < b.target; });
      sizes.push_back(entries.size() - before);
    }
  });

  kernel.offsets_.reserve(count + std::size_t{1});
  kernel.offsets_.push_back(0);
  for (std::size_t c = 0; c < chunks; ++c) {
    for (std::size_t size : chunk_sizes[c]) kernel.offsets_.push_back(kernel.offsets_.back() + size);
    kernel.entries_.insert(kernel.entries_.end(), chunk_entries[c].begin(), chunk_entries[c].end());
    chunk_entries[c].clear();
    chunk_entries[c].shrink_to_fit();
  }
  return kernel;
}

}  // namespace evoset
