#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "evoset/chain.hpp"

namespace evoset::detail {

/// Accumulates Q(S, y) for every y hit by an edge out of S, reusing dense buffers
/// between sets. A state all of whose in-edges start in S is "interior": its ratio is
/// exactly 1 and Q(S^c, y) exactly 0, independent of rounding in the sums.
class FlowScratch {
 public:
  explicit FlowScratch(const ChainKernel& chain)
      : chain_(&chain), q_(chain.size(), 0.0), hits_(chain.size(), 0) {}

  template <class ForEachMember>
  void load(ForEachMember&& for_each_member) {
    clear();
    for_each_member([&](StateId s) {
      const double weight = chain_->pi(s);
      for (const Transition& t : chain_->row(s)) {
        if (hits_[t.target] == 0) touched_.push_back(t.target);
        ++hits_[t.target];
        q_[t.target] += weight * t.prob;
      }
    });
  }

  void load(const StateSet& set) {
    load([&](auto&& f) { set.for_each(f); });
  }

  void load(std::span<const StateId> members) {
    load([&](auto&& f) {
      for (StateId s : members) f(s);
    });
  }

  void clear() {
    for (StateId y : touched_) {
      q_[y] = 0.0;
      hits_[y] = 0;
    }
    touched_.clear();
  }

  std::span<const StateId> touched() const { return touched_; }

  bool interior(StateId y) const { return hits_[y] == chain_->column(y).size(); }

  /// Q(S, y).
  double q(StateId y) const { return q_[y]; }

  /// Q(S, y) / pi(y), clamped to [0, 1] and exactly 1 on interior states.
  double ratio(StateId y) const {
    if (hits_[y] == 0) return 0.0;
    if (interior(y)) return 1.0;
    return std::min(1.0, q_[y] / chain_->pi(y));
  }

  /// Q(S^c, y) = pi(y) - Q(S, y), clamped at 0 and exactly 0 on interior states.
  double q_complement(StateId y) const {
    if (hits_[y] == 0) return chain_->pi(y);
    if (interior(y)) return 0.0;
    return std::max(0.0, chain_->pi(y) - q_[y]);
  }

 private:
  const ChainKernel* chain_;
  std::vector<double> q_;
  std::vector<std::uint32_t> hits_;
  std::vector<StateId> touched_;
};

/// Ratios merged within this distance share one threshold.
inline constexpr double kThresholdMergeTolerance = 1e-14;

struct LevelGroup {
  double threshold;           // largest ratio in the group
  std::size_t end;            // one past the group's last index into RatioLevels::order
  double cumulative_measure;  // pi of all states in this and earlier groups
};

/// States with positive ratio ordered by ratio (descending), grouped by threshold.
/// For u in (groups[i+1].threshold, groups[i].threshold] the evolved set is the prefix
/// order[0, groups[i].end); above groups[0].threshold it is empty.
struct RatioLevels {
  std::vector<StateId> order;
  std::vector<double> ratios;
  std::vector<LevelGroup> groups;
};

inline void compute_levels(const FlowScratch& scratch, const ChainKernel& chain,
                           RatioLevels& out) {
  out.order.clear();
  out.ratios.clear();
  out.groups.clear();
  std::vector<std::pair<double, StateId>> keyed;
  keyed.reserve(scratch.touched().size());
  for (StateId y : scratch.touched()) {
    const double r = scratch.ratio(y);
    if (r > 0.0) keyed.emplace_back(r, y);
  }
  std::sort(keyed.begin(), keyed.end(), [](const auto& a, const auto& b) {
    return a.first != b.first ? a.first > b.first : a.second < b.second;
  });
  double cumulative = 0.0;
  for (std::size_t i = 0; i < keyed.size(); ++i) {
    const auto [r, y] = keyed[i];
    const bool new_group =
        out.groups.empty() || r < out.ratios.back() - kThresholdMergeTolerance;
    if (new_group && !out.groups.empty()) {
      out.groups.back().end = i;
      out.groups.back().cumulative_measure = cumulative;
    }
    if (new_group) out.groups.push_back({r, 0, 0.0});
    out.order.push_back(y);
    out.ratios.push_back(r);
    cumulative += chain.pi(y);
  }
  if (!out.groups.empty()) {
    out.groups.back().end = keyed.size();
    out.groups.back().cumulative_measure = cumulative;
  }
}

/// Length of the u-interval on which the evolved set is the prefix of group i.
inline double group_interval_length(const RatioLevels& levels, std::size_t i) {
  const double lower = i + 1 < levels.groups.size() ? levels.groups[i + 1].threshold : 0.0;
  return levels.groups[i].threshold - lower;
}

/// 1 - E sqrt(pi(S~) / pi(S)) integrated exactly over the level partition.
inline double psi_from_levels(const RatioLevels& levels, double measure) {
  double expectation = 0.0;
  for (std::size_t i = 0; i < levels.groups.size(); ++i) {
    expectation += group_interval_length(levels, i) *
                   std::sqrt(levels.groups[i].cumulative_measure / measure);
  }
  return 1.0 - expectation;
}

}  // namespace evoset::detail
