#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "evoset/state_set.hpp"

namespace evoset {

struct Transition {
  StateId target;
  double prob;
};

using SparseRows = std::vector<std::vector<Transition>>;

/// Tolerance on row sums and on pi P = pi for caller-supplied data.
inline constexpr double kInputTolerance = 1e-9;
/// Tolerance used for the reversibility flag and for internally computed stationarity.
inline constexpr double kConstructionTolerance = 1e-12;
/// Largest chain whose stationary law is obtained by a dense direct solve.
inline constexpr std::size_t kDirectSolveLimit = 2000;

/// Immutable, validated transition kernel of a finite irreducible chain.
///
/// Rows are stored compressed and sorted by target with zero entries dropped; the
/// column view (in-edges) is precomputed because evolving-set steps and matrix powers
/// both walk it. Only build_chain() and the transforms below create instances.
class ChainKernel {
 public:
  std::size_t size() const noexcept { return pi_.size(); }

  std::span<const Transition> row(StateId x) const noexcept {
    return {row_entries_.data() + row_offsets_[x], row_offsets_[x + 1] - row_offsets_[x]};
  }
  /// In-edges of y: entries carry the source state and p(source, y).
  std::span<const Transition> column(StateId y) const noexcept {
    return {col_entries_.data() + col_offsets_[y], col_offsets_[y + 1] - col_offsets_[y]};
  }

  /// p(x, y); zero when the entry is absent.
  double prob(StateId x, StateId y) const noexcept;
  /// Q(x, y) = pi(x) p(x, y).
  double flow(StateId x, StateId y) const noexcept { return pi_[x] * prob(x, y); }

  std::span<const double> pi() const noexcept { return pi_; }
  double pi(StateId x) const noexcept { return pi_[x]; }
  double pi_min() const noexcept { return pi_min_; }
  /// min_x p(x, x) exactly as stored; may be 0.
  double gamma() const noexcept { return gamma_; }
  bool reversible() const noexcept { return reversible_; }
  std::size_t nonzeros() const noexcept { return row_entries_.size(); }

  SparseRows rows() const;

  StateSet subset(std::span<const StateId> members) const { return StateSet(members, pi_); }
  StateSet subset(std::initializer_list<StateId> members) const {
    return StateSet(std::span<const StateId>(members.begin(), members.size()), pi_);
  }
  StateSet singleton(StateId x) const { return StateSet::singleton(x, pi_); }
  StateSet whole() const { return StateSet::all(pi_); }
  StateSet none() const { return StateSet::none(size()); }

 private:
  friend ChainKernel build_chain(SparseRows rows, std::optional<std::vector<double>> pi);

  std::vector<std::size_t> row_offsets_;
  std::vector<Transition> row_entries_;
  std::vector<std::size_t> col_offsets_;
  std::vector<Transition> col_entries_;
  std::vector<double> pi_;
  double pi_min_ = 0.0;
  double gamma_ = 0.0;
  bool reversible_ = false;
};

/// Validates and freezes a kernel. Rows must be nonnegative and sum to 1 within
/// kInputTolerance (they are then renormalized). Without pi the stationary law is solved
/// for; a supplied pi is normalized and must satisfy pi P = pi within kInputTolerance.
/// Throws NotStochastic, Reducible, BadStationary or InvalidArgument.
ChainKernel build_chain(SparseRows rows, std::optional<std::vector<double>> pi = std::nullopt);

/// p'(z, y) = pi(y) p(y, z) / pi(z). Same pi; gamma recomputed.
ChainKernel time_reversal(const ChainKernel& chain);

/// (1 - beta) P + beta I with 0 <= beta < 1.
ChainKernel lazify(const ChainKernel& chain, double beta);

/// Q(S, A) = sum over s in S, a in A of pi(s) p(s, a).
double q_flow(const ChainKernel& chain, const StateSet& from, const StateSet& to);
double q_flow(const ChainKernel& chain, const StateSet& from, StateId to);

/// Conductance Q(S, S^c) / pi(S) of a nonempty set.
double conductance(const ChainKernel& chain, const StateSet& set);

}  // namespace evoset
