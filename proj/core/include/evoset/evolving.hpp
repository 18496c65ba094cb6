#pragma once

#include <cstdint>
#include <iosfwd>
#include <string_view>
#include <vector>

#include "evoset/chain.hpp"

namespace evoset {

/// One step of the evolving-set process driven by a given uniform u in (0, 1):
/// returns {y : Q(S, y) >= u pi(y)}.
StateSet evolve_step(const ChainKernel& chain, const StateSet& set, double u);

/// Sorted distinct values of Q(S, y) / pi(y) over the states with positive ratio.
/// The map u -> evolve_step(S, u) is constant on each (b[i-1], b[i]].
std::vector<double> breakpoints(const ChainKernel& chain, const StateSet& set);

/// One cell of the partition of (0, 1) induced by the breakpoints.
struct LevelPiece {
  double lower;   // exclusive
  double upper;   // inclusive
  StateSet next;  // evolved set for every u in (lower, upper]
  double length() const { return upper - lower; }
};

/// Cells ordered by increasing u; the last cell maps to the empty set when the largest
/// breakpoint is below 1.
std::vector<LevelPiece> level_partition(const ChainKernel& chain, const StateSet& set);

/// psi(S) = 1 - E_S sqrt(pi(S~) / pi(S)), integrated exactly over the level partition.
double psi(const ChainKernel& chain, const StateSet& set);

/// varphi_S = (1 / 2 pi(S)) sum_y min(Q(S, y), Q(S^c, y)).
double varphi(const ChainKernel& chain, const StateSet& set);

/// theta_S = (1 / pi(S)) sum_{y in S} sqrt(pi(y) Q(S^c, y)).
double theta(const ChainKernel& chain, const StateSet& set);

enum class TraceMode { plain, doob_exact, doob_weighted };

std::string_view to_string(TraceMode mode) noexcept;
TraceMode parse_trace_mode(std::string_view text);

/// A sampled trajectory S_0, ..., S_n.
///
/// weights[k] = pi(S_k) / pi(S_0) in every mode; under plain sampling these are the
/// Doob importance weights (a mean-one martingale), and doob_weighted is the same
/// trajectory law labelled for importance-weighted estimation. Under doob_exact the
/// steps follow the Doob kernel directly and the weights are informational.
struct EvolvingTrace {
  TraceMode mode = TraceMode::plain;
  std::vector<StateSet> sets;
  /// u_draws[k] produced sets[k + 1] = evolve_step(sets[k], u_draws[k]).
  std::vector<double> u_draws;
  std::vector<double> weights;

  std::size_t steps() const { return u_draws.size(); }
  /// Z_k = sqrt(pi(S_k^#)) / pi(S_k); NaN at the empty set.
  double z(std::size_t k) const;
};

EvolvingTrace sample_trace(const ChainKernel& chain, const StateSet& start, std::size_t steps,
                           std::uint64_t seed, TraceMode mode);

/// CSV with columns step,set,measure,weight,u. The set column is quoted when it holds a
/// comma-joined id list; u is empty on step 0.
void write_trace_csv(std::ostream& out, const EvolvingTrace& trace);

struct Estimate {
  double value;
  double standard_error;
};

/// p^n(x, y) estimated as (pi(y) / pi(x)) P_{x}(y in S_n) over `samples` plain traces.
Estimate estimate_transition(const ChainKernel& chain, StateId x, StateId y, std::size_t steps,
                             std::size_t samples, std::uint64_t seed);

}  // namespace evoset
