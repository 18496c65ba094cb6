#include "evoset/evolving.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <string>

#include "evoset/chain_io.hpp"
#include "evoset/error.hpp"
#include "evoset/rng.hpp"
#include "flow_scratch.hpp"

namespace evoset {
namespace {

void require_nonempty(const StateSet& set, const char* what) {
  if (set.empty()) throw Error(ErrorKind::InvalidArgument, std::string(what) + " of the empty set");
}

StateSet prefix_set(const ChainKernel& chain, const detail::RatioLevels& levels,
                    std::size_t end) {
  return chain.subset(std::span<const StateId>(levels.order.data(), end));
}

StateSet step_with(const ChainKernel& chain, detail::FlowScratch& scratch, const StateSet& set,
                   double u) {
  scratch.load(set);
  std::vector<StateId> next;
  for (StateId y : scratch.touched()) {
    if (scratch.ratio(y) >= u) next.push_back(y);
  }
  return chain.subset(next);
}

}  // namespace

StateSet evolve_step(const ChainKernel& chain, const StateSet& set, double u) {
  if (!(u > 0.0 && u < 1.0)) throw Error(ErrorKind::InvalidArgument, "u must lie in (0, 1)");
  detail::FlowScratch scratch(chain);
  return step_with(chain, scratch, set, u);
}

std::vector<double> breakpoints(const ChainKernel& chain, const StateSet& set) {
  detail::FlowScratch scratch(chain);
  scratch.load(set);
  detail::RatioLevels levels;
  detail::compute_levels(scratch, chain, levels);
  std::vector<double> out;
  out.reserve(levels.groups.size());
  for (auto it = levels.groups.rbegin(); it != levels.groups.rend(); ++it) {
    out.push_back(it->threshold);
  }
  return out;
}

std::vector<LevelPiece> level_partition(const ChainKernel& chain, const StateSet& set) {
  detail::FlowScratch scratch(chain);
  scratch.load(set);
  detail::RatioLevels levels;
  detail::compute_levels(scratch, chain, levels);
  std::vector<LevelPiece> pieces;
  for (std::size_t i = levels.groups.size(); i-- > 0;) {
    const double lower = i + 1 < levels.groups.size() ? levels.groups[i + 1].threshold : 0.0;
    pieces.push_back({lower, levels.groups[i].threshold,
                      prefix_set(chain, levels, levels.groups[i].end)});
  }
  const double top = levels.groups.empty() ? 0.0 : levels.groups.front().threshold;
  if (top < 1.0) pieces.push_back({top, 1.0, chain.none()});
  return pieces;
}

double psi(const ChainKernel& chain, const StateSet& set) {
  require_nonempty(set, "psi");
  detail::FlowScratch scratch(chain);
  scratch.load(set);
  detail::RatioLevels levels;
  detail::compute_levels(scratch, chain, levels);
  return detail::psi_from_levels(levels, set.measure());
}

double varphi(const ChainKernel& chain, const StateSet& set) {
  require_nonempty(set, "varphi");
  detail::FlowScratch scratch(chain);
  scratch.load(set);
  double total = 0.0;
  for (StateId y : scratch.touched()) total += std::min(scratch.q(y), scratch.q_complement(y));
  return total / (2.0 * set.measure());
}

double theta(const ChainKernel& chain, const StateSet& set) {
  require_nonempty(set, "theta");
  detail::FlowScratch scratch(chain);
  scratch.load(set);
  double total = 0.0;
  set.for_each([&](StateId y) { total += std::sqrt(chain.pi(y) * scratch.q_complement(y)); });
  return total / set.measure();
}

std::string_view to_string(TraceMode mode) noexcept {
  switch (mode) {
    case TraceMode::plain: return "plain";
    case TraceMode::doob_exact: return "doob-exact";
    case TraceMode::doob_weighted: return "doob-weighted";
  }
  return "plain";
}

TraceMode parse_trace_mode(std::string_view text) {
  if (text == "plain") return TraceMode::plain;
  if (text == "doob-exact") return TraceMode::doob_exact;
  if (text == "doob-weighted") return TraceMode::doob_weighted;
  throw Error(ErrorKind::InvalidArgument, "unknown trace mode '" + std::string(text) + "'");
}

double EvolvingTrace::z(std::size_t k) const {
  const double m = sets.at(k).measure();
  if (sets[k].empty()) return std::numeric_limits<double>::quiet_NaN();
  const double sharp = m <= 0.5 ? m : std::max(0.0, 1.0 - m);
  return std::sqrt(sharp) / m;
}

EvolvingTrace sample_trace(const ChainKernel& chain, const StateSet& start, std::size_t steps,
                           std::uint64_t seed, TraceMode mode) {
  if (start.empty()) throw Error(ErrorKind::EmptyStart, "evolving-set trace needs a nonempty start");
  if (start.universe() != chain.size()) {
    throw Error(ErrorKind::InvalidArgument, "start set belongs to a different state space");
  }
  Rng rng(seed);
  detail::FlowScratch scratch(chain);
  detail::RatioLevels levels;
  EvolvingTrace trace;
  trace.mode = mode;
  trace.sets.reserve(steps + 1);
  trace.sets.push_back(start);
  trace.weights.push_back(1.0);
  const double base = start.measure();

  for (std::size_t k = 0; k < steps; ++k) {
    const StateSet& current = trace.sets.back();
    if (mode != TraceMode::doob_exact) {
      const double u = rng.uniform_open();
      trace.u_draws.push_back(u);
      trace.sets.push_back(step_with(chain, scratch, current, u));
    } else {
      // Pick a cell with probability length * pi(A) / pi(S), then record a u strictly
      // inside that cell so the step remains reproducible by evolve_step.
      scratch.load(current);
      detail::compute_levels(scratch, chain, levels);
      const double v = rng.uniform_open();
      const double measure = current.measure();
      double cumulative = 0.0;
      std::size_t chosen = levels.groups.size() - 1;
      double fraction = 0.5;
      for (std::size_t i = 0; i < levels.groups.size(); ++i) {
        const double w = detail::group_interval_length(levels, i) *
                         levels.groups[i].cumulative_measure / measure;
        if (v <= cumulative + w || i + 1 == levels.groups.size()) {
          chosen = i;
          fraction = w > 0.0 ? std::clamp((v - cumulative) / w, 0.0, 1.0) : 0.5;
          break;
        }
        cumulative += w;
      }
      const double upper = levels.groups[chosen].threshold;
      const double lower = chosen + 1 < levels.groups.size() ? levels.groups[chosen + 1].threshold : 0.0;
      double u = upper - (1.0 - fraction) * (upper - lower);
      constexpr double kEdge = 1e-12;
      if (u - lower <= kEdge || upper - u <= kEdge) u = 0.5 * (lower + upper);
      trace.u_draws.push_back(u);
      trace.sets.push_back(prefix_set(chain, levels, levels.groups[chosen].end));
    }
    trace.weights.push_back(trace.sets.back().measure() / base);
  }
  return trace;
}

void write_trace_csv(std::ostream& out, const EvolvingTrace& trace) {
  out << "step,set,measure,weight,u\n";
  for (std::size_t k = 0; k < trace.sets.size(); ++k) {
    const StateSet& s = trace.sets[k];
    std::string encoded = s.encode();
    if (s.universe() > 64) encoded = '"' + encoded + '"';
    out << k << ',' << encoded << ',' << format_double(s.measure()) << ','
        << format_double(trace.weights[k]) << ',';
    if (k > 0) out << format_double(trace.u_draws[k - 1]);
    out << '\n';
  }
}

Estimate estimate_transition(const ChainKernel& chain, StateId x, StateId y, std::size_t steps,
                             std::size_t samples, std::uint64_t seed) {
  if (samples == 0) throw Error(ErrorKind::InvalidArgument, "need at least one sample");
  if (x >= chain.size() || y >= chain.size()) {
    throw Error(ErrorKind::InvalidArgument, "state id out of range");
  }
  Rng rng(seed);
  detail::FlowScratch scratch(chain);
  const StateSet start = chain.singleton(x);
  std::size_t hits = 0;
  for (std::size_t s = 0; s < samples; ++s) {
    StateSet current = start;
    for (std::size_t k = 0; k < steps && !current.empty(); ++k) {
      current = step_with(chain, scratch, current, rng.uniform_open());
    }
    if (current.contains(y)) ++hits;
  }
  const double scale = chain.pi(y) / chain.pi(x);
  const double fraction = static_cast<double>(hits) / static_cast<double>(samples);
  const double se = std::sqrt(fraction * (1.0 - fraction) / static_cast<double>(samples));
  return {scale * fraction, scale * se};
}

}  // namespace evoset
