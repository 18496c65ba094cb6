#include "evoset/profiles.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>
#include <string>

#include "evoset/chain_io.hpp"
#include "evoset/error.hpp"
#include "evoset/evolving.hpp"
#include "evoset/parallel.hpp"
#include "evoset/rng.hpp"
#include "flow_scratch.hpp"

namespace evoset {
namespace {

// Measures closer than this are treated as one breakpoint.
constexpr double kMeasureMergeTolerance = 1e-13;
// Sets up to measure 1/2 qualify; the slack absorbs summation rounding at exactly 1/2.
constexpr double kHalf = 0.5 + 1e-12;

/// Non-dominated (measure, value) pairs: strictly increasing measure, strictly
/// decreasing value. Exactly the running-minimum staircase of everything inserted.
class Staircase {
 public:
  void insert(double measure, double value) {
    auto it = steps_.lower_bound(measure - kMeasureMergeTolerance);
    if (it != steps_.end() && it->first <= measure + kMeasureMergeTolerance) {
      // Same breakpoint: keep the smaller key and the smaller value.
      if (value >= it->second && it->first <= measure) return;
      const double key = std::min(it->first, measure);
      const double best = std::min(it->second, value);
      steps_.erase(it);
      place(key, best);
      return;
    }
    place(measure, value);
  }

  void merge(const Staircase& other) {
    for (const auto& [m, v] : other.steps_) insert(m, v);
  }

  const std::map<double, double>& steps() const { return steps_; }

 private:
  void place(double measure, double value) {
    auto next = steps_.upper_bound(measure);
    if (next != steps_.begin()) {
      auto prev = std::prev(next);
      if (prev->second <= value) return;
    }
    while (next != steps_.end() && next->second >= value) next = steps_.erase(next);
    steps_.emplace(measure, value);
  }

  std::map<double, double> steps_;
};

class GaugeEvaluator {
 public:
  GaugeEvaluator(const ChainKernel& chain, GaugeKind gauge) : chain_(chain), gauge_(gauge), scratch_(chain) {}

  template <class ForEachMember>
  double operator()(ForEachMember&& for_each_member, double measure) {
    scratch_.load(for_each_member);
    if (gauge_ == GaugeKind::psi) {
      detail::compute_levels(scratch_, chain_, levels_);
      return detail::psi_from_levels(levels_, measure);
    }
    // Q(S, S^c) = Q(S^c, S) by stationarity.
    double total = 0.0;
    if (gauge_ == GaugeKind::phi) {
      for_each_member([&](StateId y) { total += scratch_.q_complement(y); });
    } else {
      for_each_member([&](StateId y) { total += std::sqrt(chain_.pi(y) * scratch_.q_complement(y)); });
    }
    return total / measure;
  }

 private:
  const ChainKernel& chain_;
  GaugeKind gauge_;
  detail::FlowScratch scratch_;
  detail::RatioLevels levels_;
};

StepFunctionProfile to_profile(const ChainKernel& chain, const Staircase& stairs, GaugeKind gauge,
                               Provenance provenance) {
  if (stairs.steps().empty()) {
    throw Error(ErrorKind::EmptyFamily, "no proper nonempty set of measure <= 1/2 was evaluated");
  }
  StepFunctionProfile profile;
  profile.gauge = gauge;
  profile.provenance = provenance;
  profile.floor = chain.pi_min();
  for (const auto& [m, v] : stairs.steps()) {
    if (!(v > 0.0)) {
      throw Error(ErrorKind::ZeroConductance,
                  std::string(to_string(gauge)) + " vanishes on a set of measure " +
                      format_double(m) + "; the chain is reducible");
    }
    profile.points.push_back({m, v});
  }
  profile.tail_value = profile.points.back().value;
  return profile;
}

Staircase enumerate_all(const ChainKernel& chain, GaugeKind gauge) {
  const std::size_t n = chain.size();
  if (n > kMaxEnumerationStates) {
    throw Error(ErrorKind::TooLarge, "exact enumeration needs <= " +
                                         std::to_string(kMaxEnumerationStates) +
                                         " states, chain has " + std::to_string(n));
  }
  const std::uint64_t count = std::uint64_t{1} << n;
  std::vector<Staircase> partial(chunk_count(count));
  parallel_chunks(count, [&](std::size_t c, std::uint64_t begin, std::uint64_t end) {
    GaugeEvaluator evaluate(chain, gauge);
    Staircase& stairs = partial[c];
    StateId members[64];
    for (std::uint64_t s = std::max<std::uint64_t>(begin, 1); s < end; ++s) {
      if (s == count - 1) continue;
      std::size_t size = 0;
      double measure = 0.0;
      for (std::uint64_t bits = s; bits != 0; bits &= bits - 1) {
        const auto x = static_cast<StateId>(std::countr_zero(bits));
        members[size++] = x;
        measure += chain.pi(x);
      }
      if (measure > kHalf) continue;
      const double value = evaluate(
          [&](auto&& f) {
            for (std::size_t i = 0; i < size; ++i) f(members[i]);
          },
          measure);
      stairs.insert(measure, value);
    }
  });
  Staircase total;
  for (const Staircase& s : partial) total.merge(s);
  return total;
}

Staircase over_family(const ChainKernel& chain, GaugeKind gauge, const std::vector<StateSet>& family) {
  if (family.empty()) throw Error(ErrorKind::EmptyFamily, "set family is empty");
  GaugeEvaluator evaluate(chain, gauge);
  Staircase stairs;
  for (const StateSet& set : family) {
    if (set.universe() != chain.size()) {
      throw Error(ErrorKind::InvalidArgument, "family set belongs to a different state space");
    }
    if (set.empty() || set.is_full()) {
      throw Error(ErrorKind::InvalidArgument, "family sets must be proper and nonempty");
    }
    if (set.measure() > kHalf) continue;
    stairs.insert(set.measure(), evaluate([&](auto&& f) { set.for_each(f); }, set.measure()));
  }
  if (stairs.steps().empty()) {
    throw Error(ErrorKind::EmptyFamily, "no family set has measure <= 1/2");
  }
  return stairs;
}

/// Greedy growth: from a random start, repeatedly add the neighbouring state that
/// minimizes the conductance of the grown set; every prefix of measure <= 1/2 is scored.
Staircase monte_carlo(const ChainKernel& chain, GaugeKind gauge, const MonteCarlo& mc) {
  if (mc.samples == 0) throw Error(ErrorKind::InvalidArgument, "monte-carlo needs samples >= 1");
  const std::size_t n = chain.size();
  Rng rng(mc.seed);
  GaugeEvaluator evaluate(chain, gauge);
  Staircase stairs;
  std::vector<char> in_set(n), on_frontier(n);
  std::vector<double> inflow(n);  // Q(S, y)
  std::vector<StateId> members, frontier;

  for (std::size_t sample = 0; sample < mc.samples; ++sample) {
    std::fill(in_set.begin(), in_set.end(), 0);
    std::fill(on_frontier.begin(), on_frontier.end(), 0);
    std::fill(inflow.begin(), inflow.end(), 0.0);
    members.clear();
    frontier.clear();
    double measure = 0.0;
    double cut = 0.0;

    auto add = [&](StateId v) {
      double leaving = 0.0;
      for (const Transition& t : chain.row(v)) {
        if (!in_set[t.target] && t.target != v) leaving += t.prob;
      }
      cut += chain.pi(v) * leaving - inflow[v];
      in_set[v] = 1;
      members.push_back(v);
      measure += chain.pi(v);
      for (const Transition& t : chain.row(v)) {
        inflow[t.target] += chain.pi(v) * t.prob;
        if (!in_set[t.target] && !on_frontier[t.target]) {
          on_frontier[t.target] = 1;
          frontier.push_back(t.target);
        }
      }
      for (const Transition& t : chain.column(v)) {
        if (!in_set[t.target] && !on_frontier[t.target]) {
          on_frontier[t.target] = 1;
          frontier.push_back(t.target);
        }
      }
    };

    add(static_cast<StateId>(rng.below(n)));
    while (measure <= kHalf) {
      stairs.insert(measure, evaluate(
                                 [&](auto&& f) {
                                   for (StateId s : members) f(s);
                                 },
                                 measure));
      std::size_t best_index = frontier.size();
      double best_phi = std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < frontier.size(); ++i) {
        const StateId v = frontier[i];
        if (in_set[v] || measure + chain.pi(v) > kHalf) continue;
        double leaving = 0.0;
        for (const Transition& t : chain.row(v)) {
          if (!in_set[t.target] && t.target != v) leaving += t.prob;
        }
        const double grown = (cut + chain.pi(v) * leaving - inflow[v]) / (measure + chain.pi(v));
        if (grown < best_phi || (grown == best_phi && v < frontier[best_index])) {
          best_phi = grown;
          best_index = i;
        }
      }
      if (best_index == frontier.size()) break;
      const StateId chosen = frontier[best_index];
      frontier[best_index] = frontier.back();
      frontier.pop_back();
      add(chosen);
    }
  }
  return stairs;
}

}  // namespace

std::string_view to_string(GaugeKind gauge) noexcept {
  switch (gauge) {
    case GaugeKind::phi: return "phi";
    case GaugeKind::psi: return "psi";
    case GaugeKind::theta: return "theta";
    case GaugeKind::psi_restricted: return "psi_restricted";
  }
  return "phi";
}

std::string_view to_string(Provenance provenance) noexcept {
  switch (provenance) {
    case Provenance::exact: return "exact";
    case Provenance::family: return "family";
    case Provenance::monte_carlo: return "monte-carlo";
    case Provenance::analytic: return "analytic";
  }
  return "exact";
}

GaugeKind parse_gauge(std::string_view text) {
  if (text == "phi") return GaugeKind::phi;
  if (text == "psi") return GaugeKind::psi;
  if (text == "theta") return GaugeKind::theta;
  if (text == "psi_restricted") return GaugeKind::psi_restricted;
  throw Error(ErrorKind::InvalidArgument, "unknown gauge '" + std::string(text) + "'");
}

Provenance parse_provenance(std::string_view text) {
  if (text == "exact") return Provenance::exact;
  if (text == "family") return Provenance::family;
  if (text == "monte-carlo") return Provenance::monte_carlo;
  if (text == "analytic") return Provenance::analytic;
  throw Error(ErrorKind::InvalidArgument, "unknown provenance '" + std::string(text) + "'");
}

StepFunctionProfile gauge_profile(const ChainKernel& chain, GaugeKind gauge,
                                  const ProfileMethod& method) {
  const GaugeKind evaluated = gauge == GaugeKind::psi_restricted ? GaugeKind::psi : gauge;
  if (std::holds_alternative<Enumerate>(method)) {
    return to_profile(chain, enumerate_all(chain, evaluated), evaluated, Provenance::exact);
  }
  if (const auto* family = std::get_if<Family>(&method)) {
    const GaugeKind label = evaluated == GaugeKind::psi ? GaugeKind::psi_restricted : evaluated;
    return to_profile(chain, over_family(chain, evaluated, family->sets), label, Provenance::family);
  }
  return to_profile(chain, monte_carlo(chain, evaluated, std::get<MonteCarlo>(method)), evaluated,
                    Provenance::monte_carlo);
}

StepFunctionProfile conductance_profile(const ChainKernel& chain, const ProfileMethod& method) {
  return gauge_profile(chain, GaugeKind::phi, method);
}

StepFunctionProfile root_profile(const ChainKernel& chain, const ProfileMethod& method) {
  return gauge_profile(chain, GaugeKind::psi, method);
}

StepFunctionProfile theta_profile(const ChainKernel& chain, const ProfileMethod& method) {
  return gauge_profile(chain, GaugeKind::theta, method);
}

double h2_plus(const ChainKernel& chain) { return theta_profile(chain, Enumerate{}).tail_value; }

double h2_plus(const ChainKernel& chain, const ProfileMethod& method) {
  return theta_profile(chain, method).tail_value;
}

double profile_query(const StepFunctionProfile& profile, double r) {
  if (r < profile.floor * (1.0 - 1e-12)) {
    throw Error(ErrorKind::BelowFloor,
                "r = " + format_double(r) + " is below the profile floor " + format_double(profile.floor));
  }
  if (profile.points.empty()) throw Error(ErrorKind::EmptyFamily, "profile has no breakpoints");
  if (r > 0.5) return profile.tail_value;
  const auto it = std::upper_bound(profile.points.begin(), profile.points.end(), r + kMeasureMergeTolerance,
                                   [](double value, const ProfilePoint& p) { return value < p.r; });
  if (it == profile.points.begin()) return std::numeric_limits<double>::infinity();
  return std::prev(it)->value;
}

void write_profile_csv(std::ostream& out, const StepFunctionProfile& profile) {
  out << "gauge,floor,tail,provenance\n";
  out << to_string(profile.gauge) << ',' << format_double(profile.floor) << ','
      << format_double(profile.tail_value) << ',' << to_string(profile.provenance) << '\n';
  out << "r,value\n";
  for (const ProfilePoint& p : profile.points) {
    out << format_double(p.r) << ',' << format_double(p.value) << '\n';
  }
}

StepFunctionProfile read_profile_csv(std::istream& in) {
  auto next_line = [&](std::string& line) {
    while (std::getline(in, line)) {
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (!line.empty()) return true;
    }
    return false;
  };
  auto split = [](const std::string& line) {
    std::vector<std::string> fields;
    std::istringstream ls(line);
    std::string field;
    while (std::getline(ls, field, ',')) fields.push_back(field);
    return fields;
  };
  auto number = [](const std::string& text) {
    try {
      std::size_t used = 0;
      const double v = std::stod(text, &used);
      if (used != text.size()) throw std::invalid_argument(text);
      return v;
    } catch (const std::logic_error&) {
      throw Error(ErrorKind::Parse, "bad number '" + text + "' in profile CSV");
    }
  };

  std::string line;
  if (!next_line(line) || line.rfind("gauge,floor,tail", 0) != 0) {
    throw Error(ErrorKind::Parse, "profile CSV must start with 'gauge,floor,tail'");
  }
  if (!next_line(line)) throw Error(ErrorKind::Parse, "profile CSV misses its metadata row");
  const auto meta = split(line);
  if (meta.size() < 3) throw Error(ErrorKind::Parse, "profile metadata needs gauge,floor,tail");
  StepFunctionProfile profile;
  profile.gauge = parse_gauge(meta[0]);
  profile.floor = number(meta[1]);
  profile.tail_value = number(meta[2]);
  profile.provenance = meta.size() > 3 ? parse_provenance(meta[3]) : Provenance::exact;
  if (!next_line(line) || line != "r,value") throw Error(ErrorKind::Parse, "expected 'r,value' row header");
  while (next_line(line)) {
    const auto fields = split(line);
    if (fields.size() != 2) throw Error(ErrorKind::Parse, "profile rows are 'r,value'");
    profile.points.push_back({number(fields[0]), number(fields[1])});
  }
  if (profile.points.empty()) throw Error(ErrorKind::Parse, "profile has no rows");
  for (std::size_t i = 0; i < profile.points.size(); ++i) {
    if (!(profile.points[i].value > 0.0)) throw Error(ErrorKind::ZeroGauge, "profile value must be positive");
    if (i > 0 && !(profile.points[i].r > profile.points[i - 1].r)) {
      throw Error(ErrorKind::Parse, "profile breakpoints must increase strictly");
    }
    if (i > 0 && profile.points[i].value > profile.points[i - 1].value) {
      throw Error(ErrorKind::Parse, "profile values must be nonincreasing");
    }
  }
  return profile;
}

}  // namespace evoset
