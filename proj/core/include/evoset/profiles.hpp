#pragma once

#include <cstdint>
#include <iosfwd>
#include <string_view>
#include <variant>
#include <vector>

#include "evoset/chain.hpp"

namespace evoset {

/// Subset enumeration ceiling for exact profiles. Profiles stream over subsets without
/// storing them, so this sits above the set-kernel ceiling.
inline constexpr std::size_t kMaxEnumerationStates = 24;

enum class GaugeKind { phi, psi, theta, psi_restricted };
enum class Provenance { exact, family, monte_carlo, analytic };

std::string_view to_string(GaugeKind gauge) noexcept;
std::string_view to_string(Provenance provenance) noexcept;
GaugeKind parse_gauge(std::string_view text);
Provenance parse_provenance(std::string_view text);

struct ProfilePoint {
  double r;
  double value;
};

/// Nonincreasing step function r -> inf{gauge(S) : pi(S) <= r}.
///
/// points[i].value holds on [points[i].r, points[i+1].r); the last value continues for
/// every larger r, which realizes the constant tail beyond 1/2. Between `floor` and the
/// first breakpoint no recorded set qualifies and the infimum is +infinity (this only
/// happens for family or Monte-Carlo profiles).
struct StepFunctionProfile {
  GaugeKind gauge = GaugeKind::phi;
  std::vector<ProfilePoint> points;
  double tail_value = 0.0;
  double floor = 0.0;
  Provenance provenance = Provenance::exact;

  /// Upper estimates are produced by family and Monte-Carlo methods.
  bool is_upper_estimate() const noexcept { return provenance != Provenance::exact; }
};

struct Enumerate {};
struct Family {
  std::vector<StateSet> sets;
};
struct MonteCarlo {
  std::size_t samples = 0;
  std::uint64_t seed = 0;
};
using ProfileMethod = std::variant<Enumerate, Family, MonteCarlo>;

/// Phi(r) = inf{Phi_S : pi(S) <= r}. Throws TooLarge, EmptyFamily, ZeroConductance.
StepFunctionProfile conductance_profile(const ChainKernel& chain, const ProfileMethod& method);
/// psi(r) = inf{psi(S) : pi(S) <= r}; labelled psi_restricted for family methods.
StepFunctionProfile root_profile(const ChainKernel& chain, const ProfileMethod& method);
/// theta-profile; its tail is h2+.
StepFunctionProfile theta_profile(const ChainKernel& chain, const ProfileMethod& method);
StepFunctionProfile gauge_profile(const ChainKernel& chain, GaugeKind gauge,
                                  const ProfileMethod& method);

/// h2+ = inf{theta_S : pi(S) <= 1/2} by exact enumeration.
double h2_plus(const ChainKernel& chain);
/// Upper estimate of h2+ over a family or Monte-Carlo sets (exact for Enumerate).
double h2_plus(const ChainKernel& chain, const ProfileMethod& method);

/// Step-function evaluation; throws BelowFloor for r < floor.
double profile_query(const StepFunctionProfile& profile, double r);

/// Profile CSV:
///   gauge,floor,tail,provenance
///   <gauge>,<floor>,<tail>,<provenance>
///   r,value
///   <r>,<value>        one row per breakpoint
void write_profile_csv(std::ostream& out, const StepFunctionProfile& profile);
StepFunctionProfile read_profile_csv(std::istream& in);

}  // namespace evoset
