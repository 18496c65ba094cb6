#pragma once

#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "evoset/chain.hpp"
#include "evoset/profiles.hpp"

namespace evoset {

/// Closed-form gauge laws for infinite or idealized state spaces.
///   constant:a=<a>            g(u) = a
///   powerlaw:a=<a>,b=<b>      g(u) = a u^-b
///   loglaw:c=<c>[,cap=<u*>]   g(u) = c ln(1/u), frozen at its value at u* for u >= u*
/// Every form also accepts floor=<r>, the smallest measure at which the law is valid.
struct AnalyticProfile {
  enum class Law { constant, powerlaw, loglaw };
  Law law = Law::constant;
  double a = 1.0;
  double b = 0.0;
  double c = 1.0;
  std::optional<double> cap;
  double floor = 0.0;
  std::string text;

  double value(double u) const;
};

AnalyticProfile parse_analytic_profile(std::string_view text);

using AnyProfile = std::variant<StepFunctionProfile, AnalyticProfile>;

enum class Transform { square, identity };

/// Exact integral of du / (u g(u)) over [lo, hi], where g is the gauge value (identity)
/// or its square. A lower limit below the profile floor is raised to the floor and a
/// warning appended. Throws EmptyRange (lo >= hi after clamping), ZeroGauge,
/// UnboundedIntegral (analytic law vanishing inside the range).
double weighted_log_integral(const AnyProfile& profile, double lo, double hi, Transform transform,
                             std::vector<std::string>* warnings = nullptr);

enum class BoundTheorem { hk, hk2, psith, hki, cont1, convex_psi, convex_phi, gap_lower };

std::string_view to_string(BoundTheorem theorem) noexcept;

struct BoundReport {
  BoundTheorem theorem = BoundTheorem::hk;
  double epsilon = 0.0;
  std::optional<double> gamma;
  std::optional<double> pi_x;
  std::optional<double> pi_y;
  /// The integral term including its coefficient, e.g. c_gamma * int 4 du / (u Phi^2).
  double integral = 0.0;
  /// Step count for discrete theorems, time for cont1.
  double bound = 0.0;
  Provenance provenance = Provenance::exact;
  std::vector<std::string> warnings;
};

std::string to_json(const BoundReport& report);

/// ceil(1 + c_gamma int_{4m}^{4/eps} 4 du / (u Phi^2(u))), c_gamma = (1 - gamma)^2 / gamma^2,
/// m = min(pi_x, pi_y) or the profile floor. gamma above 1/2 is treated as 1/2.
BoundReport tau_uniform_bound(const AnyProfile& phi, double epsilon, double gamma,
                              std::optional<double> pi_x = std::nullopt,
                              std::optional<double> pi_y = std::nullopt);

/// Same evaluation for a profile valid on an unbounded state space (tagged hki).
BoundReport infinite_bound(const AnyProfile& phi, std::optional<double> pi_x,
                           std::optional<double> pi_y, double epsilon, double gamma);

/// ceil(int_{4 pi(x)}^{4/eps} du / (u psi(u))): chi^2(mu_n, pi) <= eps from then on.
BoundReport chi_square_bound(const AnyProfile& psi, std::optional<double> pi_x, double epsilon);

/// int_{4m}^{4/eps} 8 du / (u Phi^2(u)) for the continuous-time chain e^{t(P - I)}.
BoundReport continuous_bound(const AnyProfile& phi, std::optional<double> pi_x,
                             std::optional<double> pi_y, double epsilon);

enum class ConvexKind { psi, phi };

/// psi: ceil(1/2 int_{pi(x)}^{1/eps} du / (u psi_c(u)));
/// phi: ceil(c_gamma int_{m}^{1/eps} 2 du / (u Phi_c^2(u))).
/// Convexity of z -> z g(z^-2) is checked on a 1000-point grid; failures become warnings.
BoundReport convex_variant_bound(const AnyProfile& gauge, std::optional<double> pi_x,
                                 std::optional<double> pi_y, double epsilon, double gamma,
                                 ConvexKind kind);

/// True when z -> z g(z^-2) passes the discrete second-difference test on [lo, hi].
bool convexity_check(const AnyProfile& gauge, double lo, double hi, Transform transform);

struct GapLowerBound {
  double value = 0.0;
  double psi_star = 0.0;
  /// (h2+)^2 / (8 ln(2 / (h2+)^2)); only available for chains with gamma >= 1/2.
  std::optional<double> theta_term;
  std::optional<double> h2_plus;
  std::string winner;  // "psi_star" or "theta"
};

/// Spectral-gap lower bound max(psi_*, theta term) by exact enumeration.
GapLowerBound gap_lower_bound(const ChainKernel& chain);
GapLowerBound gap_lower_bound(double psi_star, std::optional<double> h2_plus);

/// Smallest integer n >= int_delta^{L0} dz / (z f(z)), by adaptive Gauss-Kronrod quadrature.
/// For nondecreasing f into (0, 1], the recursion L_{k+1} = L_k (1 - f(L_k)) then reaches
/// L_n <= delta. Throws BadRange unless 0 < delta < L0.
std::size_t lemma_rr_steps(const std::function<double(double)>& f, double L0, double delta);

/// The integral behind lemma_rr_steps.
double decay_integral(const std::function<double(double)>& f, double L0, double delta);

}  // namespace evoset
