#include "evoset/bounds.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <json.hpp>
#include <limits>
#include <sstream>

#include "evoset/chain_io.hpp"
#include "evoset/error.hpp"

namespace evoset {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double power_of(double value, Transform transform) {
  return transform == Transform::square ? value * value : value;
}

double exponent_of(Transform transform) { return transform == Transform::square ? 2.0 : 1.0; }

struct Segment {
  double begin;
  double end;
  double value;
};

std::vector<Segment> segments_of(const StepFunctionProfile& profile) {
  std::vector<Segment> out;
  const auto& pts = profile.points;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (i + 1 < pts.size()) {
      out.push_back({pts[i].r, pts[i + 1].r, pts[i].value});
    } else if (pts[i].r < 0.5) {
      out.push_back({pts[i].r, 0.5, pts[i].value});
      out.push_back({0.5, kInf, profile.tail_value});
    } else {
      out.push_back({pts[i].r, kInf, profile.tail_value});
    }
  }
  return out;
}

double step_integral(const StepFunctionProfile& profile, double lo, double hi, Transform transform) {
  double total = 0.0;
  for (const Segment& s : segments_of(profile)) {
    const double a = std::max(lo, s.begin);
    const double b = std::min(hi, s.end);
    if (!(b > a)) continue;
    const double g = power_of(s.value, transform);
    if (!(g > 0.0)) {
      throw Error(ErrorKind::ZeroGauge, "profile vanishes on [" + format_double(a) + ", " + format_double(b) + "]");
    }
    total += std::log(b / a) / g;
  }
  return total;
}

double analytic_integral(const AnalyticProfile& law, double lo, double hi, Transform transform) {
  const double p = exponent_of(transform);
  switch (law.law) {
    case AnalyticProfile::Law::constant: {
      if (!(law.a > 0.0)) throw Error(ErrorKind::ZeroGauge, "constant law needs a > 0");
      if (!(lo > 0.0)) throw Error(ErrorKind::UnboundedIntegral, "logarithmic integral diverges at u = 0");
      return std::log(hi / lo) / std::pow(law.a, p);
    }
    case AnalyticProfile::Law::powerlaw: {
      if (!(law.a > 0.0)) throw Error(ErrorKind::ZeroGauge, "power law needs a > 0");
      const double k = p * law.b;
      const double scale = std::pow(law.a, p);
      if (k == 0.0) {
        if (!(lo > 0.0)) throw Error(ErrorKind::UnboundedIntegral, "logarithmic integral diverges at u = 0");
        return std::log(hi / lo) / scale;
      }
      if (k < 0.0 && !(lo > 0.0)) {
        throw Error(ErrorKind::UnboundedIntegral, "power law with b < 0 diverges at u = 0");
      }
      return (std::pow(hi, k) - std::pow(lo, k)) / (k * scale);
    }
    case AnalyticProfile::Law::loglaw: {
      if (!(law.c > 0.0)) throw Error(ErrorKind::ZeroGauge, "log law needs c > 0");
      if (!(lo > 0.0)) throw Error(ErrorKind::UnboundedIntegral, "log law is undefined at u = 0");
      const double knee = law.cap.value_or(1.0);
      double total = 0.0;
      const double top = std::min(hi, knee);
      if (top > lo) {
        if (!law.cap && hi >= 1.0) {
          throw Error(ErrorKind::UnboundedIntegral,
                      "log law reaches zero at u = 1 inside [" + format_double(lo) + ", " + format_double(hi) +
                          "]; give cap=");
        }
        // w = ln(1/u) turns the integrand into dw / (c w)^p.
        const double w_lo = std::log(1.0 / lo);
        const double w_hi = std::log(1.0 / top);
        const double cp = std::pow(law.c, p);
        total += p == 1.0 ? std::log(w_lo / w_hi) / cp : (1.0 / w_hi - 1.0 / w_lo) / cp;
      }
      if (law.cap && hi > knee) {
        const double frozen = law.c * std::log(1.0 / knee);
        total += std::log(hi / std::max(lo, knee)) / std::pow(frozen, p);
      }
      return total;
    }
  }
  return 0.0;
}

double floor_of(const AnyProfile& profile) {
  return std::visit([](const auto& p) { return p.floor; }, profile);
}

Provenance provenance_of(const AnyProfile& profile) {
  if (const auto* step = std::get_if<StepFunctionProfile>(&profile)) return step->provenance;
  return Provenance::analytic;
}

double gauge_at(const AnyProfile& profile, double u) {
  if (const auto* step = std::get_if<StepFunctionProfile>(&profile)) return profile_query(*step, u);
  return std::get<AnalyticProfile>(profile).value(u);
}

double parse_number(std::string_view key, std::string_view text) {
  try {
    std::size_t used = 0;
    const std::string s(text);
    const double v = std::stod(s, &used);
    if (used != s.size() || !std::isfinite(v)) throw std::invalid_argument(s);
    return v;
  } catch (const std::logic_error&) {
    throw Error(ErrorKind::InvalidArgument,
                "analytic profile parameter " + std::string(key) + " has bad value '" + std::string(text) + "'");
  }
}

/// Integral over [lo, hi] with floor clamping; an empty range contributes zero.
double range_integral(const AnyProfile& profile, double lo, double hi, Transform transform,
                      std::vector<std::string>& warnings) {
  const double floor = floor_of(profile);
  if (lo < floor) {
    std::ostringstream msg;
    msg << "lower limit " << format_double(lo) << " raised to the profile floor " << format_double(floor);
    warnings.push_back(msg.str());
    lo = floor;
  }
  if (!(hi > lo)) return 0.0;
  return weighted_log_integral(profile, lo, hi, transform);
}

double endpoint_mass(const AnyProfile& profile, std::optional<double> pi_x, std::optional<double> pi_y) {
  std::optional<double> m;
  if (pi_x) m = *pi_x;
  if (pi_y) m = m ? std::min(*m, *pi_y) : *pi_y;
  if (!m) m = floor_of(profile);
  if (!(*m > 0.0)) {
    throw Error(ErrorKind::InvalidArgument, "endpoint mass must be positive; supply pi_x or a profile floor");
  }
  return *m;
}

void check_epsilon(double epsilon) {
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) {
    throw Error(ErrorKind::InvalidArgument, "epsilon must be positive, got " + format_double(epsilon));
  }
}

double gamma_coefficient(double& gamma, std::vector<std::string>& warnings) {
  if (!(gamma > 0.0)) {
    throw Error(ErrorKind::GammaZero, "gamma = " + format_double(gamma) + " makes the bound vacuous");
  }
  if (gamma > 0.5) {
    warnings.push_back("gamma " + format_double(gamma) + " above 1/2 evaluated as 1/2");
    gamma = 0.5;
  }
  return (1.0 - gamma) * (1.0 - gamma) / (gamma * gamma);
}

double discrete_steps(double value) { return std::max(1.0, std::ceil(value)); }

BoundReport hk_family(BoundTheorem theorem, const AnyProfile& phi, double epsilon, double gamma,
                      std::optional<double> pi_x, std::optional<double> pi_y) {
  check_epsilon(epsilon);
  BoundReport report;
  report.theorem = theorem;
  report.epsilon = epsilon;
  const double coefficient = gamma_coefficient(gamma, report.warnings);
  report.gamma = gamma;
  report.pi_x = pi_x;
  report.pi_y = pi_y;
  report.provenance = provenance_of(phi);
  const double m = endpoint_mass(phi, pi_x, pi_y);
  report.integral =
      coefficient * 4.0 * range_integral(phi, 4.0 * m, 4.0 / epsilon, Transform::square, report.warnings);
  report.bound = std::ceil(1.0 + report.integral);
  return report;
}

}  // namespace

double AnalyticProfile::value(double u) const {
  switch (law) {
    case Law::constant: return a;
    case Law::powerlaw: return a * std::pow(u, -b);
    case Law::loglaw: {
      const double at = cap ? std::min(u, *cap) : u;
      return c * std::log(1.0 / at);
    }
  }
  return a;
}

AnalyticProfile parse_analytic_profile(std::string_view text) {
  AnalyticProfile law;
  law.text = std::string(text);
  const auto colon = text.find(':');
  const std::string_view name = text.substr(0, colon);
  if (name == "constant") {
    law.law = AnalyticProfile::Law::constant;
  } else if (name == "powerlaw") {
    law.law = AnalyticProfile::Law::powerlaw;
  } else if (name == "loglaw") {
    law.law = AnalyticProfile::Law::loglaw;
  } else {
    throw Error(ErrorKind::InvalidArgument,
                "unknown analytic profile '" + std::string(name) + "' (constant, powerlaw, loglaw)");
  }
  bool has_a = false, has_c = false;
  std::string_view rest = colon == std::string_view::npos ? std::string_view{} : text.substr(colon + 1);
  while (!rest.empty()) {
    const auto comma = rest.find(',');
    const std::string_view item = rest.substr(0, comma);
    rest = comma == std::string_view::npos ? std::string_view{} : rest.substr(comma + 1);
    const auto eq = item.find('=');
    if (eq == std::string_view::npos) {
      throw Error(ErrorKind::InvalidArgument, "analytic profile parameter '" + std::string(item) + "' lacks '='");
    }
    const std::string_view key = item.substr(0, eq);
    const double v = parse_number(key, item.substr(eq + 1));
    if (key == "a") {
      law.a = v;
      has_a = true;
    } else if (key == "b") {
      law.b = v;
    } else if (key == "c") {
      law.c = v;
      has_c = true;
    } else if (key == "cap") {
      if (!(v > 0.0 && v < 1.0)) throw Error(ErrorKind::InvalidArgument, "cap must lie in (0, 1)");
      law.cap = v;
    } else if (key == "floor") {
      if (!(v >= 0.0)) throw Error(ErrorKind::InvalidArgument, "floor must be nonnegative");
      law.floor = v;
    } else {
      throw Error(ErrorKind::InvalidArgument, "unknown analytic profile parameter '" + std::string(key) + "'");
    }
  }
  if (law.law != AnalyticProfile::Law::loglaw && !has_a) {
    throw Error(ErrorKind::InvalidArgument, std::string(name) + " profile needs a=");
  }
  if (law.law == AnalyticProfile::Law::loglaw && !has_c) {
    throw Error(ErrorKind::InvalidArgument, "loglaw profile needs c=");
  }
  return law;
}

double weighted_log_integral(const AnyProfile& profile, double lo, double hi, Transform transform,
                             std::vector<std::string>* warnings) {
  const double floor = floor_of(profile);
  if (lo < floor) {
    if (warnings) {
      warnings->push_back("lower limit " + format_double(lo) + " raised to the profile floor " +
                          format_double(floor));
    }
    lo = floor;
  }
  if (!(lo < hi)) {
    throw Error(ErrorKind::EmptyRange, "integration range [" + format_double(lo) + ", " + format_double(hi) +
                                           "] is empty");
  }
  if (const auto* step = std::get_if<StepFunctionProfile>(&profile)) return step_integral(*step, lo, hi, transform);
  return analytic_integral(std::get<AnalyticProfile>(profile), lo, hi, transform);
}

std::string_view to_string(BoundTheorem theorem) noexcept {
  switch (theorem) {
    case BoundTheorem::hk: return "hk";
    case BoundTheorem::hk2: return "hk2";
    case BoundTheorem::psith: return "psith";
    case BoundTheorem::hki: return "hki";
    case BoundTheorem::cont1: return "cont1";
    case BoundTheorem::convex_psi: return "convex-psi";
    case BoundTheorem::convex_phi: return "convex-phi";
    case BoundTheorem::gap_lower: return "gap-lower";
  }
  return "hk";
}

std::string to_json(const BoundReport& report) {
  nlohmann::ordered_json j;
  j["theorem"] = to_string(report.theorem);
  j["epsilon"] = report.epsilon;
  j["gamma"] = report.gamma ? nlohmann::ordered_json(*report.gamma) : nlohmann::ordered_json(nullptr);
  j["pi_x"] = report.pi_x ? nlohmann::ordered_json(*report.pi_x) : nlohmann::ordered_json(nullptr);
  j["pi_y"] = report.pi_y ? nlohmann::ordered_json(*report.pi_y) : nlohmann::ordered_json(nullptr);
  j["integral"] = report.integral;
  if (report.theorem == BoundTheorem::cont1) {
    j["bound"] = report.bound;
  } else {
    j["bound"] = static_cast<long long>(report.bound);
  }
  j["provenance"] = to_string(report.provenance);
  j["warnings"] = report.warnings;
  return j.dump(2);
}

BoundReport tau_uniform_bound(const AnyProfile& phi, double epsilon, double gamma, std::optional<double> pi_x,
                              std::optional<double> pi_y) {
  return hk_family(gamma >= 0.5 ? BoundTheorem::hk : BoundTheorem::hk2, phi, epsilon, gamma, pi_x, pi_y);
}

BoundReport infinite_bound(const AnyProfile& phi, std::optional<double> pi_x, std::optional<double> pi_y,
                           double epsilon, double gamma) {
  return hk_family(BoundTheorem::hki, phi, epsilon, gamma, pi_x, pi_y);
}

BoundReport chi_square_bound(const AnyProfile& psi, std::optional<double> pi_x, double epsilon) {
  check_epsilon(epsilon);
  BoundReport report;
  report.theorem = BoundTheorem::psith;
  report.epsilon = epsilon;
  report.pi_x = pi_x;
  report.provenance = provenance_of(psi);
  const double m = endpoint_mass(psi, pi_x, std::nullopt);
  report.integral = range_integral(psi, 4.0 * m, 4.0 / epsilon, Transform::identity, report.warnings);
  report.bound = discrete_steps(report.integral);
  return report;
}

BoundReport continuous_bound(const AnyProfile& phi, std::optional<double> pi_x, std::optional<double> pi_y,
                             double epsilon) {
  check_epsilon(epsilon);
  BoundReport report;
  report.theorem = BoundTheorem::cont1;
  report.epsilon = epsilon;
  report.pi_x = pi_x;
  report.pi_y = pi_y;
  report.provenance = provenance_of(phi);
  const double m = endpoint_mass(phi, pi_x, pi_y);
  report.integral = 8.0 * range_integral(phi, 4.0 * m, 4.0 / epsilon, Transform::square, report.warnings);
  report.bound = report.integral;
  return report;
}

bool convexity_check(const AnyProfile& gauge, double lo, double hi, Transform transform) {
  if (const auto* step = std::get_if<StepFunctionProfile>(&gauge); step && !step->points.empty()) {
    lo = std::max(lo, step->points.front().r);
  }
  lo = std::max(lo, floor_of(gauge));
  if (!(hi > lo) || !(lo > 0.0)) return true;
  constexpr int kGrid = 1000;
  const double z_lo = 1.0 / std::sqrt(hi);
  const double z_hi = 1.0 / std::sqrt(lo);
  std::vector<double> f(kGrid);
  for (int i = 0; i < kGrid; ++i) {
    const double z = z_lo + (z_hi - z_lo) * i / (kGrid - 1);
    const double u = std::clamp(1.0 / (z * z), lo, hi);
    f[i] = z * power_of(gauge_at(gauge, u), transform);
  }
  for (int i = 1; i + 1 < kGrid; ++i) {
    if (!std::isfinite(f[i - 1]) || !std::isfinite(f[i]) || !std::isfinite(f[i + 1])) continue;
    const double second = f[i - 1] - 2.0 * f[i] + f[i + 1];
    const double scale = std::abs(f[i - 1]) + 2.0 * std::abs(f[i]) + std::abs(f[i + 1]);
    if (second < -1e-9 * scale) return false;
  }
  return true;
}

BoundReport convex_variant_bound(const AnyProfile& gauge, std::optional<double> pi_x, std::optional<double> pi_y,
                                 double epsilon, double gamma, ConvexKind kind) {
  check_epsilon(epsilon);
  BoundReport report;
  report.epsilon = epsilon;
  report.pi_x = pi_x;
  report.provenance = provenance_of(gauge);
  const double hi = 1.0 / epsilon;
  Transform transform = Transform::identity;
  if (kind == ConvexKind::psi) {
    report.theorem = BoundTheorem::convex_psi;
    const double m = endpoint_mass(gauge, pi_x, std::nullopt);
    report.integral = 0.5 * range_integral(gauge, m, hi, Transform::identity, report.warnings);
    if (!convexity_check(gauge, m, hi, transform)) {
      report.warnings.push_back("z -> z psi_c(z^-2) fails the convexity grid check");
    }
  } else {
    report.theorem = BoundTheorem::convex_phi;
    transform = Transform::square;
    report.pi_y = pi_y;
    const double coefficient = gamma_coefficient(gamma, report.warnings);
    report.gamma = gamma;
    const double m = endpoint_mass(gauge, pi_x, pi_y);
    report.integral = coefficient * 2.0 * range_integral(gauge, m, hi, transform, report.warnings);
    if (!convexity_check(gauge, m, hi, transform)) {
      report.warnings.push_back("z -> z Phi_c^2(z^-2) fails the convexity grid check");
    }
  }
  report.bound = discrete_steps(report.integral);
  return report;
}

GapLowerBound gap_lower_bound(double psi_star, std::optional<double> h2_plus) {
  GapLowerBound out;
  out.psi_star = psi_star;
  out.value = psi_star;
  out.winner = "psi_star";
  if (h2_plus) {
    out.h2_plus = h2_plus;
    const double h2 = *h2_plus * *h2_plus;
    if (!(h2 < 2.0)) {
      throw Error(ErrorKind::InvalidArgument, "(h2+)^2 = " + format_double(h2) + " leaves no logarithmic margin");
    }
    out.theta_term = h2 / (8.0 * std::log(2.0 / h2));
    if (*out.theta_term > out.value) {
      out.value = *out.theta_term;
      out.winner = "theta";
    }
  }
  return out;
}

GapLowerBound gap_lower_bound(const ChainKernel& chain) {
  const double psi_star = root_profile(chain, Enumerate{}).tail_value;
  std::optional<double> h2;
  if (chain.gamma() >= 0.5) h2 = h2_plus(chain);
  return gap_lower_bound(psi_star, h2);
}

double decay_integral(const std::function<double(double)>& f, double L0, double delta) {
  if (!(delta > 0.0) || !(delta < L0) || !std::isfinite(L0)) {
    throw Error(ErrorKind::BadRange, "need 0 < delta < L0, got delta = " + format_double(delta) +
                                         ", L0 = " + format_double(L0));
  }
  bool out_of_range = false;
  // z = e^w turns dz / (z f(z)) into dw / f(e^w).
  auto integrand = [&](double w) {
    const double v = f(std::exp(w));
    if (!(v > 0.0) || v > 1.0) {
      out_of_range = true;
      return 0.0;
    }
    return 1.0 / v;
  };
  double error = 0.0;
  const double value = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
      integrand, std::log(delta), std::log(L0), 30, 1e-10, &error);
  if (out_of_range) throw Error(ErrorKind::InvalidArgument, "decay function must map into (0, 1]");
  return value;
}

std::size_t lemma_rr_steps(const std::function<double(double)>& f, double L0, double delta) {
  return static_cast<std::size_t>(std::ceil(decay_integral(f, L0, delta)));
}

}  // namespace evoset
