#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "evoset/chain.hpp"

namespace evoset {

/// Largest chain handled by dense oracles (matrix powers, eigen solves).
inline constexpr std::size_t kMaxDenseStates = 4096;
inline constexpr std::size_t kDefaultMaxSteps = 100000;
inline constexpr double kDefaultTailTolerance = 1e-12;

/// Row-major dense n x n matrix.
struct DenseKernel {
  std::size_t n = 0;
  std::vector<double> values;

  double operator()(std::size_t x, std::size_t y) const { return values[x * n + y]; }
  std::span<const double> row(std::size_t x) const { return {values.data() + x * n, n}; }
};

/// mu_n = p^n(x, .) by repeated vector-matrix products.
std::vector<double> distribution_at(const ChainKernel& chain, StateId x, std::size_t n);

/// sum_y pi(y) (mu(y)/pi(y) - 1)^2.
double chi_square(std::span<const double> mu, std::span<const double> pi);
/// The same quantity as sum_y mu(y)^2 / pi(y) - 1.
double chi_square_moment_form(std::span<const double> mu, std::span<const double> pi);
/// 1/2 sum |mu - nu|.
double total_variation(std::span<const double> mu, std::span<const double> nu);
/// max_{x,y} |h(x, y) / pi(y) - 1|.
double max_relative_deviation(const DenseKernel& kernel, std::span<const double> pi);

struct PowerStats {
  double max_relative_deviation = 0.0;
  double max_total_variation = 0.0;
  double max_chi_square = 0.0;
};

/// P^0, P^1, P^2, ... as dense matrices, with worst-case distances to stationarity.
/// Rows are renormalized every 100 steps.
class PowerSequence {
 public:
  explicit PowerSequence(const ChainKernel& chain);

  std::size_t power() const noexcept { return power_; }
  void step();
  double at(StateId x, StateId y) const { return columns_[static_cast<std::size_t>(y) * n_ + x]; }
  std::vector<double> row(StateId x) const;
  DenseKernel dense() const;
  PowerStats stats(bool with_chi_square) const;
  /// chi^2(p^n(x, .), pi).
  double chi_square_from(StateId x) const;

 private:
  const ChainKernel& chain_;
  std::size_t n_;
  std::size_t power_ = 0;
  std::vector<double> columns_;  // column-major P^power
  std::vector<double> scratch_;
};

DenseKernel transition_power(const ChainKernel& chain, std::size_t n);

/// First n with |p^n(x, y) / pi(y) - 1| <= eps for all x, y. Throws NotMixed past n_max.
std::size_t tau_uniform(const ChainKernel& chain, double epsilon, std::size_t n_max = kDefaultMaxSteps);
/// First n with max_x ||p^n(x, .) - pi|| <= eps.
std::size_t tau_tv(const ChainKernel& chain, double epsilon, std::size_t n_max = kDefaultMaxSteps);
/// First n with chi^2(p^n(x, .), pi) <= eps.
std::size_t chi_square_time(const ChainKernel& chain, StateId x, double epsilon,
                            std::size_t n_max = kDefaultMaxSteps);

/// 1 - lambda_2 of the symmetrization D^{1/2} P D^{-1/2}. Throws NotReversible, TooLarge.
double spectral_gap(const ChainKernel& chain);

/// h_t(x, .) = sum_j e^{-t} t^j / j! p^j(x, .), truncated once the Poisson tail is below
/// tail_tol, then renormalized.
std::vector<double> continuous_distribution(const ChainKernel& chain, StateId x, double t,
                                            double tail_tol = kDefaultTailTolerance);
/// The full kernel h_t = e^{t(P - I)} by uniformization.
DenseKernel continuous_kernel(const ChainKernel& chain, double t, double tail_tol = kDefaultTailTolerance);

/// Smallest grid time k * resolution with max relative deviation of h_t at most eps,
/// refined by bisection to resolution / 100. Throws NotMixed past t_max.
double tau_uniform_continuous(const ChainKernel& chain, double epsilon, double t_max, double resolution);

struct MixingOptions {
  std::vector<double> epsilons{0.25};
  std::size_t n_max = kDefaultMaxSteps;
  /// Start state for the chi^2 curve; worst case over all starts when absent.
  std::optional<StateId> start;
};

struct ChiPoint {
  std::size_t n;
  double value;
};

struct MixingReport {
  std::vector<double> epsilons;
  std::vector<std::optional<std::size_t>> tau_uniform;  // nullopt: not mixed by n_max
  std::vector<std::optional<std::size_t>> tau_tv;
  std::vector<ChiPoint> chi_curve;
  std::optional<double> spectral_gap;  // reversible chains only
  std::size_t states = 0;
  std::size_t n_max = 0;
  std::size_t steps_run = 0;
};

/// Runs one power sequence until every requested eps is met (or n_max).
MixingReport mixing_report(const ChainKernel& chain, const MixingOptions& options);

std::string to_json(const MixingReport& report);

}  // namespace evoset
