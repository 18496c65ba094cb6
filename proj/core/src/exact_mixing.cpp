#include "evoset/exact_mixing.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <Eigen/SparseCore>
#include <algorithm>
#include <cmath>
#include <json.hpp>

#include "evoset/chain_io.hpp"
#include "evoset/error.hpp"
#include "evoset/parallel.hpp"

namespace evoset {
namespace {

constexpr std::size_t kRenormalizeEvery = 100;

void require_dense(const ChainKernel& chain) {
  if (chain.size() > kMaxDenseStates) {
    throw Error(ErrorKind::TooLarge, "dense oracles support <= " + std::to_string(kMaxDenseStates) +
                                         " states, chain has " + std::to_string(chain.size()));
  }
}

void check_epsilon(double epsilon) {
  if (!(epsilon > 0.0)) throw Error(ErrorKind::InvalidArgument, "epsilon must be positive");
}

std::uint64_t columns_per_chunk(std::size_t n) { return std::max<std::uint64_t>(8, 65536 / std::max<std::size_t>(n, 1)); }

Eigen::SparseMatrix<double> sparse_matrix(const ChainKernel& chain) {
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(chain.nonzeros());
  for (StateId x = 0; x < chain.size(); ++x) {
    for (const Transition& t : chain.row(x)) triplets.emplace_back(x, t.target, t.prob);
  }
  const auto n = static_cast<Eigen::Index>(chain.size());
  Eigen::SparseMatrix<double> p(n, n);
  p.setFromTriplets(triplets.begin(), triplets.end());
  return p;
}

/// Poisson(t) weights up to the index where the remaining tail drops below tail_tol.
std::vector<double> poisson_weights(double t, double tail_tol) {
  if (!(t >= 0.0) || !std::isfinite(t)) throw Error(ErrorKind::InvalidArgument, "time must be finite and >= 0");
  if (!(tail_tol > 0.0)) throw Error(ErrorKind::InvalidArgument, "tail tolerance must be positive");
  if (t == 0.0) return {1.0};
  std::vector<double> w;
  const double log_t = std::log(t);
  for (std::size_t k = 0;; ++k) {
    const double kd = static_cast<double>(k);
    w.push_back(std::exp(-t + kd * log_t - std::lgamma(kd + 1.0)));
    if (kd + 2.0 > t) {
      // Geometric domination of the tail beyond k.
      const double next = std::exp(-t + (kd + 1.0) * log_t - std::lgamma(kd + 2.0));
      if (next / (1.0 - t / (kd + 2.0)) < tail_tol) break;
    }
  }
  return w;
}

Eigen::MatrixXd continuous_matrix(const ChainKernel& chain, const Eigen::SparseMatrix<double>& p, double t,
                                  double tail_tol) {
  const auto n = static_cast<Eigen::Index>(chain.size());
  const std::vector<double> w = poisson_weights(t, tail_tol);
  Eigen::MatrixXd power = Eigen::MatrixXd::Identity(n, n);
  Eigen::MatrixXd h = w[0] * power;
  for (std::size_t k = 1; k < w.size(); ++k) {
    power = power * p;
    h += w[k] * power;
  }
  const Eigen::VectorXd sums = h.rowwise().sum();
  for (Eigen::Index x = 0; x < n; ++x) h.row(x) /= sums(x);
  return h;
}

double matrix_deviation(const Eigen::MatrixXd& h, std::span<const double> pi) {
  double worst = 0.0;
  for (Eigen::Index y = 0; y < h.cols(); ++y) {
    for (Eigen::Index x = 0; x < h.rows(); ++x) {
      worst = std::max(worst, std::abs(h(x, y) / pi[static_cast<std::size_t>(y)] - 1.0));
    }
  }
  return worst;
}

}  // namespace

std::vector<double> distribution_at(const ChainKernel& chain, StateId x, std::size_t n) {
  if (x >= chain.size()) throw Error(ErrorKind::InvalidArgument, "start state out of range");
  std::vector<double> mu(chain.size(), 0.0), next(chain.size());
  mu[x] = 1.0;
  for (std::size_t k = 0; k < n; ++k) {
    std::fill(next.begin(), next.end(), 0.0);
    for (StateId z = 0; z < chain.size(); ++z) {
      if (mu[z] == 0.0) continue;
      for (const Transition& t : chain.row(z)) next[t.target] += mu[z] * t.prob;
    }
    mu.swap(next);
    if ((k + 1) % kRenormalizeEvery == 0) {
      double total = 0.0;
      for (double v : mu) total += v;
      for (double& v : mu) v /= total;
    }
  }
  return mu;
}

double chi_square(std::span<const double> mu, std::span<const double> pi) {
  double total = 0.0;
  for (std::size_t y = 0; y < mu.size(); ++y) {
    const double d = mu[y] - pi[y];
    total += d * d / pi[y];
  }
  return total;
}

double chi_square_moment_form(std::span<const double> mu, std::span<const double> pi) {
  double total = 0.0;
  for (std::size_t y = 0; y < mu.size(); ++y) total += mu[y] * mu[y] / pi[y];
  return total - 1.0;
}

double total_variation(std::span<const double> mu, std::span<const double> nu) {
  double total = 0.0;
  for (std::size_t y = 0; y < mu.size(); ++y) total += std::abs(mu[y] - nu[y]);
  return 0.5 * total;
}

double max_relative_deviation(const DenseKernel& kernel, std::span<const double> pi) {
  double worst = 0.0;
  for (std::size_t x = 0; x < kernel.n; ++x) {
    for (std::size_t y = 0; y < kernel.n; ++y) worst = std::max(worst, std::abs(kernel(x, y) / pi[y] - 1.0));
  }
  return worst;
}

PowerSequence::PowerSequence(const ChainKernel& chain)
    : chain_(chain), n_(chain.size()), columns_(n_ * n_, 0.0), scratch_(n_ * n_, 0.0) {
  require_dense(chain);
  for (std::size_t x = 0; x < n_; ++x) columns_[x * n_ + x] = 1.0;
}

void PowerSequence::step() {
  // Column y of P^{k+1} = sum over in-edges (z -> y) of p(z, y) times column z of P^k.
  parallel_chunks(
      n_,
      [&](std::size_t, std::uint64_t begin, std::uint64_t end) {
        for (std::size_t y = begin; y < end; ++y) {
          double* out = scratch_.data() + y * n_;
          std::fill(out, out + n_, 0.0);
          for (const Transition& in : chain_.column(static_cast<StateId>(y))) {
            const double* src = columns_.data() + static_cast<std::size_t>(in.target) * n_;
            const double p = in.prob;
            for (std::size_t x = 0; x < n_; ++x) out[x] += p * src[x];
          }
        }
      },
      columns_per_chunk(n_));
  columns_.swap(scratch_);
  ++power_;
  if (power_ % kRenormalizeEvery == 0) {
    std::vector<double> sums(n_, 0.0);
    for (std::size_t y = 0; y < n_; ++y) {
      const double* col = columns_.data() + y * n_;
      for (std::size_t x = 0; x < n_; ++x) sums[x] += col[x];
    }
    for (std::size_t y = 0; y < n_; ++y) {
      double* col = columns_.data() + y * n_;
      for (std::size_t x = 0; x < n_; ++x) col[x] /= sums[x];
    }
  }
}

std::vector<double> PowerSequence::row(StateId x) const {
  std::vector<double> out(n_);
  for (std::size_t y = 0; y < n_; ++y) out[y] = columns_[y * n_ + x];
  return out;
}

DenseKernel PowerSequence::dense() const {
  DenseKernel k{n_, std::vector<double>(n_ * n_)};
  for (std::size_t y = 0; y < n_; ++y) {
    for (std::size_t x = 0; x < n_; ++x) k.values[x * n_ + y] = columns_[y * n_ + x];
  }
  return k;
}

PowerStats PowerSequence::stats(bool with_chi_square) const {
  PowerStats s;
  std::vector<double> tv(n_, 0.0), chi(with_chi_square ? n_ : 0, 0.0);
  for (std::size_t y = 0; y < n_; ++y) {
    const double* col = columns_.data() + y * n_;
    const double pi = chain_.pi(static_cast<StateId>(y));
    const double inv = 1.0 / pi;
    double worst = 0.0;
    for (std::size_t x = 0; x < n_; ++x) {
      const double d = col[x] - pi;
      worst = std::max(worst, std::abs(d));
      tv[x] += std::abs(d);
    }
    if (with_chi_square) {
      for (std::size_t x = 0; x < n_; ++x) {
        const double d = col[x] - pi;
        chi[x] += d * d * inv;
      }
    }
    s.max_relative_deviation = std::max(s.max_relative_deviation, worst * inv);
  }
  for (double v : tv) s.max_total_variation = std::max(s.max_total_variation, 0.5 * v);
  for (double v : chi) s.max_chi_square = std::max(s.max_chi_square, v);
  return s;
}

double PowerSequence::chi_square_from(StateId x) const {
  double total = 0.0;
  for (std::size_t y = 0; y < n_; ++y) {
    const double pi = chain_.pi(static_cast<StateId>(y));
    const double d = columns_[y * n_ + x] - pi;
    total += d * d / pi;
  }
  return total;
}

DenseKernel transition_power(const ChainKernel& chain, std::size_t n) {
  PowerSequence seq(chain);
  while (seq.power() < n) seq.step();
  return seq.dense();
}

std::size_t tau_uniform(const ChainKernel& chain, double epsilon, std::size_t n_max) {
  check_epsilon(epsilon);
  PowerSequence seq(chain);
  for (;;) {
    if (seq.stats(false).max_relative_deviation <= epsilon) return seq.power();
    if (seq.power() >= n_max) break;
    seq.step();
  }
  throw Error(ErrorKind::NotMixed, "uniform deviation above " + format_double(epsilon) + " through n = " +
                                       std::to_string(n_max));
}

std::size_t tau_tv(const ChainKernel& chain, double epsilon, std::size_t n_max) {
  check_epsilon(epsilon);
  PowerSequence seq(chain);
  for (;;) {
    if (seq.stats(false).max_total_variation <= epsilon) return seq.power();
    if (seq.power() >= n_max) break;
    seq.step();
  }
  throw Error(ErrorKind::NotMixed, "total variation above " + format_double(epsilon) + " through n = " +
                                       std::to_string(n_max));
}

std::size_t chi_square_time(const ChainKernel& chain, StateId x, double epsilon, std::size_t n_max) {
  check_epsilon(epsilon);
  if (x >= chain.size()) throw Error(ErrorKind::InvalidArgument, "start state out of range");
  std::vector<double> mu(chain.size(), 0.0), next(chain.size());
  mu[x] = 1.0;
  for (std::size_t n = 0;; ++n) {
    if (chi_square(mu, chain.pi()) <= epsilon) return n;
    if (n >= n_max) break;
    std::fill(next.begin(), next.end(), 0.0);
    for (StateId z = 0; z < chain.size(); ++z) {
      for (const Transition& t : chain.row(z)) next[t.target] += mu[z] * t.prob;
    }
    mu.swap(next);
  }
  throw Error(ErrorKind::NotMixed, "chi-square above " + format_double(epsilon) + " through n = " +
                                       std::to_string(n_max));
}

double spectral_gap(const ChainKernel& chain) {
  require_dense(chain);
  if (!chain.reversible()) throw Error(ErrorKind::NotReversible, "spectral gap needs a reversible chain");
  const auto n = static_cast<Eigen::Index>(chain.size());
  if (n < 2) throw Error(ErrorKind::InvalidArgument, "spectral gap needs at least two states");
  Eigen::MatrixXd s = Eigen::MatrixXd::Zero(n, n);
  for (StateId x = 0; x < chain.size(); ++x) {
    for (const Transition& t : chain.row(x)) {
      s(x, t.target) = std::sqrt(chain.pi(x) / chain.pi(t.target)) * t.prob;
    }
  }
  const Eigen::MatrixXd sym = 0.5 * (s + s.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(sym, Eigen::EigenvaluesOnly);
  return 1.0 - solver.eigenvalues()(n - 2);
}

std::vector<double> continuous_distribution(const ChainKernel& chain, StateId x, double t, double tail_tol) {
  if (x >= chain.size()) throw Error(ErrorKind::InvalidArgument, "start state out of range");
  const std::vector<double> w = poisson_weights(t, tail_tol);
  std::vector<double> mu(chain.size(), 0.0), next(chain.size()), h(chain.size(), 0.0);
  mu[x] = 1.0;
  for (std::size_t k = 0; k < w.size(); ++k) {
    if (k > 0) {
      std::fill(next.begin(), next.end(), 0.0);
      for (StateId z = 0; z < chain.size(); ++z) {
        if (mu[z] == 0.0) continue;
        for (const Transition& tr : chain.row(z)) next[tr.target] += mu[z] * tr.prob;
      }
      mu.swap(next);
    }
    for (std::size_t y = 0; y < mu.size(); ++y) h[y] += w[k] * mu[y];
  }
  double total = 0.0;
  for (double v : h) total += v;
  for (double& v : h) v /= total;
  return h;
}

DenseKernel continuous_kernel(const ChainKernel& chain, double t, double tail_tol) {
  require_dense(chain);
  const Eigen::MatrixXd h = continuous_matrix(chain, sparse_matrix(chain), t, tail_tol);
  const std::size_t n = chain.size();
  DenseKernel k{n, std::vector<double>(n * n)};
  for (std::size_t x = 0; x < n; ++x) {
    for (std::size_t y = 0; y < n; ++y) {
      k.values[x * n + y] = h(static_cast<Eigen::Index>(x), static_cast<Eigen::Index>(y));
    }
  }
  return k;
}

double tau_uniform_continuous(const ChainKernel& chain, double epsilon, double t_max, double resolution) {
  check_epsilon(epsilon);
  require_dense(chain);
  if (!(resolution > 0.0)) throw Error(ErrorKind::InvalidArgument, "resolution must be positive");
  const auto p = sparse_matrix(chain);
  const auto n = static_cast<Eigen::Index>(chain.size());
  const Eigen::MatrixXd step = continuous_matrix(chain, p, resolution, kDefaultTailTolerance);
  Eigen::MatrixXd previous = Eigen::MatrixXd::Identity(n, n);
  if (matrix_deviation(previous, chain.pi()) <= epsilon) return 0.0;
  for (std::size_t k = 1;; ++k) {
    const double t = static_cast<double>(k) * resolution;
    if (t > t_max) break;
    Eigen::MatrixXd current = previous * step;
    if (matrix_deviation(current, chain.pi()) <= epsilon) {
      // Semigroup property: h_{lo + s} = h_lo h_s.
      double lo = t - resolution;
      double hi = t;
      while (hi - lo > resolution / 100.0) {
        const double mid = 0.5 * (lo + hi);
        Eigen::MatrixXd at_mid = previous * continuous_matrix(chain, p, mid - lo, kDefaultTailTolerance);
        if (matrix_deviation(at_mid, chain.pi()) <= epsilon) {
          hi = mid;
        } else {
          lo = mid;
          previous = std::move(at_mid);
        }
      }
      return hi;
    }
    previous = std::move(current);
  }
  throw Error(ErrorKind::NotMixed, "continuous-time deviation above " + format_double(epsilon) +
                                       " through t = " + format_double(t_max));
}

MixingReport mixing_report(const ChainKernel& chain, const MixingOptions& options) {
  for (double e : options.epsilons) check_epsilon(e);
  if (options.start && *options.start >= chain.size()) {
    throw Error(ErrorKind::InvalidArgument, "start state out of range");
  }
  MixingReport report;
  report.epsilons = options.epsilons;
  report.states = chain.size();
  report.n_max = options.n_max;
  report.tau_uniform.assign(options.epsilons.size(), std::nullopt);
  report.tau_tv.assign(options.epsilons.size(), std::nullopt);
  PowerSequence seq(chain);
  for (;;) {
    const PowerStats s = seq.stats(!options.start);
    const double chi = options.start ? seq.chi_square_from(*options.start) : s.max_chi_square;
    report.chi_curve.push_back({seq.power(), chi});
    bool done = true;
    for (std::size_t i = 0; i < options.epsilons.size(); ++i) {
      if (!report.tau_uniform[i] && s.max_relative_deviation <= options.epsilons[i]) {
        report.tau_uniform[i] = seq.power();
      }
      if (!report.tau_tv[i] && s.max_total_variation <= options.epsilons[i]) report.tau_tv[i] = seq.power();
      done = done && report.tau_uniform[i] && report.tau_tv[i];
    }
    if (done || seq.power() >= options.n_max) break;
    seq.step();
  }
  report.steps_run = seq.power();
  if (chain.reversible() && chain.size() >= 2) report.spectral_gap = spectral_gap(chain);
  return report;
}

std::string to_json(const MixingReport& report) {
  nlohmann::ordered_json j;
  nlohmann::ordered_json tau = nlohmann::ordered_json::object();
  nlohmann::ordered_json tv = nlohmann::ordered_json::object();
  for (std::size_t i = 0; i < report.epsilons.size(); ++i) {
    const std::string key = format_double(report.epsilons[i]);
    tau[key] = report.tau_uniform[i] ? nlohmann::ordered_json(*report.tau_uniform[i]) : nlohmann::ordered_json(nullptr);
    tv[key] = report.tau_tv[i] ? nlohmann::ordered_json(*report.tau_tv[i]) : nlohmann::ordered_json(nullptr);
  }
  j["tau"] = tau;
  j["tau_tv"] = tv;
  j["gap"] = report.spectral_gap ? nlohmann::ordered_json(*report.spectral_gap) : nlohmann::ordered_json(nullptr);
  nlohmann::ordered_json curve = nlohmann::ordered_json::array();
  for (const ChiPoint& p : report.chi_curve) curve.push_back({{"n", p.n}, {"value", p.value}});
  j["chi_curve"] = curve;
  j["params"] = {{"states", report.states}, {"n_max", report.n_max}, {"steps_run", report.steps_run}};
  return j.dump(2);
}

}  // namespace evoset
