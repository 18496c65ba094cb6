#include "evoset/chain.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "evoset/error.hpp"

namespace evoset {
namespace {

bool reaches_all(std::size_t n, const std::vector<std::size_t>& offsets,
                 const std::vector<Transition>& entries) {
  std::vector<char> seen(n, 0);
  std::vector<StateId> stack{0};
  seen[0] = 1;
  std::size_t reached = 1;
  while (!stack.empty()) {
    const StateId x = stack.back();
    stack.pop_back();
    for (std::size_t k = offsets[x]; k < offsets[x + 1]; ++k) {
      const StateId y = entries[k].target;
      if (!seen[y]) {
        seen[y] = 1;
        ++reached;
        stack.push_back(y);
      }
    }
  }
  return reached == n;
}

double stationarity_residual(const ChainKernel& chain, std::span<const double> pi) {
  double worst = 0.0;
  for (StateId y = 0; y < chain.size(); ++y) {
    double mass = 0.0;
    for (const Transition& t : chain.column(y)) mass += pi[t.target] * t.prob;
    worst = std::max(worst, std::abs(mass - pi[y]));
  }
  return worst;
}

std::vector<double> solve_direct(const ChainKernel& chain) {
  const auto n = static_cast<Eigen::Index>(chain.size());
  // (P^T - I) pi = 0 with the last equation replaced by sum(pi) = 1.
  Eigen::MatrixXd a = -Eigen::MatrixXd::Identity(n, n);
  for (StateId x = 0; x < chain.size(); ++x) {
    for (const Transition& t : chain.row(x)) a(t.target, x) += t.prob;
  }
  a.row(n - 1).setOnes();
  Eigen::VectorXd b = Eigen::VectorXd::Zero(n);
  b(n - 1) = 1.0;
  const Eigen::PartialPivLU<Eigen::MatrixXd> lu(a);
  Eigen::VectorXd sol = lu.solve(b);
  for (int refine = 0; refine < 3; ++refine) {
    const Eigen::VectorXd residual = b - a * sol;
    if (residual.cwiseAbs().maxCoeff() < 1e-15) break;
    sol += lu.solve(residual);
  }
  std::vector<double> pi(sol.data(), sol.data() + n);
  for (double& v : pi) v = std::max(v, 0.0);
  const double total = std::accumulate(pi.begin(), pi.end(), 0.0);
  for (double& v : pi) v /= total;
  return pi;
}

std::vector<double> solve_power(const ChainKernel& chain) {
  // Iterates the half-lazy kernel so periodic chains converge too.
  const std::size_t n = chain.size();
  std::vector<double> pi(n, 1.0 / static_cast<double>(n));
  std::vector<double> next(n);
  constexpr std::size_t kMaxIterations = 20'000'000;
  for (std::size_t it = 0; it < kMaxIterations; ++it) {
    double residual = 0.0;
    for (StateId y = 0; y < n; ++y) {
      double mass = 0.0;
      for (const Transition& t : chain.column(y)) mass += pi[t.target] * t.prob;
      residual = std::max(residual, std::abs(mass - pi[y]));
      next[y] = 0.5 * (mass + pi[y]);
    }
    if (residual < 1e-13) return pi;
    const double total = std::accumulate(next.begin(), next.end(), 0.0);
    for (StateId y = 0; y < n; ++y) pi[y] = next[y] / total;
  }
  throw Error(ErrorKind::BadStationary, "power iteration did not reach residual 1e-13");
}

}  // namespace

double ChainKernel::prob(StateId x, StateId y) const noexcept {
  const auto r = row(x);
  const auto it = std::lower_bound(r.begin(), r.end(), y,
                                   [](const Transition& t, StateId v) { return t.target < v; });
  return (it != r.end() && it->target == y) ? it->prob : 0.0;
}

SparseRows ChainKernel::rows() const {
  SparseRows out(size());
  for (StateId x = 0; x < size(); ++x) out[x].assign(row(x).begin(), row(x).end());
  return out;
}

ChainKernel build_chain(SparseRows rows, std::optional<std::vector<double>> pi) {
  const std::size_t n = rows.size();
  if (n == 0) throw Error(ErrorKind::InvalidArgument, "chain has no states");
  if (pi && pi->size() != n) {
    throw Error(ErrorKind::InvalidArgument, "stationary vector length " +
                                                std::to_string(pi->size()) + " != " +
                                                std::to_string(n));
  }

  ChainKernel chain;
  chain.row_offsets_.assign(n + 1, 0);
  for (StateId x = 0; x < n; ++x) {
    auto& r = rows[x];
    std::sort(r.begin(), r.end(),
              [](const Transition& a, const Transition& b) { return a.target < b.target; });
    std::vector<Transition> merged;
    double sum = 0.0;
    for (const Transition& t : r) {
      if (t.target >= n) {
        throw Error(ErrorKind::InvalidArgument, "transition " + std::to_string(x) + " -> " +
                                                    std::to_string(t.target) +
                                                    " targets a missing state");
      }
      if (!(t.prob >= 0.0) || !std::isfinite(t.prob)) {
        throw Error(ErrorKind::NotStochastic, "row " + std::to_string(x) +
                                                  " has a negative or non-finite entry");
      }
      sum += t.prob;
      if (t.prob == 0.0) continue;
      if (!merged.empty() && merged.back().target == t.target) {
        merged.back().prob += t.prob;
      } else {
        merged.push_back(t);
      }
    }
    if (std::abs(sum - 1.0) > kInputTolerance) {
      throw Error(ErrorKind::NotStochastic,
                  "row " + std::to_string(x) + " sums to " + std::to_string(sum));
    }
    for (Transition& t : merged) t.prob /= sum;
    chain.row_entries_.insert(chain.row_entries_.end(), merged.begin(), merged.end());
    chain.row_offsets_[x + 1] = chain.row_entries_.size();
  }

  // Column (in-edge) view, sorted by source because rows are visited in order.
  chain.col_offsets_.assign(n + 1, 0);
  for (const Transition& t : chain.row_entries_) ++chain.col_offsets_[t.target + 1];
  std::partial_sum(chain.col_offsets_.begin(), chain.col_offsets_.end(),
                   chain.col_offsets_.begin());
  chain.col_entries_.resize(chain.row_entries_.size());
  {
    std::vector<std::size_t> cursor(chain.col_offsets_.begin(), chain.col_offsets_.end() - 1);
    for (StateId x = 0; x < n; ++x) {
      for (const Transition& t : chain.row(x)) {
        chain.col_entries_[cursor[t.target]++] = Transition{x, t.prob};
      }
    }
  }

  if (!reaches_all(n, chain.row_offsets_, chain.row_entries_) ||
      !reaches_all(n, chain.col_offsets_, chain.col_entries_)) {
    throw Error(ErrorKind::Reducible, "support graph is not strongly connected");
  }

  if (pi) {
    double total = 0.0;
    for (double v : *pi) {
      if (!(v > 0.0) || !std::isfinite(v)) {
        throw Error(ErrorKind::BadStationary, "stationary weights must be positive and finite");
      }
      total += v;
    }
    for (double& v : *pi) v /= total;
    chain.pi_ = std::move(*pi);
    const double residual = stationarity_residual(chain, chain.pi_);
    if (residual > kInputTolerance) {
      throw Error(ErrorKind::BadStationary,
                  "supplied pi misses pi P = pi by " + std::to_string(residual));
    }
  } else {
    // size() reads pi_, so give it the right length before solving.
    chain.pi_.assign(n, 0.0);
    chain.pi_ = n <= kDirectSolveLimit ? solve_direct(chain) : solve_power(chain);
    if (*std::min_element(chain.pi_.begin(), chain.pi_.end()) <= 0.0) {
      throw Error(ErrorKind::BadStationary, "solved stationary law has a zero weight");
    }
    const double residual = stationarity_residual(chain, chain.pi_);
    if (residual > kConstructionTolerance) {
      throw Error(ErrorKind::BadStationary,
                  "stationary solve residual " + std::to_string(residual) + " above 1e-12");
    }
  }

  chain.pi_min_ = *std::min_element(chain.pi_.begin(), chain.pi_.end());
  chain.gamma_ = 1.0;
  for (StateId x = 0; x < n; ++x) chain.gamma_ = std::min(chain.gamma_, chain.prob(x, x));

  chain.reversible_ = true;
  for (StateId x = 0; x < n && chain.reversible_; ++x) {
    for (const Transition& t : chain.row(x)) {
      const double forward = chain.pi_[x] * t.prob;
      const double backward = chain.pi_[t.target] * chain.prob(t.target, x);
      if (std::abs(forward - backward) > kConstructionTolerance) {
        chain.reversible_ = false;
        break;
      }
    }
  }
  return chain;
}

ChainKernel time_reversal(const ChainKernel& chain) {
  SparseRows reversed(chain.size());
  for (StateId y = 0; y < chain.size(); ++y) {
    for (const Transition& t : chain.row(y)) {
      reversed[t.target].push_back({y, chain.pi(y) * t.prob / chain.pi(t.target)});
    }
  }
  return build_chain(std::move(reversed), std::vector<double>(chain.pi().begin(), chain.pi().end()));
}

ChainKernel lazify(const ChainKernel& chain, double beta) {
  if (!(beta >= 0.0 && beta < 1.0)) {
    throw Error(ErrorKind::InvalidArgument, "laziness must lie in [0, 1)");
  }
  SparseRows rows(chain.size());
  for (StateId x = 0; x < chain.size(); ++x) {
    for (const Transition& t : chain.row(x)) rows[x].push_back({t.target, (1.0 - beta) * t.prob});
    if (beta > 0.0) rows[x].push_back({x, beta});
  }
  return build_chain(std::move(rows), std::vector<double>(chain.pi().begin(), chain.pi().end()));
}

double q_flow(const ChainKernel& chain, const StateSet& from, const StateSet& to) {
  double total = 0.0;
  from.for_each([&](StateId s) {
    double row_mass = 0.0;
    for (const Transition& t : chain.row(s)) {
      if (to.contains(t.target)) row_mass += t.prob;
    }
    total += chain.pi(s) * row_mass;
  });
  return total;
}

double q_flow(const ChainKernel& chain, const StateSet& from, StateId to) {
  double total = 0.0;
  for (const Transition& t : chain.column(to)) {
    if (from.contains(t.target)) total += chain.pi(t.target) * t.prob;
  }
  return total;
}

double conductance(const ChainKernel& chain, const StateSet& set) {
  if (set.empty()) throw Error(ErrorKind::InvalidArgument, "conductance of the empty set");
  double boundary = 0.0;
  set.for_each([&](StateId s) {
    double leaving = 0.0;
    for (const Transition& t : chain.row(s)) {
      if (!set.contains(t.target)) leaving += t.prob;
    }
    boundary += chain.pi(s) * leaving;
  });
  return boundary / set.measure();
}

}  // namespace evoset
