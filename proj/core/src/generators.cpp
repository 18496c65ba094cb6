#include "evoset/generators.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <optional>
#include <string>

#include "evoset/chain_io.hpp"
#include "evoset/error.hpp"
#include "evoset/rng.hpp"

namespace evoset {
namespace {

using Adjacency = std::vector<std::vector<std::pair<StateId, double>>>;

/// Walk on a weighted undirected graph (self-loops allowed): hold with probability
/// `holding`, otherwise move along an edge chosen proportionally to weight. pi is
/// proportional to weighted degree.
ChainKernel graph_walk(const Adjacency& adj, double holding) {
  const std::size_t n = adj.size();
  SparseRows rows(n);
  std::vector<double> pi(n);
  double total = 0.0;
  for (std::size_t x = 0; x < n; ++x) {
    double degree = 0.0;
    for (const auto& [y, w] : adj[x]) degree += w;
    if (!(degree > 0.0)) throw Error(ErrorKind::Disconnected, "state " + std::to_string(x) + " is isolated");
    rows[x].push_back({static_cast<StateId>(x), holding});
    for (const auto& [y, w] : adj[x]) rows[x].push_back({y, (1.0 - holding) * w / degree});
    pi[x] = degree;
    total += degree;
  }
  for (double& p : pi) p /= total;
  return build_chain(std::move(rows), std::move(pi));
}

bool connected(const Adjacency& adj) {
  if (adj.empty()) return false;
  std::vector<char> seen(adj.size(), 0);
  std::vector<StateId> stack{0};
  seen[0] = 1;
  std::size_t count = 1;
  while (!stack.empty()) {
    const StateId x = stack.back();
    stack.pop_back();
    for (const auto& [y, w] : adj[x]) {
      if (!seen[y]) {
        seen[y] = 1;
        ++count;
        stack.push_back(y);
      }
    }
  }
  return count == adj.size();
}

/// Grid graph over the alive cells, ids row-major over alive cells.
struct Grid {
  std::size_t side;
  std::vector<char> alive;
  std::vector<StateId> id;  // per cell; meaningful only when alive
  std::vector<std::size_t> cell_of;

  Grid(std::size_t s, std::vector<char> alive_cells) : side(s), alive(std::move(alive_cells)), id(s * s, 0) {
    for (std::size_t c = 0; c < side * side; ++c) {
      if (alive[c]) {
        id[c] = static_cast<StateId>(cell_of.size());
        cell_of.push_back(c);
      }
    }
  }

  template <class KeepEdge>
  Adjacency adjacency(KeepEdge&& keep) const {
    Adjacency adj(cell_of.size());
    for (std::size_t c : cell_of) {
      const std::size_t r = c / side;
      const std::size_t col = c % side;
      auto link = [&](std::size_t other) {
        if (alive[other] && keep(c, other)) {
          adj[id[c]].push_back({id[other], 1.0});
          adj[id[other]].push_back({id[c], 1.0});
        }
      };
      if (col + 1 < side) link(c + 1);
      if (r + 1 < side) link(c + side);
    }
    return adj;
  }
};

bool grid_connected(std::size_t side, const std::vector<char>& alive) {
  Grid grid(side, alive);
  if (grid.cell_of.size() < 2) return false;
  return connected(grid.adjacency([](std::size_t, std::size_t) { return true; }));
}

void require_side(std::size_t side) {
  if (side < 2) throw Error(ErrorKind::InvalidArgument, "grid side must be >= 2");
  if (side > 64) throw Error(ErrorKind::TooLarge, "grid side must be <= 64");
}

/// Configuration-model d-regular multigraph weights on n vertices, retried until connected.
Adjacency regular_multigraph(std::size_t n, std::size_t degree, Rng& rng) {
  for (int attempt = 0; attempt < 1000; ++attempt) {
    std::vector<StateId> stubs;
    stubs.reserve(n * degree);
    for (std::size_t v = 0; v < n; ++v) stubs.insert(stubs.end(), degree, static_cast<StateId>(v));
    rng.shuffle(std::span<StateId>(stubs));
    std::vector<std::map<StateId, double>> weights(n);
    for (std::size_t i = 0; i + 1 < stubs.size(); i += 2) {
      const StateId a = stubs[i];
      const StateId b = stubs[i + 1];
      if (a == b) {
        weights[a][a] += 2.0;
      } else {
        weights[a][b] += 1.0;
        weights[b][a] += 1.0;
      }
    }
    Adjacency adj(n);
    for (std::size_t v = 0; v < n; ++v) {
      for (const auto& [w, c] : weights[v]) adj[v].push_back({w, c});
    }
    if (connected(adj)) return adj;
  }
  throw Error(ErrorKind::Disconnected, "no connected configuration-model graph in 1000 attempts");
}

class SpecParams {
 public:
  explicit SpecParams(std::string_view text) {
    while (!text.empty()) {
      const auto comma = text.find(',');
      const std::string_view item = text.substr(0, comma);
      text = comma == std::string_view::npos ? std::string_view{} : text.substr(comma + 1);
      if (item.empty()) continue;
      const auto eq = item.find('=');
      if (eq == std::string_view::npos) {
        throw Error(ErrorKind::InvalidArgument, "benchmark parameter '" + std::string(item) + "' lacks '='");
      }
      values_[std::string(item.substr(0, eq))] = std::string(item.substr(eq + 1));
    }
  }

  std::optional<double> number(const std::string& key) {
    const auto it = values_.find(key);
    if (it == values_.end()) return std::nullopt;
    used_.push_back(key);
    try {
      std::size_t used = 0;
      const double v = std::stod(it->second, &used);
      if (used != it->second.size()) throw std::invalid_argument(it->second);
      return v;
    } catch (const std::logic_error&) {
      throw Error(ErrorKind::InvalidArgument, "parameter " + key + " has bad value '" + it->second + "'");
    }
  }

  double number(const std::string& key, double fallback) { return number(key).value_or(fallback); }

  std::size_t count(const std::string& key) {
    const auto v = number(key);
    if (!v) throw Error(ErrorKind::InvalidArgument, "missing parameter " + key + "=");
    if (*v < 0 || *v != std::floor(*v)) throw Error(ErrorKind::InvalidArgument, key + " must be a whole number");
    return static_cast<std::size_t>(*v);
  }

  std::uint64_t seed() {
    const auto it = values_.find("seed");
    if (it == values_.end()) throw Error(ErrorKind::MissingSeed, "stochastic generator needs seed=");
    used_.push_back("seed");
    try {
      std::size_t used = 0;
      const unsigned long long v = std::stoull(it->second, &used);
      if (used != it->second.size()) throw std::invalid_argument(it->second);
      return v;
    } catch (const std::logic_error&) {
      throw Error(ErrorKind::InvalidArgument, "seed has bad value '" + it->second + "'");
    }
  }

  bool has(const std::string& key) const { return values_.count(key) != 0; }

  void finish(std::string_view name) const {
    for (const auto& [key, value] : values_) {
      if (std::find(used_.begin(), used_.end(), key) == used_.end()) {
        throw Error(ErrorKind::InvalidArgument,
                    "unknown parameter '" + key + "' for benchmark " + std::string(name));
      }
    }
  }

 private:
  std::map<std::string, std::string> values_;
  std::vector<std::string> used_;
};

}  // namespace

Benchmark cycle(std::size_t n, double holding) {
  if (n < 2) throw Error(ErrorKind::InvalidArgument, "cycle needs n >= 2");
  if (!(holding >= 0.0 && holding < 1.0)) throw Error(ErrorKind::InvalidArgument, "holding must lie in [0, 1)");
  SparseRows rows(n);
  for (std::size_t x = 0; x < n; ++x) {
    if (holding > 0.0) rows[x].push_back({static_cast<StateId>(x), holding});
    rows[x].push_back({static_cast<StateId>((x + 1) % n), (1.0 - holding) / 2.0});
    rows[x].push_back({static_cast<StateId>((x + n - 1) % n), (1.0 - holding) / 2.0});
  }
  Benchmark b;
  b.name = "cycle:n=" + std::to_string(n) + ",holding=" + format_double(holding);
  b.chain = build_chain(std::move(rows), std::vector<double>(n, 1.0 / static_cast<double>(n)));
  return b;
}

Benchmark lazy_box(std::size_t side, const std::vector<Cell>& holes) {
  require_side(side);
  std::vector<char> alive(side * side, 1);
  for (const Cell& h : holes) {
    if (h.row >= side || h.col >= side) throw Error(ErrorKind::InvalidArgument, "hole outside the grid");
    alive[h.row * side + h.col] = 0;
  }
  if (!grid_connected(side, alive)) {
    throw Error(ErrorKind::Disconnected, "holes disconnect the grid or leave fewer than two cells");
  }
  const Grid grid(side, alive);
  Benchmark b;
  b.name = "box:side=" + std::to_string(side);
  b.chain = graph_walk(grid.adjacency([](std::size_t, std::size_t) { return true; }), 0.5);
  for (std::size_t k = 0; k + 1 < side; ++k) {
    std::vector<StateId> members;
    for (std::size_t c : grid.cell_of) {
      if (c % side <= k) members.push_back(grid.id[c]);
    }
    if (members.empty() || members.size() == grid.cell_of.size()) continue;
    b.family.push_back(b.chain.subset(members));
  }
  if (!holes.empty()) b.notes.push_back("holes=" + std::to_string(holes.size()));
  return b;
}

std::vector<Cell> random_holes(std::size_t side, double fraction, std::uint64_t seed) {
  require_side(side);
  if (!(fraction >= 0.0 && fraction < 1.0)) throw Error(ErrorKind::InvalidArgument, "hole fraction must lie in [0, 1)");
  const auto wanted = static_cast<std::size_t>(std::llround(fraction * static_cast<double>(side * side)));
  std::vector<std::size_t> order(side * side);
  std::iota(order.begin(), order.end(), 0);
  Rng rng(seed);
  rng.shuffle(std::span<std::size_t>(order));
  std::vector<char> alive(side * side, 1);
  std::vector<Cell> holes;
  for (std::size_t c : order) {
    if (holes.size() == wanted) break;
    alive[c] = 0;
    if (grid_connected(side, alive)) {
      holes.push_back({c / side, c % side});
    } else {
      alive[c] = 1;
    }
  }
  return holes;
}

Benchmark percolation_box(std::size_t side, double p_keep, std::uint64_t seed) {
  require_side(side);
  if (!(p_keep > 0.5 && p_keep <= 1.0)) throw Error(ErrorKind::InvalidArgument, "p_keep must lie in (1/2, 1]");
  Rng rng(seed);
  const Grid full(side, std::vector<char>(side * side, 1));
  // Edges are visited in the fixed order of Grid::adjacency, one Bernoulli draw each.
  const Adjacency kept = full.adjacency([&](std::size_t, std::size_t) { return rng.bernoulli(p_keep); });

  std::vector<int> component(side * side, -1);
  std::vector<std::size_t> sizes;
  for (std::size_t start = 0; start < side * side; ++start) {
    if (component[start] >= 0) continue;
    const int label = static_cast<int>(sizes.size());
    std::size_t count = 0;
    std::vector<std::size_t> stack{start};
    component[start] = label;
    while (!stack.empty()) {
      const std::size_t c = stack.back();
      stack.pop_back();
      ++count;
      for (const auto& [y, w] : kept[c]) {
        if (component[y] < 0) {
          component[y] = label;
          stack.push_back(y);
        }
      }
    }
    sizes.push_back(count);
  }
  const auto best = static_cast<int>(std::max_element(sizes.begin(), sizes.end()) - sizes.begin());
  if (sizes[static_cast<std::size_t>(best)] < 2) {
    throw Error(ErrorKind::NoGiantComponent, "largest percolation component has fewer than two cells");
  }
  std::vector<char> alive(side * side);
  for (std::size_t c = 0; c < side * side; ++c) alive[c] = component[c] == best;
  const Grid grid(side, alive);
  Adjacency adj(grid.cell_of.size());
  for (std::size_t c : grid.cell_of) {
    for (const auto& [y, w] : kept[c]) adj[grid.id[c]].push_back({grid.id[y], w});
  }
  Benchmark b;
  b.name = "percolation:side=" + std::to_string(side) + ",p=" + format_double(p_keep) + ",seed=" + std::to_string(seed);
  b.chain = graph_walk(adj, 0.5);
  b.notes.push_back("component_size=" + std::to_string(grid.cell_of.size()));
  return b;
}

Benchmark lamplighter_cycle(std::size_t lamps) {
  if (lamps < 3) throw Error(ErrorKind::InvalidArgument, "lamplighter needs at least 3 lamps");
  if (lamps > 12) throw Error(ErrorKind::TooLarge, "lamplighter supports at most 12 lamps");
  const std::size_t configs = std::size_t{1} << lamps;
  const std::size_t n = configs * lamps;
  SparseRows rows(n);
  for (std::size_t config = 0; config < configs; ++config) {
    for (std::size_t pos = 0; pos < lamps; ++pos) {
      const std::size_t x = config * lamps + pos;
      auto state = [&](std::size_t c, std::size_t p) { return static_cast<StateId>(c * lamps + p); };
      rows[x].push_back({static_cast<StateId>(x), 0.5});
      rows[x].push_back({state(config ^ (std::size_t{1} << pos), pos), 1.0 / 6.0});
      rows[x].push_back({state(config, (pos + 1) % lamps), 1.0 / 6.0});
      rows[x].push_back({state(config, (pos + lamps - 1) % lamps), 1.0 / 6.0});
    }
  }
  Benchmark b;
  b.name = "lamplighter:n=" + std::to_string(lamps);
  b.chain = build_chain(std::move(rows), std::vector<double>(n, 1.0 / static_cast<double>(n)));
  b.notes.push_back("active step: toggle, left, right with probability 1/3 each");
  return b;
}

Benchmark hypercube(std::size_t dim) {
  if (dim < 2) throw Error(ErrorKind::InvalidArgument, "hypercube needs dim >= 2");
  if (dim > 20) throw Error(ErrorKind::TooLarge, "hypercube supports dim <= 20");
  const std::size_t n = std::size_t{1} << dim;
  SparseRows rows(n);
  for (std::size_t x = 0; x < n; ++x) {
    rows[x].push_back({static_cast<StateId>(x), 0.5});
    for (std::size_t i = 0; i < dim; ++i) {
      rows[x].push_back({static_cast<StateId>(x ^ (std::size_t{1} << i)), 0.5 / static_cast<double>(dim)});
    }
  }
  Benchmark b;
  b.name = "hypercube:n=" + std::to_string(dim);
  b.chain = build_chain(std::move(rows), std::vector<double>(n, 1.0 / static_cast<double>(n)));

  std::vector<std::vector<StateId>> spheres(dim + 1);
  for (std::size_t x = 0; x < n; ++x) spheres[std::popcount(x)].push_back(static_cast<StateId>(x));
  const bool interpolate = n <= 4096;
  std::vector<StateId> ball;
  for (std::size_t r = 0; r < dim; ++r) {
    ball.insert(ball.end(), spheres[r].begin(), spheres[r].end());
    b.family.push_back(b.chain.subset(ball));
    if (!interpolate || r + 1 >= dim) continue;
    std::vector<StateId> grown = ball;
    for (std::size_t k = 0; k + 1 < spheres[r + 1].size(); ++k) {
      grown.push_back(spheres[r + 1][k]);
      b.family.push_back(b.chain.subset(grown));
    }
  }
  return b;
}

Benchmark clique(std::size_t n) {
  if (n < 2) throw Error(ErrorKind::InvalidArgument, "clique needs n >= 2");
  if (n > kMaxCliqueStates) throw Error(ErrorKind::TooLarge, "clique supports n <= " + std::to_string(kMaxCliqueStates));
  SparseRows rows(n);
  const double move = 0.5 / static_cast<double>(n - 1);
  for (std::size_t x = 0; x < n; ++x) {
    for (std::size_t y = 0; y < n; ++y) rows[x].push_back({static_cast<StateId>(y), x == y ? 0.5 : move});
  }
  Benchmark b;
  b.name = "clique:n=" + std::to_string(n);
  b.chain = build_chain(std::move(rows), std::vector<double>(n, 1.0 / static_cast<double>(n)));
  return b;
}

Benchmark two_expanders(std::size_t n1, std::size_t n2, std::size_t degree, std::uint64_t seed) {
  if (degree < 3) throw Error(ErrorKind::BadDegree, "degree must be >= 3");
  if (n1 < degree + 1 || n2 < degree + 1) throw Error(ErrorKind::BadDegree, "each side needs at least degree + 1 vertices");
  if ((n1 * degree) % 2 != 0 || (n2 * degree) % 2 != 0) {
    throw Error(ErrorKind::BadDegree, "n * degree must be even on both sides");
  }
  if (n1 + n2 > 4096) throw Error(ErrorKind::TooLarge, "two_expanders supports at most 4096 vertices");
  Rng rng(seed);
  Adjacency adj = regular_multigraph(n1, degree, rng);
  Adjacency right = regular_multigraph(n2, degree, rng);
  for (auto& neighbours : right) {
    auto& row = adj.emplace_back();
    for (const auto& [y, w] : neighbours) row.push_back({static_cast<StateId>(y + n1), w});
  }
  adj[0].push_back({static_cast<StateId>(n1), 1.0});
  adj[n1].push_back({0, 1.0});
  Benchmark b;
  b.name = "two_expanders:n1=" + std::to_string(n1) + ",n2=" + std::to_string(n2) + ",degree=" +
           std::to_string(degree) + ",seed=" + std::to_string(seed);
  b.chain = graph_walk(adj, 0.5);
  std::vector<StateId> small(std::min(n1, n2));
  std::iota(small.begin(), small.end(), static_cast<StateId>(n1 <= n2 ? 0 : n1));
  b.family.push_back(b.chain.subset(small));
  return b;
}

Benchmark random_chain(std::size_t n, std::uint64_t seed, const RandomChainOptions& options) {
  if (n < 2) throw Error(ErrorKind::InvalidArgument, "random chain needs n >= 2");
  if (!(options.density >= 0.0 && options.density <= 1.0)) {
    throw Error(ErrorKind::InvalidArgument, "density must lie in [0, 1]");
  }
  if (!(options.holding >= 0.0 && options.holding < 1.0)) {
    throw Error(ErrorKind::InvalidArgument, "holding must lie in [0, 1)");
  }
  Rng rng(seed);
  auto weight = [&] { return 0.1 + 0.9 * rng.uniform_open(); };
  std::vector<std::vector<double>> w(n, std::vector<double>(n, 0.0));
  for (std::size_t x = 0; x < n; ++x) {
    for (std::size_t y = options.reversible ? x : 0; y < n; ++y) {
      const bool on_cycle = y == (x + 1) % n || (options.reversible && x == (y + 1) % n);
      if (on_cycle || rng.bernoulli(options.density)) {
        const double v = weight();
        w[x][y] = v;
        if (options.reversible) w[y][x] = v;
      }
    }
  }
  SparseRows rows(n);
  std::optional<std::vector<double>> pi;
  if (options.reversible) pi.emplace(n);
  for (std::size_t x = 0; x < n; ++x) {
    double total = 0.0;
    for (double v : w[x]) total += v;
    for (std::size_t y = 0; y < n; ++y) {
      double p = (1.0 - options.holding) * w[x][y] / total;
      if (x == y) p += options.holding;
      if (p > 0.0) rows[x].push_back({static_cast<StateId>(y), p});
    }
    if (pi) (*pi)[x] = total;
  }
  if (pi) {
    double total = 0.0;
    for (double v : *pi) total += v;
    for (double& v : *pi) v /= total;
  }
  Benchmark b;
  b.name = "random:n=" + std::to_string(n) + ",seed=" + std::to_string(seed);
  b.chain = build_chain(std::move(rows), std::move(pi));
  return b;
}

Benchmark make_benchmark(std::string_view spec) {
  const auto colon = spec.find(':');
  const std::string name(spec.substr(0, colon));
  SpecParams params(colon == std::string_view::npos ? std::string_view{} : spec.substr(colon + 1));
  Benchmark b;
  if (name == "c2") {
    b = cycle(2, 0.5);
  } else if (name == "c3") {
    b = cycle(3, 0.5);
  } else if (name == "cycle") {
    const std::size_t n = params.count("n");
    b = cycle(n, params.number("holding", 0.5));
  } else if (name == "box" || name == "lazy_box") {
    const std::size_t side = params.count("side");
    const double fraction = params.number("holes", 0.0);
    std::vector<Cell> holes;
    if (fraction > 0.0) holes = random_holes(side, fraction, params.seed());
    b = lazy_box(side, holes);
  } else if (name == "percolation" || name == "percolation_box") {
    const std::size_t side = params.count("side");
    const auto p = params.number("p");
    if (!p) throw Error(ErrorKind::InvalidArgument, "percolation needs p=");
    b = percolation_box(side, *p, params.seed());
  } else if (name == "lamplighter" || name == "lamplighter_cycle") {
    b = lamplighter_cycle(params.count("n"));
  } else if (name == "hypercube") {
    b = hypercube(params.count("n"));
  } else if (name == "clique") {
    b = clique(params.count("n"));
  } else if (name == "two_expanders") {
    const std::size_t n1 = params.count("n1");
    const std::size_t n2 = params.count("n2");
    const std::size_t degree = params.count("degree");
    b = two_expanders(n1, n2, degree, params.seed());
  } else if (name == "random") {
    const std::size_t n = params.count("n");
    RandomChainOptions options;
    options.density = params.number("density", options.density);
    options.holding = params.number("holding", options.holding);
    options.reversible = params.number("reversible", 0.0) != 0.0;
    b = random_chain(n, params.seed(), options);
  } else {
    throw Error(ErrorKind::InvalidArgument, "unknown benchmark '" + name + "'");
  }
  params.finish(name);
  b.name = std::string(spec);
  return b;
}

}  // namespace evoset
