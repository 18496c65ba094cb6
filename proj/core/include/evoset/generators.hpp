#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "evoset/chain.hpp"

namespace evoset {

/// A generated chain, an optional canonical set family for restricted profiles, and
/// free-form metadata lines describing modelling choices.
struct Benchmark {
  std::string name;
  ChainKernel chain;
  std::vector<StateSet> family;
  std::vector<std::string> notes;
};

struct Cell {
  std::size_t row;
  std::size_t col;
  bool operator==(const Cell&) const = default;
};

/// Cycle on n states: hold with probability `holding`, otherwise step to a uniform
/// neighbour. cycle(3, 0.5) is the lazy 3-cycle, cycle(2, 0) the deterministic 2-cycle.
Benchmark cycle(std::size_t n, double holding);

/// Lazy walk on the side x side grid minus `holes`: hold 1/2, otherwise move to a uniform
/// existing neighbour, so pi is proportional to degree. Ids are row-major over the
/// remaining cells. Family: the column blocks {columns 0..k}. Throws Disconnected.
Benchmark lazy_box(std::size_t side, const std::vector<Cell>& holes = {});

/// round(fraction * side^2) holes in a seeded random order, skipping any cell whose
/// removal would disconnect the grid.
std::vector<Cell> random_holes(std::size_t side, double fraction, std::uint64_t seed);

/// Bond percolation: each grid edge is kept with probability p_keep (edges visited in a
/// fixed order); lazy walk on the largest component. Throws NoGiantComponent.
Benchmark percolation_box(std::size_t side, double p_keep, std::uint64_t seed);

/// Lamplighter over a cycle of n lamps: hold 1/2, otherwise toggle the current lamp or
/// move left or right, each with probability 1/3. State id = configuration * n + position.
Benchmark lamplighter_cycle(std::size_t lamps);

/// Lazy walk on {0,1}^dim: hold 1/2, otherwise flip a uniform coordinate. Family: Hamming
/// balls about 0 with radii 0..dim-1; when 2^dim <= 4096 every ball is also followed by
/// its growth through the next sphere in increasing vertex order.
Benchmark hypercube(std::size_t dim);

inline constexpr std::size_t kMaxCliqueStates = 4096;

/// Lazy walk on K_n: hold 1/2, otherwise jump to a uniform other vertex.
Benchmark clique(std::size_t n);

/// Two seeded configuration-model d-regular multigraphs on n1 and n2 vertices joined by a
/// single edge between vertex 0 and vertex n1, walked then lazified by 1/2. Self-loops
/// become holding. Family: the smaller side.
Benchmark two_expanders(std::size_t n1, std::size_t n2, std::size_t degree, std::uint64_t seed);

struct RandomChainOptions {
  /// Probability of each extra directed edge beyond the spanning cycle.
  double density = 0.5;
  /// Mixed in as holding * I + (1 - holding) * P.
  double holding = 0.0;
  /// Symmetric edge weights, giving a reversible chain.
  bool reversible = false;
};

/// Random irreducible chain: a Hamiltonian cycle plus random edges with uniform weights.
Benchmark random_chain(std::size_t n, std::uint64_t seed, const RandomChainOptions& options = {});

/// Builds a benchmark from "name[:key=value,...]". Names: c2, c3, cycle(n, holding),
/// box(side, holes, seed), percolation(side, p, seed), lamplighter(n), hypercube(n),
/// clique(n), two_expanders(n1, n2, degree, seed), random(n, seed, density, holding,
/// reversible). Stochastic generators throw MissingSeed without seed=.
Benchmark make_benchmark(std::string_view spec);

}  // namespace evoset
