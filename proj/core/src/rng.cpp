#include "evoset/rng.hpp"

#include <limits>

namespace evoset {

double Rng::uniform_open() {
  // 53 random bits placed at the centre of one of 2^53 equal cells.
  const std::uint64_t bits = next() >> 11;
  return (static_cast<double>(bits) + 0.5) * 0x1.0p-53;
}

std::uint64_t Rng::below(std::uint64_t bound) {
  if (bound <= 1) return 0;
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % bound;
  std::uint64_t draw = next();
  while (draw >= limit) draw = next();
  return draw % bound;
}

}  // namespace evoset
