#pragma once

#include <cstdint>
#include <random>
#include <span>

namespace evoset {

/// Seeded generator with portable derived draws: the engine output sequence is fixed by
/// the standard, and the uniform/integer mappings below do not depend on the library's
/// distribution implementations, so identical seeds reproduce identical runs everywhere.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  /// Uniform on the open interval (0, 1).
  double uniform_open();

  /// Uniform integer in [0, bound).
  std::uint64_t below(std::uint64_t bound);

  bool bernoulli(double p) { return uniform_open() < p; }

  template <class T>
  void shuffle(std::span<T> values) {
    for (std::size_t i = values.size(); i > 1; --i) {
      const std::size_t j = static_cast<std::size_t>(below(i));
      std::swap(values[i - 1], values[j]);
    }
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace evoset
