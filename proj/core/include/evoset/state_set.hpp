#pragma once

#include <bit>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace evoset {

using StateId = std::uint32_t;

/// A subset of a finite state space together with its cached stationary measure.
///
/// Membership is a packed bit vector (a single word when the universe has at most 64
/// states). The measure is always recomputed from the weights passed at construction,
/// never derived as 1 - measure of the complement, so it equals the sum of pi over the
/// members up to summation rounding.
class StateSet {
 public:
  StateSet() = default;

  /// Members given as ids; duplicates are ignored. Throws InvalidArgument on ids >= pi.size().
  StateSet(std::span<const StateId> members, std::span<const double> pi);

  static StateSet none(std::size_t universe);
  static StateSet all(std::span<const double> pi);
  static StateSet singleton(StateId x, std::span<const double> pi);
  /// Bit i of mask is membership of state i. Requires pi.size() <= 64.
  static StateSet from_mask(std::uint64_t mask, std::span<const double> pi);

  std::size_t universe() const noexcept { return universe_; }
  double measure() const noexcept { return measure_; }
  std::size_t count() const noexcept;
  bool empty() const noexcept { return count() == 0; }
  bool is_full() const noexcept { return count() == universe_; }

  bool contains(StateId x) const noexcept {
    return x < universe_ && ((words_[x >> 6] >> (x & 63)) & 1u) != 0;
  }

  std::vector<StateId> members() const;

  template <class F>
  void for_each(F&& f) const {
    for (std::size_t w = 0; w < words_.size(); ++w) {
      std::uint64_t bits = words_[w];
      while (bits != 0) {
        const int bit = std::countr_zero(bits);
        f(static_cast<StateId>(w * 64 + static_cast<std::size_t>(bit)));
        bits &= bits - 1;
      }
    }
  }

  StateSet complement(std::span<const double> pi) const;
  /// S itself when pi(S) <= 1/2, otherwise its complement.
  StateSet sharp(std::span<const double> pi) const;

  /// Requires universe() <= 64.
  std::uint64_t mask() const;

  /// "0x<hex mask>" for universes up to 64 states, else comma-joined member ids.
  std::string encode() const;

  friend bool operator==(const StateSet& a, const StateSet& b) noexcept {
    return a.universe_ == b.universe_ && a.words_ == b.words_;
  }

 private:
  StateSet(std::size_t universe, std::vector<std::uint64_t> words, std::span<const double> pi);

  std::size_t universe_ = 0;
  std::vector<std::uint64_t> words_;
  double measure_ = 0.0;
};

}  // namespace evoset
