#include "evoset/state_set.hpp"

#include <cstdio>

#include "evoset/error.hpp"

namespace evoset {
namespace {

std::size_t word_count(std::size_t universe) { return (universe + 63) / 64; }

}  // namespace

StateSet::StateSet(std::size_t universe, std::vector<std::uint64_t> words,
                   std::span<const double> pi)
    : universe_(universe), words_(std::move(words)) {
  for_each([&](StateId x) { measure_ += pi[x]; });
}

StateSet::StateSet(std::span<const StateId> members, std::span<const double> pi)
    : universe_(pi.size()), words_(word_count(pi.size()), 0) {
  for (StateId x : members) {
    if (x >= universe_) {
      throw Error(ErrorKind::InvalidArgument,
                  "state id " + std::to_string(x) + " outside universe of size " +
                      std::to_string(universe_));
    }
    words_[x >> 6] |= std::uint64_t{1} << (x & 63);
  }
  for_each([&](StateId x) { measure_ += pi[x]; });
}

StateSet StateSet::none(std::size_t universe) {
  StateSet s;
  s.universe_ = universe;
  s.words_.assign(word_count(universe), 0);
  return s;
}

StateSet StateSet::all(std::span<const double> pi) {
  std::vector<std::uint64_t> words(word_count(pi.size()), ~std::uint64_t{0});
  if (pi.size() % 64 != 0) words.back() = (std::uint64_t{1} << (pi.size() % 64)) - 1;
  return StateSet(pi.size(), std::move(words), pi);
}

StateSet StateSet::singleton(StateId x, std::span<const double> pi) {
  const StateId ids[] = {x};
  return StateSet(ids, pi);
}

StateSet StateSet::from_mask(std::uint64_t mask, std::span<const double> pi) {
  if (pi.size() > 64) throw Error(ErrorKind::InvalidArgument, "from_mask needs <= 64 states");
  if (pi.size() < 64) mask &= (std::uint64_t{1} << pi.size()) - 1;
  return StateSet(pi.size(), std::vector<std::uint64_t>(word_count(pi.size()) ? 1 : 0, mask),
                  pi);
}

std::size_t StateSet::count() const noexcept {
  std::size_t total = 0;
  for (std::uint64_t w : words_) total += static_cast<std::size_t>(std::popcount(w));
  return total;
}

std::vector<StateId> StateSet::members() const {
  std::vector<StateId> out;
  out.reserve(count());
  for_each([&](StateId x) { out.push_back(x); });
  return out;
}

StateSet StateSet::complement(std::span<const double> pi) const {
  std::vector<std::uint64_t> words(words_.size());
  for (std::size_t w = 0; w < words_.size(); ++w) words[w] = ~words_[w];
  if (universe_ % 64 != 0 && !words.empty()) {
    words.back() &= (std::uint64_t{1} << (universe_ % 64)) - 1;
  }
  return StateSet(universe_, std::move(words), pi);
}

StateSet StateSet::sharp(std::span<const double> pi) const {
  return measure_ <= 0.5 ? *this : complement(pi);
}

std::uint64_t StateSet::mask() const {
  if (universe_ > 64) throw Error(ErrorKind::InvalidArgument, "mask() needs <= 64 states");
  return words_.empty() ? 0 : words_[0];
}

std::string StateSet::encode() const {
  if (universe_ <= 64) {
    char buf[24];
    std::snprintf(buf, sizeof buf, "0x%llx", static_cast<unsigned long long>(mask()));
    return buf;
  }
  std::string out;
  for_each([&](StateId x) {
    if (!out.empty()) out += ',';
    out += std::to_string(x);
  });
  return out;
}

}  // namespace evoset
