#include "evoset/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <string>

namespace evoset {
namespace {

unsigned default_threads() {
  if (const char* env = std::getenv("EVOSET_THREADS")) {
    try {
      const long value = std::stol(env);
      if (value > 0) return static_cast<unsigned>(value);
    } catch (...) {
    }
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

std::atomic<unsigned>& configured() {
  static std::atomic<unsigned> value{default_threads()};
  return value;
}

}  // namespace

void set_thread_count(unsigned count) {
  configured().store(count == 0 ? default_threads() : count);
}

unsigned thread_count() { return configured().load(); }

std::size_t chunk_count(std::uint64_t count, std::uint64_t min_per_chunk) {
  const std::uint64_t by_size = std::max<std::uint64_t>(1, count / std::max<std::uint64_t>(1, min_per_chunk));
  return static_cast<std::size_t>(std::min<std::uint64_t>(thread_count(), by_size));
}

}  // namespace evoset
