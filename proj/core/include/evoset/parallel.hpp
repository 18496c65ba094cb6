#pragma once

#include <cstdint>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace evoset {

/// Caps the worker count used by data-parallel loops. 0 restores the hardware default.
void set_thread_count(unsigned count);
unsigned thread_count();

inline constexpr std::uint64_t kDefaultMinPerChunk = 4096;

/// Number of chunks parallel_chunks() will use, so callers can size per-chunk
/// accumulators before the call.
std::size_t chunk_count(std::uint64_t count, std::uint64_t min_per_chunk = kDefaultMinPerChunk);

/// Splits [0, count) into contiguous chunks and runs body(chunk, begin, end) on each,
/// one worker per chunk.
template <class Body>
void parallel_chunks(std::uint64_t count, Body&& body, std::uint64_t min_per_chunk = kDefaultMinPerChunk) {
  const std::size_t chunks = chunk_count(count, min_per_chunk);
  if (chunks <= 1) {
    body(std::size_t{0}, std::uint64_t{0}, count);
    return;
  }
  std::exception_ptr failure;
  std::mutex failure_mutex;
  {
    std::vector<std::jthread> workers;
    workers.reserve(chunks);
    for (std::size_t c = 0; c < chunks; ++c) {
      const std::uint64_t begin = count * c / chunks;
      const std::uint64_t end = count * (c + 1) / chunks;
      workers.emplace_back([&, c, begin, end] {
        try {
          body(c, begin, end);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      });
    }
  }
  if (failure) std::rethrow_exception(failure);
}

}  // namespace evoset
