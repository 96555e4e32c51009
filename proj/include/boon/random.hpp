#pragma once

#include <algorithm>
#include <cstdint>
#include <exception>
#include <functional>
#include <random>
#include <thread>
#include <vector>

namespace boon {

/// SplitMix64 finalizer.
std::uint64_t mix64(std::uint64_t x) noexcept;

/// Seeds an engine for one independent stream identified by (seed, keys...).
/// The seed is a pure function of its inputs, so replicate r draws the same
/// numbers no matter which thread runs it or in which order.
std::mt19937_64 make_stream(std::uint64_t seed, std::uint64_t key,
                            std::uint64_t subkey = 0, std::uint64_t domain = 0);

/// Worker count for `requested` (0 means hardware concurrency).
unsigned resolve_threads(unsigned requested) noexcept;

/// Runs body(i) for i in [0, count) over `threads` workers with a static
/// partition. Each index writes only its own result slot, so the outcome
/// does not depend on the thread count. If any body throws, the exception of
/// the smallest failing index is rethrown.
template <class Body>
void parallel_for(std::size_t count, unsigned threads, Body&& body) {
  const unsigned workers =
      static_cast<unsigned>(std::min<std::size_t>(resolve_threads(threads), std::max<std::size_t>(count, 1)));
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::vector<std::exception_ptr> errors(workers);
  {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        const std::size_t begin = count * w / workers;
        const std::size_t end = count * (w + 1) / workers;
        for (std::size_t i = begin; i < end; ++i) {
          try {
            body(i);
          } catch (...) {
            errors[w] = std::current_exception();
            return;
          }
        }
      });
    }
  }
  // Partitions are ordered, so the first failing worker holds the smallest index.
  for (unsigned w = 0; w < workers; ++w) {
    if (errors[w]) std::rethrow_exception(errors[w]);
  }
}

}  // namespace boon
