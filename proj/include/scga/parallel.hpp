#pragma once

#include <algorithm>
#include <cstdlib>
#include <thread>
#include <vector>

namespace scga::detail {

/// Worker-thread cap: min(hardware_concurrency, $SCGA_THREADS).
inline unsigned thread_cap() {
  static const unsigned cap = [] {
    unsigned n = std::max(1u, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("SCGA_THREADS")) {
      const long requested = std::strtol(env, nullptr, 10);
      if (requested >= 1 && static_cast<unsigned long>(requested) < n)
        n = static_cast<unsigned>(requested);
    }
    return n;
  }();
  return cap;
}

/// Runs body(begin, end) over contiguous chunks of [0, n), possibly on
/// multiple threads. Chunking never affects results as long as each index
/// writes only its own output slot, so parallel callers stay deterministic.
template <typename Body>
void parallel_chunks(std::size_t n, Body&& body) {
  const std::size_t workers =
      std::min<std::size_t>(thread_cap(), std::max<std::size_t>(n, 1));
  if (workers <= 1 || n < 2) {
    body(std::size_t{0}, n);
    return;
  }
  std::vector<std::thread> threads;
  threads.reserve(workers);
  const std::size_t chunk = (n + workers - 1) / workers;
  for (std::size_t w = 0; w < workers; ++w) {
    const std::size_t begin = w * chunk;
    const std::size_t end = std::min(n, begin + chunk);
    if (begin >= end) break;
    threads.emplace_back([&body, begin, end] { body(begin, end); });
  }
  for (auto& t : threads) t.join();
}

}  // namespace scga::detail
