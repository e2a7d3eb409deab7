#pragma once

#include <algorithm>
#include <cstddef>
#include <thread>
#include <vector>

namespace tracelab {

/// Splits [0, n) into contiguous chunks and calls fn(worker, begin, end) for each, one thread per chunk.
/// Chunk boundaries depend only on n and the worker count.
template <class Fn>
void parallel_chunks(std::size_t n, unsigned workers, Fn&& fn) {
  workers = std::max(1u, workers);
  if (workers == 1 || n < 2) {
    fn(0u, std::size_t{0}, n);
    return;
  }
  const std::size_t chunk = (n + workers - 1) / workers;
  std::vector<std::jthread> threads;
  for (unsigned w = 0; w < workers; ++w) {
    const std::size_t begin = std::min(n, w * chunk);
    const std::size_t end = std::min(n, begin + chunk);
    threads.emplace_back([&fn, w, begin, end] { fn(w, begin, end); });
  }
}

}  // namespace tracelab
