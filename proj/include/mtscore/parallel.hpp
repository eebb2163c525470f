#ifndef MTSCORE_PARALLEL_HPP_
#define MTSCORE_PARALLEL_HPP_

#include <algorithm>
#include <cstddef>
#include <thread>
#include <vector>

namespace mtscore {

// Calls fn(i) for i in [0, n) on up to `threads` workers, each taking a
// contiguous chunk. fn must only write to slot i of its outputs.
template <typename Fn>
void parallel_for(std::size_t n, std::size_t threads, Fn&& fn) {
  threads = std::max<std::size_t>(1, std::min(threads, n));
  if (threads == 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  const std::size_t chunk = (n + threads - 1) / threads;
  std::vector<std::jthread> workers;
  workers.reserve(threads);
  for (std::size_t t = 0; t < threads; ++t) {
    const std::size_t lo = t * chunk;
    const std::size_t hi = std::min(n, lo + chunk);
    if (lo >= hi) break;
    workers.emplace_back([lo, hi, &fn] {
      for (std::size_t i = lo; i < hi; ++i) fn(i);
    });
  }
}

}  // namespace mtscore

#endif  // MTSCORE_PARALLEL_HPP_
