#pragma once

#include <cstdint>
#include <future>
#include <thread>
#include <vector>

namespace thinsets {

/// Runs f(lo, hi) over a partition of [0, n). Each chunk may keep its own
/// scratch state; items must write only to their own index slots, so results
/// do not depend on the thread count.
template <class F>
void parallel_chunks(std::int64_t n, F&& f, unsigned threads = 0) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  if (n <= 0) return;
  if (threads <= 1 || n < 4) {
    f(std::int64_t{0}, n);
    return;
  }
  std::vector<std::future<void>> futs;
  const std::int64_t chunk = (n + threads - 1) / threads;
  for (unsigned t = 0; t < threads; ++t) {
    const std::int64_t lo = t * chunk;
    const std::int64_t hi = std::min(n, lo + chunk);
    if (lo >= hi) break;
    futs.push_back(std::async(std::launch::async, [lo, hi, &f] { f(lo, hi); }));
  }
  for (auto& fu : futs) fu.get();
}

/// Runs f(i) for i in [0, n) across threads.
template <class F>
void parallel_for_index(std::int64_t n, F&& f, unsigned threads = 0) {
  parallel_chunks(
      n,
      [&f](std::int64_t lo, std::int64_t hi) {
        for (std::int64_t i = lo; i < hi; ++i) f(i);
      },
      threads);
}

}  // namespace thinsets
