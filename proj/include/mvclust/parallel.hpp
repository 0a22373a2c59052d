// Deterministic data parallelism. Work is cut into fixed-size blocks that do
// not depend on the thread count; block results are combined in block order,
// so serial and parallel runs produce bit-identical output.
#pragma once

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdint>
#include <thread>
#include <vector>

namespace mvc {

namespace detail {

inline int& max_threads_slot() {
  static int value = 1;
  return value;
}

// Fixed block size for per-sample loops; independent of the thread count so
// reduction order never changes.
constexpr std::int64_t kSampleBlock = 4096;

inline double elapsed_s(std::chrono::steady_clock::time_point from) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - from)
      .count();
}

}  // namespace detail

inline void set_max_threads(int n) {
  detail::max_threads_slot() = std::max(1, n);
}

inline int max_threads() { return detail::max_threads_slot(); }

// fn(block_index, begin, end) over [0, total) in blocks of block_size.
// fn must not throw and must write only to its own block's slots.
template <typename Fn>
void for_each_block(std::int64_t total, std::int64_t block_size, Fn&& fn) {
  if (total <= 0) return;
  const std::int64_t nblocks = (total + block_size - 1) / block_size;
  const int nthreads =
      static_cast<int>(std::min<std::int64_t>(max_threads(), nblocks));
  if (nthreads <= 1) {
    for (std::int64_t b = 0; b < nblocks; ++b)
      fn(b, b * block_size, std::min(total, (b + 1) * block_size));
    return;
  }
  std::atomic<std::int64_t> next{0};
  auto worker = [&] {
    for (;;) {
      const std::int64_t b = next.fetch_add(1);
      if (b >= nblocks) return;
      fn(b, b * block_size, std::min(total, (b + 1) * block_size));
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(nthreads - 1);
  for (int t = 0; t < nthreads - 1; ++t) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
}

// Blockwise sum of fn(begin, end); partials are added in block order.
template <typename Fn>
double blockwise_sum(std::int64_t total, std::int64_t block_size, Fn&& fn) {
  if (total <= 0) return 0.0;
  const std::int64_t nblocks = (total + block_size - 1) / block_size;
  std::vector<double> partial(static_cast<std::size_t>(nblocks), 0.0);
  for_each_block(total, block_size,
                 [&](std::int64_t b, std::int64_t lo, std::int64_t hi) {
                   partial[static_cast<std::size_t>(b)] = fn(lo, hi);
                 });
  double sum = 0.0;
  for (double p : partial) sum += p;
  return sum;
}

}  // namespace mvc
