#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace stratshap {

// Runs fn(i) for i in [0, n) on up to `threads` workers with static
// contiguous chunks. Callers write results into slot i, so output never
// depends on the worker count. If any call throws, the exception from the
// smallest failing index is rethrown after all workers join.
template <typename Fn>
void parallel_for(std::size_t n, int threads, Fn&& fn) {
  const std::size_t workers =
      std::min<std::size_t>(n, static_cast<std::size_t>(std::max(threads, 1)));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::exception_ptr> errors(workers);
  std::vector<std::size_t> failed_at(workers, n);
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    const std::size_t begin = n * w / workers;
    const std::size_t end = n * (w + 1) / workers;
    pool.emplace_back([&, w, begin, end] {
      for (std::size_t i = begin; i < end; ++i) {
        try {
          fn(i);
        } catch (...) {
          errors[w] = std::current_exception();
          failed_at[w] = i;
          return;
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  auto first = std::min_element(failed_at.begin(), failed_at.end());
  if (*first < n) std::rethrow_exception(errors[first - failed_at.begin()]);
}

inline int hardware_threads() {
  return std::max(1u, std::thread::hardware_concurrency());
}

}  // namespace stratshap
