// Minimal fan-out over independent tasks. Results are written to caller-owned
// slots by index, so any reduction the caller does afterwards runs in index
// order regardless of how many workers took part.
#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace levyq {

inline unsigned default_workers() { return std::max(1u, std::thread::hardware_concurrency()); }

/// Calls fn(i) for i in [0, count) on up to `workers` threads. The first
/// exception thrown by any task is rethrown after all threads join.
template <typename Fn>
void parallel_for(std::size_t count, unsigned workers, Fn&& fn) {
  if (count == 0) return;
  workers = std::max(1u, std::min<unsigned>(workers == 0 ? default_workers() : workers, static_cast<unsigned>(count)));
  if (workers == 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto body = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= count) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
        next.store(count);
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(workers - 1);
  for (unsigned w = 1; w < workers; ++w) pool.emplace_back(body);
  body();
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace levyq
