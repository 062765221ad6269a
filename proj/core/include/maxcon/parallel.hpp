#pragma once

#include <atomic>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace maxcon {

// Runs fn(0..jobs-1) across a small thread pool. Callers keep determinism by
// writing results into per-index slots and reducing in index order afterwards.
// The first exception thrown by any job is rethrown after all threads join.
inline void parallel_for(int jobs, const std::function<void(int)>& fn) {
  if (jobs <= 0) return;
  const unsigned hw = std::thread::hardware_concurrency();
  const int workers = std::min(jobs, static_cast<int>(hw > 0 ? hw : 1));
  if (workers <= 1) {
    for (int i = 0; i < jobs; ++i) fn(i);
    return;
  }

  std::atomic<int> next{0};
  std::mutex error_mutex;
  std::exception_ptr error;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      while (true) {
        const int i = next.fetch_add(1);
        if (i >= jobs) return;
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!error) error = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace maxcon
