#pragma once

#include <atomic>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace pcnet {

// Runs fn(0..n_jobs-1) over a pool of workers. Jobs must write only to
// their own output slots; the first exception is rethrown after all
// threads join. workers <= 1 runs inline.
inline void parallel_for(int n_jobs, int workers,
                         const std::function<void(int)>& fn) {
  if (n_jobs <= 0) return;
  if (workers <= 1 || n_jobs == 1) {
    for (int i = 0; i < n_jobs; ++i) fn(i);
    return;
  }
  int n_threads = std::min(workers, n_jobs);
  std::atomic<int> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  auto worker = [&] {
    while (!failed.load(std::memory_order_relaxed)) {
      int i = next.fetch_add(1, std::memory_order_relaxed);
      if (i >= n_jobs) break;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
        failed.store(true, std::memory_order_relaxed);
      }
    }
  };
  std::vector<std::thread> threads;
  threads.reserve(static_cast<std::size_t>(n_threads));
  for (int t = 0; t < n_threads; ++t) threads.emplace_back(worker);
  for (auto& t : threads) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace pcnet
