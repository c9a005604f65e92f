#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace nntopo {

/// Resolves a requested worker count; 0 means one per hardware thread.
inline std::size_t resolve_threads(std::size_t requested) {
  if (requested > 0) return requested;
  return std::max<std::size_t>(1, std::thread::hardware_concurrency());
}

/// Runs body(task) for every task in [0, tasks) on up to `threads` workers.
/// Tasks are claimed dynamically, so body must only write state owned by
/// its task. The first exception thrown by any task is rethrown here.
template <typename Body>
void parallel_for(std::size_t tasks, std::size_t threads, Body&& body) {
  const std::size_t workers = std::min(resolve_threads(threads), tasks);
  if (workers <= 1) {
    for (std::size_t t = 0; t < tasks; ++t) body(t);
    return;
  }

  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto run = [&] {
    for (;;) {
      const std::size_t t = next.fetch_add(1, std::memory_order_relaxed);
      if (t >= tasks) return;
      try {
        body(t);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next.store(tasks, std::memory_order_relaxed);
        return;
      }
    }
  };

  std::vector<std::thread> pool;
  pool.reserve(workers - 1);
  for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(run);
  run();
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);
}

}  // namespace nntopo
