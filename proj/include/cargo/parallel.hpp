#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace cargo {

/// Runs fn(0) .. fn(count-1) on up to `jobs` threads, index i on worker i % jobs.
/// The exception from the lowest failing index is rethrown after all workers join.
template <class Fn>
void parallel_for(std::size_t count, int jobs, Fn&& fn) {
  const auto workers = std::min(static_cast<std::size_t>(std::max(1, jobs)), count);
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::mutex mutex;
  std::exception_ptr error;
  std::size_t error_index = count;
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      for (std::size_t i = w; i < count; i += workers) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(mutex);
          if (i < error_index) {
            error_index = i;
            error = std::current_exception();
          }
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace cargo
