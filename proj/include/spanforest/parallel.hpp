#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace spanforest {

/// Worker count: SPANFOREST_THREADS when set to a positive integer, otherwise
/// the hardware concurrency.
inline std::size_t worker_count() {
  if (const char* env = std::getenv("SPANFOREST_THREADS"); env != nullptr) {
    try {
      const auto n = std::stoul(env);
      if (n > 0) return n;
    } catch (const std::exception&) {
    }
  }
  return std::max<std::size_t>(1, std::thread::hardware_concurrency());
}

/// Runs body(i) for i in [0, count). Each index writes only its own output
/// slot, so results are independent of scheduling. The first exception is
/// rethrown after all workers stop.
template <typename Body>
void parallel_for(std::size_t count, Body&& body) {
  const auto workers = std::min(worker_count(), count);
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < count; i = next++) {
          try {
            body(i);
          } catch (...) {
            std::lock_guard lock(failure_mutex);
            if (!failure) failure = std::current_exception();
            next = count;
          }
        }
      });
    }
  }
  if (failure) std::rethrow_exception(failure);
}

}  // namespace spanforest
