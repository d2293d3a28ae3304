#pragma once

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

#include "types.hpp"

namespace klproj {

/// Worker count: explicit argument wins, then KLPROJ_WORKERS, then hardware.
inline int resolve_workers(int requested = 0) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("KLPROJ_WORKERS")) {
    const int v = std::atoi(env);
    if (v > 0) return v;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? static_cast<int>(hw) : 1;
}

/// Runs body(i) for i in [0, count).  Each index must write only its own
/// output slot, so results match the sequential order regardless of worker
/// count.  The first exception is rethrown on the calling thread.
template <class Body>
void parallel_for(Index count, int workers, Body&& body) {
  workers = resolve_workers(workers);
  if (workers <= 1 || count <= 1) {
    for (Index i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<Index> next(0);
  std::exception_ptr first_error;
  std::mutex error_mutex;
  std::atomic<bool> failed(false);
  auto run = [&]() {
    while (!failed.load(std::memory_order_relaxed)) {
      const Index i = next.fetch_add(1);
      if (i >= count) break;
      try {
        body(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
        failed.store(true, std::memory_order_relaxed);
      }
    }
  };
  std::vector<std::thread> pool;
  const int spawn = static_cast<int>(std::min<Index>(workers, count));
  pool.reserve(static_cast<std::size_t>(spawn));
  for (int t = 0; t < spawn; ++t) pool.emplace_back(run);
  for (std::thread& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace klproj
