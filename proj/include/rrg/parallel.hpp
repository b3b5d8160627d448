#pragma once

// Replica-parallel map over a bounded worker pool. Results are stored by
// replica index, so merges downstream see the same order for any worker count.

#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace rrg {

/// RRG_THREADS if set and positive, else the available parallelism.
inline unsigned worker_count() {
  if (const char* env = std::getenv("RRG_THREADS")) {
    try {
      const long v = std::stol(env);
      if (v > 0) return static_cast<unsigned>(v);
    } catch (const std::exception&) {
    }
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw ? hw : 1;
}

/// out[r] = f(r) for r in [0, count).
template <typename T, typename F>
std::vector<T> parallel_map(std::size_t count, F&& f, unsigned workers = worker_count()) {
  std::vector<T> out(count);
  if (workers <= 1 || count <= 1) {
    for (std::size_t r = 0; r < count; ++r) out[r] = f(r);
    return out;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto work = [&] {
    for (;;) {
      const std::size_t r = next.fetch_add(1);
      if (r >= count) return;
      try {
        out[r] = f(r);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
        next = count;
      }
    }
  };
  std::vector<std::thread> pool;
  for (unsigned i = 0; i < std::min<std::size_t>(workers, count); ++i) pool.emplace_back(work);
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
  return out;
}

}  // namespace rrg
