#pragma once

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace depthcraft {

namespace detail {
inline std::atomic<unsigned>& thread_setting() {
  static std::atomic<unsigned> value{0};
  return value;
}
}  // namespace detail

/// Worker count used by parallel loops. 0 means "not set": falls back to
/// DEPTHCRAFT_THREADS, then to the hardware concurrency.
inline unsigned thread_count() {
  unsigned v = detail::thread_setting().load();
  if (v > 0) return v;
  if (const char* env = std::getenv("DEPTHCRAFT_THREADS")) {
    try {
      int parsed = std::stoi(env);
      if (parsed > 0) return static_cast<unsigned>(parsed);
    } catch (...) {
    }
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

inline void set_thread_count(unsigned n) { detail::thread_setting().store(n); }

/// Runs body(i) for i in [0, n). Iterations must be independent; the result
/// never depends on the number of workers.
template <typename Body>
void parallel_for(std::size_t n, Body&& body) {
  unsigned workers = std::min<std::size_t>(thread_count(), n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto run = [&] {
    for (;;) {
      std::size_t i = next.fetch_add(1);
      if (i >= n) return;
      try {
        body(i);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next.store(n);
        return;
      }
    }
  };
  std::vector<std::jthread> pool;
  pool.reserve(workers - 1);
  for (unsigned w = 1; w < workers; ++w) pool.emplace_back(run);
  run();
  pool.clear();
  if (failure) std::rethrow_exception(failure);
}

}  // namespace depthcraft
