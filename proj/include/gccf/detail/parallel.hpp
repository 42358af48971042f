#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace gccf {

/// Worker-count cap for the parallel paths. Results never depend on it.
struct ExecPolicy {
  unsigned threads = 1;
};

namespace detail {

// Runs body(i) for i in [0, count). Worker w takes i = w, w + W, ... so
// each task index is processed exactly once; callers write results into
// per-index slots and reduce them afterwards in index order.
template <typename Body>
void parallel_for(std::size_t count, const ExecPolicy& policy, Body&& body) {
  const std::size_t workers =
      std::min<std::size_t>(std::max(1u, policy.threads), count);
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (std::size_t i = w; i < count; i += workers) body(i);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

}  // namespace detail
}  // namespace gccf
