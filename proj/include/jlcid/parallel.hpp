#pragma once

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace jlcid {

// Default worker count: JLCID_WORKERS env var, else hardware concurrency.
inline int default_workers() {
  if (const char* env = std::getenv("JLCID_WORKERS")) {
    int n = std::atoi(env);
    if (n > 0) return n;
  }
  unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? static_cast<int>(hw) : 1;
}

namespace detail {
inline thread_local bool inside_worker = false;
}

// Runs fn(i) for i in [0, n). Work items must be independent; callers are
// responsible for reducing results in a fixed order so that output does not
// depend on the worker count. Nested calls run sequentially.
inline void parallel_for(int n, const std::function<void(int)>& fn, int workers = 0) {
  if (workers <= 0) workers = default_workers();
  workers = std::min(workers, n);
  if (n <= 0) return;
  if (workers <= 1 || detail::inside_worker) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr err;
  std::mutex err_mu;
  auto body = [&]() {
    detail::inside_worker = true;
    for (;;) {
      int i = next.fetch_add(1);
      if (i >= n) break;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lk(err_mu);
        if (!err) err = std::current_exception();
        break;
      }
    }
    detail::inside_worker = false;
  };
  std::vector<std::thread> pool;
  pool.reserve(workers - 1);
  for (int w = 1; w < workers; ++w) pool.emplace_back(body);
  body();
  for (auto& t : pool) t.join();
  if (err) std::rethrow_exception(err);
}

}  // namespace jlcid
