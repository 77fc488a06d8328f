#pragma once

#include <atomic>
#include <cstddef>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace roughkit {

// Worker count: set_threads() if called with n > 0, else ROUGHKIT_THREADS, else the hardware.
int thread_count();
void set_threads(int n);

/// Runs fn(i) for i in [0, n) on up to thread_count() workers. Each index is
/// handled exactly once; the first exception (by index) is rethrown.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

template <class T, class F>
std::vector<T> parallel_map(std::size_t n, F&& fn) {
  std::vector<T> out(n);
  parallel_for(n, [&](std::size_t i) { out[i] = fn(i); });
  return out;
}

}  // namespace roughkit
