#pragma once

// Index-keyed work pool. Each task owns its slot in the result vector, so the
// output is a pure function of the inputs no matter how many workers run or
// how they interleave. The first exception cancels remaining work and is
// rethrown once every worker has drained.

#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <utility>
#include <vector>

namespace hawkes {

template <class T, class Fn>
std::vector<T> parallel_map(int count, int workers, Fn&& fn) {
  std::vector<T> out(static_cast<std::size_t>(count));
  if (count <= 0) return out;
  if (workers < 1) workers = 1;
  if (workers == 1) {
    for (int i = 0; i < count; ++i) out[static_cast<std::size_t>(i)] = fn(i);
    return out;
  }

  std::atomic<int> next{0};
  std::mutex gate;
  std::exception_ptr first;
  auto drain = [&] {
    for (;;) {
      int i = next.fetch_add(1, std::memory_order_relaxed);
      if (i >= count) return;
      try {
        out[static_cast<std::size_t>(i)] = fn(i);
      } catch (...) {
        {
          std::lock_guard<std::mutex> lock(gate);
          if (!first) first = std::current_exception();
        }
        next.store(count, std::memory_order_relaxed);
        return;
      }
    }
  };

  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(workers) - 1);
  for (int w = 1; w < workers; ++w) pool.emplace_back(drain);
  drain();
  for (auto& th : pool) th.join();
  if (first) std::rethrow_exception(first);
  return out;
}

}  // namespace hawkes
