#pragma once

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace splitrt {

// Worker count: the THREADS environment variable when set, else the hardware
// concurrency.
inline int worker_count() {
  auto hw = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  if (auto* env = std::getenv("THREADS")) {
    try {
      auto n = std::stoi(env);
      if (n >= 1) return n;
    } catch (...) {
    }
  }
  return hw;
}

// Runs func(i) for i in [0, count) on a pool of workers. Each index runs
// exactly once; the first exception is rethrown after all workers stop.
template <typename Func>
void parallel_for(std::size_t count, Func&& func) {
  auto workers = std::min<std::size_t>(static_cast<std::size_t>(worker_count()), count);
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; i++) func(i);
    return;
  }
  auto next  = std::atomic<std::size_t>{0};
  auto error = std::exception_ptr{};
  auto mutex = std::mutex{};
  auto pool  = std::vector<std::thread>{};
  for (std::size_t w = 0; w < workers; w++)
    pool.emplace_back([&] {
      while (true) {
        auto i = next.fetch_add(1);
        if (i >= count) break;
        try {
          func(i);
        } catch (...) {
          auto lock = std::lock_guard{mutex};
          if (!error) error = std::current_exception();
          next = count;
        }
      }
    });
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace splitrt
