// rp-lab: deterministic cell-parallel execution.
//
// Work is expressed as a fixed table of independent cells indexed 0..n-1; each
// cell derives its own RNG stream from (master seed, cell indices) and writes
// into its own result slot.  Scheduling therefore never influences numerics:
// 1 worker and N workers produce bit-identical tables.
#pragma once

#include <atomic>
#include <cstddef>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace rplab {

inline void parallel_cells(std::size_t n_cells, int workers,
                           const std::function<void(std::size_t)>& body) {
  if (workers < 1) workers = 1;
  if (workers == 1 || n_cells <= 1) {
    for (std::size_t i = 0; i < n_cells; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto drain = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= n_cells) return;
      try {
        body(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  const int spawn = static_cast<int>(
      std::min<std::size_t>(static_cast<std::size_t>(workers), n_cells));
  pool.reserve(spawn);
  for (int w = 0; w < spawn; ++w) pool.emplace_back(drain);
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace rplab
