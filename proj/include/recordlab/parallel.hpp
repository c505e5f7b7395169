#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <type_traits>
#include <vector>

namespace recordlab {

/// Evaluates f(0), ..., f(count-1) on up to `workers` threads and returns the
/// results in index order. Each index is computed independently, so results
/// do not depend on the worker count as long as f(i) is a pure function of i
/// (samplers derive their stream id from i).
template <class F>
auto parallel_map(std::size_t count, unsigned workers, F&& f) {
  using R = std::decay_t<std::invoke_result_t<F&, std::size_t>>;
  std::vector<R> out(count);
  workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(std::max<std::size_t>(count, 1))));
  if (workers == 1) {
    for (std::size_t i = 0; i < count; ++i) out[i] = f(i);
    return out;
  }
  std::exception_ptr error;
  std::mutex error_mutex;
  {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        const std::size_t begin = count * w / workers;
        const std::size_t end = count * (w + 1) / workers;
        try {
          for (std::size_t i = begin; i < end; ++i) out[i] = f(i);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!error) error = std::current_exception();
        }
      });
    }
  }
  if (error) std::rethrow_exception(error);
  return out;
}

/// Default worker count: hardware concurrency, at least one.
inline unsigned default_workers() { return std::max(1u, std::thread::hardware_concurrency()); }

}  // namespace recordlab
