#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <functional>
#include <mutex>
#include <span>
#include <thread>
#include <vector>

namespace oeprop {

/// Number of worker threads used by library-level parallel maps. 0 means
/// hardware concurrency. Results never depend on this value.
struct Parallelism {
  unsigned threads = 1;

  unsigned resolved() const {
    if (threads != 0) return threads;
    return std::max(1u, std::thread::hardware_concurrency());
  }
};

/// Calls fn(i) for i in [0, n) using static contiguous chunks. The first
/// exception thrown (lowest chunk index) is rethrown on the calling thread.
template <class Fn>
void parallel_for(std::size_t n, Parallelism par, Fn&& fn) {
  const std::size_t workers = std::min<std::size_t>(par.resolved(), n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::exception_ptr> errors(workers);
  {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
      const std::size_t begin = n * w / workers;
      const std::size_t end = n * (w + 1) / workers;
      pool.emplace_back([&, w, begin, end] {
        try {
          for (std::size_t i = begin; i < end; ++i) fn(i);
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
    }
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

template <class T, class Fn>
std::vector<T> parallel_map(std::size_t n, Parallelism par, Fn&& fn) {
  std::vector<T> out(n);
  parallel_for(n, par, [&](std::size_t i) { out[i] = fn(i); });
  return out;
}

/// Pairwise (cascade) summation; order is fixed by the input order only.
inline double pairwise_sum(std::span<const double> v) {
  if (v.size() <= 8) {
    double s = 0.0;
    for (double x : v) s += x;
    return s;
  }
  const std::size_t half = v.size() / 2;
  return pairwise_sum(v.first(half)) + pairwise_sum(v.subspan(half));
}

}  // namespace oeprop
