#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <thread>
#include <type_traits>
#include <vector>

#include "gfusion/tolerances.hpp"

namespace gfusion {

/// out[i] = fn(i) for i in [0, count). With exec.parallel the indices are
/// split into contiguous chunks over hardware threads; the output order is
/// always the index order.
template <typename Fn>
auto map_atoms(std::size_t count, const Execution& exec, Fn&& fn)
    -> std::vector<std::decay_t<std::invoke_result_t<Fn&, std::size_t>>> {
  using T = std::decay_t<std::invoke_result_t<Fn&, std::size_t>>;
  std::vector<T> out(count);
  const std::size_t workers =
      exec.parallel ? std::min<std::size_t>(count, std::max(1u, std::thread::hardware_concurrency()))
                    : 1;
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) out[i] = fn(i);
    return out;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(workers);
  pool.reserve(workers);
  const std::size_t chunk = (count + workers - 1) / workers;
  for (std::size_t w = 0; w < workers; ++w) {
    const std::size_t lo = w * chunk;
    const std::size_t hi = std::min(count, lo + chunk);
    if (lo >= hi) break;
    pool.emplace_back([&, lo, hi, w] {
      try {
        for (std::size_t i = lo; i < hi; ++i) out[i] = fn(i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return out;
}

}  // namespace gfusion
