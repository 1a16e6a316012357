#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace fefp {

/// Static block partition of [0, n) over `workers` threads; f(begin, end, w).
/// The first exception thrown by any worker is rethrown after all join.
template <class F>
void parallel_for(std::size_t n, int workers, F&& f) {
  const auto w = static_cast<std::size_t>(std::max(1, workers));
  if (w == 1 || n < 2) {
    f(std::size_t{0}, n, std::size_t{0});
    return;
  }
  std::vector<std::exception_ptr> errors(w);
  std::vector<std::thread> pool;
  pool.reserve(w);
  for (std::size_t k = 0; k < w; ++k) {
    const std::size_t b = n * k / w, e = n * (k + 1) / w;
    pool.emplace_back([&, b, e, k] {
      try {
        f(b, e, k);
      } catch (...) {
        errors[k] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& err : errors)
    if (err) std::rethrow_exception(err);
}

}  // namespace fefp
