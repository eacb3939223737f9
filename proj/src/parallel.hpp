#pragma once

#include <cstddef>
#include <exception>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace staircase::detail {

/// Runs body(i) for i in [0, n) on `jobs` threads (0 = runtime default).
/// The exception of the lowest failing index is rethrown after the join, so
/// error reporting does not depend on scheduling.
template <class Body>
void parallel_for(std::size_t n, int jobs, Body&& body) {
  std::vector<std::exception_ptr> errors(n);
#ifdef _OPENMP
  const int threads = jobs > 0 ? jobs : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic, 1) num_threads(threads)
  for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(n); ++i) {
    try {
      body(static_cast<std::size_t>(i));
    } catch (...) {
      errors[static_cast<std::size_t>(i)] = std::current_exception();
    }
  }
#else
  (void)jobs;
  for (std::size_t i = 0; i < n; ++i) {
    try {
      body(i);
    } catch (...) {
      errors[i] = std::current_exception();
    }
  }
#endif
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

}  // namespace staircase::detail
