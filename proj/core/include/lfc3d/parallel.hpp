#pragma once

#include <cstddef>
#include <exception>
#include <span>

namespace lfc3d {

/// Sets the worker count used by library loops; 0 keeps the runtime default.
void set_thread_count(int threads);
int thread_count();

/// Runs fn(i) for i in [0, n). Results must be written by index; the first
/// exception thrown by any iteration is rethrown after the loop.
template <class Fn>
void parallel_for(std::ptrdiff_t n, Fn&& fn) {
  std::exception_ptr error;
#if defined(_OPENMP)
#pragma omp parallel for schedule(dynamic, 8)
#endif
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    try {
      fn(i);
    } catch (...) {
#if defined(_OPENMP)
#pragma omp critical(lfc3d_parallel_error)
#endif
      {
        if (!error) error = std::current_exception();
      }
    }
  }
  if (error) std::rethrow_exception(error);
}

/// Pairwise summation; the result depends only on the order of `values`.
double pairwise_sum(std::span<const double> values);

}  // namespace lfc3d
