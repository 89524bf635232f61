#pragma once

#include <cstdint>
#include <exception>
#include <utility>

#include <omp.h>

namespace projlab {

/// Serial reference loop. Kept alongside the OpenMP path so tests and the
/// benchmark can compare the two on identical workloads.
template <class Fn>
void serial_for(std::int64_t n, Fn&& fn) {
  for (std::int64_t i = 0; i < n; ++i) fn(i);
}

/// OpenMP loop over independent cells. jobs <= 0 uses all hardware threads;
/// jobs == 1 falls back to the serial reference. The first exception thrown
/// by a cell is rethrown after the loop completes.
template <class Fn>
void parallel_for(std::int64_t n, int jobs, Fn&& fn) {
  if (jobs == 1) {
    serial_for(n, std::forward<Fn>(fn));
    return;
  }
  const int threads = jobs <= 0 ? omp_get_max_threads() : jobs;
  std::exception_ptr first_error = nullptr;

#pragma omp parallel for schedule(dynamic) num_threads(threads)
  for (std::int64_t i = 0; i < n; ++i) {
    try {
      fn(i);
    } catch (...) {
#pragma omp critical(projlab_parallel_for_error)
      if (!first_error) first_error = std::current_exception();
    }
  }
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace projlab
