#pragma once

#include <cstddef>
#include <exception>
#include <mutex>

#include <omp.h>

namespace shellspec {

/// Thread budget for every parallel kernel. Initialized from SHELLSPEC_THREADS
/// (falls back to the OpenMP default); 1 forces serial execution.
int thread_budget();
void set_thread_budget(int threads);

/// Parallel loop over [0, n) that carries the first exception out of the
/// OpenMP region. Iterations must not share mutable state.
template <typename Fn>
void parallel_for(std::size_t n, Fn&& fn) {
  std::exception_ptr failure;
  std::mutex guard;
  const long long count = static_cast<long long>(n);
#pragma omp parallel for schedule(dynamic, 1) num_threads(thread_budget())
  for (long long i = 0; i < count; ++i) {
    try {
      fn(static_cast<std::size_t>(i));
    } catch (...) {
      std::lock_guard<std::mutex> lock(guard);
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
}

/// Same contract, static schedule: used by fine-grained kernels where the
/// per-iteration cost is uniform.
template <typename Fn>
void parallel_for_static(std::size_t n, Fn&& fn) {
  std::exception_ptr failure;
  std::mutex guard;
  const long long count = static_cast<long long>(n);
#pragma omp parallel for schedule(static) num_threads(thread_budget())
  for (long long i = 0; i < count; ++i) {
    try {
      fn(static_cast<std::size_t>(i));
    } catch (...) {
      std::lock_guard<std::mutex> lock(guard);
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
}

}  // namespace shellspec
