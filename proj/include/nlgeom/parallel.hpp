#pragma once

#include <cstddef>
#include <exception>
#include <mutex>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace nlgeom {

/// Execution policy for the task kernels. Both paths run the same task body
/// and merge results in index order, so they are bit-identical.
enum class Exec { Serial, Parallel };

template <class Fn>
void forEachTask(std::size_t count, Exec exec, Fn&& fn) {
  if (exec == Exec::Serial || count < 2) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  // Exceptions cannot leave an OpenMP region; the one from the lowest task index is rethrown.
  const auto n = static_cast<long long>(count);
  std::exception_ptr error;
  std::size_t errorIndex = count;
  std::mutex m;
#pragma omp parallel for schedule(dynamic)
  for (long long i = 0; i < n; ++i) {
    try {
      fn(static_cast<std::size_t>(i));
    } catch (...) {
      std::lock_guard<std::mutex> lock(m);
      if (static_cast<std::size_t>(i) < errorIndex) {
        errorIndex = static_cast<std::size_t>(i);
        error = std::current_exception();
      }
    }
  }
  if (error) std::rethrow_exception(error);
}

inline void setWorkerCount(int workers) {
#ifdef _OPENMP
  if (workers > 0) omp_set_num_threads(workers);
#else
  (void)workers;
#endif
}

inline int workerCount() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

}  // namespace nlgeom
