#pragma once

#include <cstdint>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace spinqec {

// Execution policy for the data-parallel kernels. Every parallel kernel has a
// serial twin (Exec::seq) that runs the exact same per-element code, so the
// two policies produce bit-identical results.
enum class Exec { seq, par };

inline int max_threads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

// Maps body(i) over i in [0, n). Elements must be independent; any reduction
// belongs in a serial pass over the filled buffer.
template <typename F>
void parallel_for(std::int64_t n, Exec exec, F&& body) {
#ifdef _OPENMP
  if (exec == Exec::par) {
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < n; ++i) body(i);
    return;
  }
#else
  (void)exec;
#endif
  for (std::int64_t i = 0; i < n; ++i) body(i);
}

}  // namespace spinqec
