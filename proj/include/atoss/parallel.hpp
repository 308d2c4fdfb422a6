// Data-parallel loop helpers. Each index writes only its own outputs, so
// results are byte-identical regardless of thread count; reductions are done
// serially in index order by the callers. Thread count is process-global and
// settable at runtime (0 = library default).
#pragma once

#include <cstddef>

namespace atoss::par {

void set_threads(int n);
int threads();

// Invokes fn(i) for i in [0, n). Parallel when OpenMP is available and more
// than one thread is configured; plain loop otherwise.
template <typename F>
void parallel_for(size_t n, F&& fn);

namespace detail {
bool use_parallel();
}

}  // namespace atoss::par

#ifdef _OPENMP
#include <omp.h>
#endif

namespace atoss::par {

template <typename F>
void parallel_for(size_t n, F&& fn) {
#ifdef _OPENMP
  if (detail::use_parallel() && n > 1) {
    const long long nn = static_cast<long long>(n);
#pragma omp parallel for schedule(static) num_threads(threads())
    for (long long i = 0; i < nn; ++i) {
      fn(static_cast<size_t>(i));
    }
    return;
  }
#endif
  for (size_t i = 0; i < n; ++i) fn(i);
}

}  // namespace atoss::par
