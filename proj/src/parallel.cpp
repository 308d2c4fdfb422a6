#include "atoss/parallel.hpp"

#include <atomic>
#include <cstdlib>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace atoss::par {

namespace {

int default_threads() {
#ifdef _OPENMP
  if (const char* env = std::getenv("ATOSS_THREADS")) {
    int v = std::atoi(env);
    if (v > 0) return v;
  }
  return omp_get_max_threads();
#else
  return 1;
#endif
}

std::atomic<int> g_threads{0};

}  // namespace

void set_threads(int n) { g_threads.store(n > 0 ? n : 0); }

int threads() {
  int v = g_threads.load();
  return v > 0 ? v : default_threads();
}

namespace detail {
bool use_parallel() { return threads() > 1; }
}  // namespace detail

}  // namespace atoss::par
