#include "hhc/parallel.hpp"

#include <cstdlib>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace hhc {

static int env_thread_cap() {
  const char* s = std::getenv("HHC_THREADS");
  if (!s) return 0;
  int n = std::atoi(s);
  return n > 0 ? n : 0;
}

int thread_count() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

void apply_thread_cap() {
#ifdef _OPENMP
  if (int cap = env_thread_cap(); cap > 0) omp_set_num_threads(cap);
#endif
}

}  // namespace hhc
