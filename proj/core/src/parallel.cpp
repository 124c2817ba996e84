#include "hgr/parallel.hpp"

#include <cstdlib>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace hgr {
namespace {

int default_threads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

int initial_threads() {
  if (const char* env = std::getenv("THREADS")) {
    try {
      const int n = std::stoi(env);
      if (n > 0) {
#ifdef _OPENMP
        omp_set_num_threads(n);
#endif
        return n;
      }
    } catch (...) {
    }
  }
  return default_threads();
}

int& current() {
  static int threads = initial_threads();
  return threads;
}

}  // namespace

int thread_count() { return current(); }

void set_thread_count(int threads) {
  current() = threads > 0 ? threads : default_threads();
#ifdef _OPENMP
  omp_set_num_threads(current());
#endif
}

}  // namespace hgr
