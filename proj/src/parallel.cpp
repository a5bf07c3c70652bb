#include "gibbslab/parallel.hpp"

#include <omp.h>

#include <algorithm>
#include <cstdlib>
#include <string>

namespace gibbslab {

int configure_threads_from_env() {
  if (const char* env = std::getenv("LAB_THREADS")) {
    try {
      const int cap = std::stoi(env);
      if (cap >= 1) omp_set_num_threads(std::min(cap, omp_get_max_threads()));
    } catch (const std::exception&) {
      // ignore malformed values; the runtime default stays in place
    }
  }
  return omp_get_max_threads();
}

int max_threads() { return omp_get_max_threads(); }

void set_threads(int n) { omp_set_num_threads(std::max(1, n)); }

ThreadLimit::ThreadLimit(int n) : previous_(omp_get_max_threads()) { set_threads(n); }

ThreadLimit::~ThreadLimit() { omp_set_num_threads(previous_); }

}  // namespace gibbslab
