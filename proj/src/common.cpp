#include "sisgoal/common.hpp"

#include <cstdlib>

#include <omp.h>

namespace sisgoal {

int worker_count() {
  static const bool initialized = [] {
    if (const char* env = std::getenv("SISGOAL_THREADS")) {
      const int workers = std::atoi(env);
      if (workers > 0) omp_set_num_threads(workers);
    }
    return true;
  }();
  (void)initialized;
  return omp_get_max_threads();
}

void set_worker_count(int workers) {
  if (workers < 1) throw std::invalid_argument("worker count must be positive");
  worker_count();
  omp_set_num_threads(workers);
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
  std::uint64_t z = master + 0x9E3779B97F4A7C15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace sisgoal
