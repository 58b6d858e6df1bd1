#include "mrlr/parallel.hpp"

#include "mrlr/error.hpp"

#include <Eigen/Core>

#include <cstdlib>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace mrlr {

int configure_threads() {
  Eigen::setNbThreads(1);
  if (const char *env = std::getenv("MRLR_NUM_THREADS"); env && *env) {
    int n = 0;
    try {
      n = std::stoi(env);
    } catch (const std::exception &) {
      throw ParameterError(std::string("MRLR_NUM_THREADS is not an integer: ") + env);
    }
    if (n < 1)
      throw ParameterError("MRLR_NUM_THREADS must be at least 1");
#ifdef _OPENMP
    omp_set_num_threads(n);
#endif
  }
  return max_threads();
}

int max_threads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

} // namespace mrlr
