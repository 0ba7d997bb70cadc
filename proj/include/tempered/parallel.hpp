#pragma once

// Job control for the OpenMP kernels.  Every parallel kernel in the project
// has a serial reference path; parallel_for with jobs() == 1 runs the exact
// same loop body sequentially, and the test suite compares the two.

#include <cstdlib>
#include <functional>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace tempered {

// process-wide worker count, default 1 (serial); set from --jobs in the CLI
int jobs();
void set_jobs(int n);

template <typename Fn>
void parallel_for(int count, Fn&& body) {
  if (jobs() <= 1 || count <= 1) {
    for (int i = 0; i < count; i++) body(i);
    return;
  }
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic) num_threads(jobs())
  for (int i = 0; i < count; i++) body(i);
#else
  for (int i = 0; i < count; i++) body(i);
#endif
}

}  // namespace tempered
