#pragma once

#include <exception>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace fockforge {

/// Worker count for parallel kernels: requested > 0 wins, otherwise the
/// FOCKFORGE_THREADS environment variable, otherwise all hardware threads.
/// Returns 1 when built without OpenMP.
int resolve_threads(int requested = 0);

/// Dynamic-schedule parallel loop over [0, n) writing into per-index slots.
/// threads == 1 runs the plain serial loop. Exceptions thrown by the body are
/// captured and rethrown after the region ends (an exception escaping an OpenMP
/// region would terminate the process).
template <typename Body>
void parallel_for_indexed(long n, int threads, Body&& body) {
    if (threads == 1) {
        for (long i = 0; i < n; ++i) body(i);
        return;
    }
#ifdef _OPENMP
    std::exception_ptr error;
#pragma omp parallel for schedule(dynamic) num_threads(resolve_threads(threads))
    for (long i = 0; i < n; ++i) {
        try {
            body(i);
        } catch (...) {
#pragma omp critical(fockforge_parallel_error)
            if (!error) error = std::current_exception();
        }
    }
    if (error) std::rethrow_exception(error);
#else
    for (long i = 0; i < n; ++i) body(i);
#endif
}

}  // namespace fockforge
