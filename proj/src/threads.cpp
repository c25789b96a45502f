#include "fockforge/threads.hpp"

#include <cstdlib>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace fockforge {

int resolve_threads(int requested) {
#ifdef _OPENMP
    if (requested > 0) return requested;
    if (const char* env = std::getenv("FOCKFORGE_THREADS")) {
        try {
            int n = std::stoi(env);
            if (n > 0) return n;
        } catch (...) {
        }
    }
    return omp_get_max_threads();
#else
    (void)requested;
    return 1;
#endif
}

}  // namespace fockforge
