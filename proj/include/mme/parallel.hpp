#pragma once

#include <cstddef>

#if defined(_OPENMP)
#include <omp.h>
#endif

namespace mme {

inline int max_workers() {
#if defined(_OPENMP)
    return omp_get_max_threads();
#else
    return 1;
#endif
}

inline void set_workers(int n) {
#if defined(_OPENMP)
    if (n > 0) omp_set_num_threads(n);
#else
    (void)n;
#endif
}

// Parallel loop over [0, count). Every body must be independent of loop
// order; callers that reduce must collect per-index results and combine
// serially so that parallel and serial runs are bitwise identical.
template <class F>
inline void parallel_for(std::size_t count, F&& body) {
#if defined(_OPENMP)
#pragma omp parallel for schedule(dynamic, 16)
    for (long long i = 0; i < static_cast<long long>(count); ++i) body(static_cast<std::size_t>(i));
#else
    for (std::size_t i = 0; i < count; ++i) body(i);
#endif
}

// Serial reference used by tests and the kernel benchmark.
template <class F>
inline void serial_for(std::size_t count, F&& body) {
    for (std::size_t i = 0; i < count; ++i) body(i);
}

}  // namespace mme
