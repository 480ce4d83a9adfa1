#include "percond/parallel.hpp"

#include <atomic>
#include <cstdlib>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace percond {

namespace {
std::atomic<int> g_jobs{0}; // 0 = runtime default, 1 = serial, >1 = thread count
}

void set_jobs(int j) {
    g_jobs.store(j);
#ifdef _OPENMP
    if (j > 1) omp_set_num_threads(j);
#endif
}

int jobs() { return g_jobs.load(); }

RunMode default_mode() {
#ifdef _OPENMP
    return g_jobs.load() == 1 ? RunMode::Serial : RunMode::Parallel;
#else
    return RunMode::Serial;
#endif
}

int init_jobs_from_env() {
    if (const char* env = std::getenv("PERCOND_JOBS")) {
        try {
            set_jobs(std::stoi(env));
        } catch (...) {
            // ignore malformed values, keep default
        }
    }
    return jobs();
}

namespace detail {

void parallel_for_impl(std::size_t n, void* ctx, void (*body)(void*, std::size_t),
                       RunMode mode) {
#ifdef _OPENMP
    if (mode == RunMode::Parallel && n > 1) {
#pragma omp parallel for schedule(static)
        for (long long i = 0; i < static_cast<long long>(n); ++i)
            body(ctx, static_cast<std::size_t>(i));
        return;
    }
#else
    (void)mode;
#endif
    for (std::size_t i = 0; i < n; ++i) body(ctx, i);
}

} // namespace detail
} // namespace percond
