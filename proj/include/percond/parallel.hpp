#pragma once

#include <cstddef>
#include <type_traits>
#include <vector>

namespace percond {

/// Execution mode for the data-parallel kernels. Every kernel has a serial
/// path that is the reference implementation; the OpenMP path must produce
/// bit-identical results (fixed chunking, ordered combination).
enum class RunMode { Serial, Parallel };

/// Global default mode/thread count. `jobs <= 0` keeps the OpenMP runtime
/// default. `jobs == 1` selects the serial path.
void set_jobs(int jobs);
int jobs();
RunMode default_mode();

/// Reads PERCOND_JOBS from the environment (if set) and applies it.
/// Returns the resulting job count.
int init_jobs_from_env();

namespace detail {
void parallel_for_impl(std::size_t n, void* ctx, void (*body)(void*, std::size_t),
                       RunMode mode);
}

/// Runs body(i) for i in [0, n). Iterations must be independent.
template <typename F>
void parallel_for(std::size_t n, F&& body, RunMode mode = default_mode()) {
    using Fn = std::remove_reference_t<F>;
    auto thunk = [](void* ctx, std::size_t i) { (*static_cast<Fn*>(ctx))(i); };
    detail::parallel_for_impl(n, const_cast<void*>(static_cast<const void*>(&body)),
                              thunk, mode);
}

/// Deterministic sum reduction: the index range is split into fixed-size
/// chunks, each chunk is accumulated sequentially, and the per-chunk partial
/// sums are combined in index order. The result does not depend on the
/// thread count, so Serial and Parallel agree bitwise.
template <typename F>
double parallel_sum(std::size_t n, F&& term, RunMode mode = default_mode(),
                    std::size_t chunk = 64) {
    if (n == 0) return 0.0;
    const std::size_t nchunks = (n + chunk - 1) / chunk;
    std::vector<double> partial(nchunks, 0.0);
    auto body = [&](std::size_t c) {
        const std::size_t lo = c * chunk;
        const std::size_t hi = lo + chunk < n ? lo + chunk : n;
        double s = 0.0;
        for (std::size_t i = lo; i < hi; ++i) s += term(i);
        partial[c] = s;
    };
    parallel_for(nchunks, body, mode);
    double total = 0.0;
    for (double s : partial) total += s;
    return total;
}

} // namespace percond
