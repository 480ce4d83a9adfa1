// Benchmark comparing the serial reference path of each data-parallel kernel
// against the OpenMP path: operator assembly, periodic-correction blocks and
// batched field evaluation.

#include <chrono>
#include <cstdio>
#include <random>
#include <vector>

#include "percond/geometry.hpp"
#include "percond/greens.hpp"
#include "percond/parallel.hpp"
#include "percond/potentials.hpp"

using namespace percond;

namespace {

template <typename F>
double time_ms(F&& fn, int reps = 3) {
    double best = 1e300;
    for (int r = 0; r < reps; ++r) {
        const auto t0 = std::chrono::steady_clock::now();
        fn();
        const auto t1 = std::chrono::steady_clock::now();
        best = std::min(best, std::chrono::duration<double, std::milli>(t1 - t0).count());
    }
    return best;
}

void report(const char* name, double serial_ms, double parallel_ms) {
    std::printf("%-28s serial %9.2f ms   openmp %9.2f ms   speedup %5.2fx\n", name,
                serial_ms, parallel_ms, serial_ms / parallel_ms);
}

} // namespace

int main(int argc, char** argv) {
    std::size_t N = 512;
    int jobs = 0;
    for (int i = 1; i < argc; ++i) {
        const std::string a = argv[i];
        if (a == "--n" && i + 1 < argc) N = static_cast<std::size_t>(std::atoll(argv[++i]));
        if (a == "--jobs" && i + 1 < argc) jobs = std::atoi(argv[++i]);
    }
    init_jobs_from_env();
    if (jobs > 0) set_jobs(jobs);

    const BoundaryGeometry g = make_smooth_star(1.0, 0.3, 3, N);
    const PeriodicCell cell = make_cell({1.0, 1.0});
    const GreensEvaluator ev(cell, 1e-13);

    std::printf("percond kernel benchmark, N = %zu\n", N);

    report("assemble_V",
           time_ms([&] { assemble_V(g, RunMode::Serial); }),
           time_ms([&] { assemble_V(g, RunMode::Parallel); }));
    report("assemble_W",
           time_ms([&] { assemble_W(g, RunMode::Serial); }),
           time_ms([&] { assemble_W(g, RunMode::Parallel); }));
    report("assemble_R_blocks",
           time_ms([&] { assemble_R_blocks(g, 0.2, ev, RunMode::Serial); }),
           time_ms([&] { assemble_R_blocks(g, 0.2, ev, RunMode::Parallel); }));

    // Batched gradient sums over a grid of targets (the volume-check kernel).
    const BoundaryGeometry scaled = scaled_copy(g, {0.5, 0.5}, 0.2);
    std::vector<double> coeffs(N);
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (auto& c : coeffs) c = u(rng);
    const PeriodicLayerSum layer(scaled.nodes, coeffs, ev);
    const int ng = 96;
    auto grid_pass = [&](RunMode mode) {
        return parallel_sum(static_cast<std::size_t>(ng) * ng, [&](std::size_t idx) {
            const int iy = static_cast<int>(idx) / ng;
            const int ix = static_cast<int>(idx) % ng;
            const Vec2 x{(ix + 0.5) / ng, (iy + 0.5) / ng};
            if ((x - Vec2{0.5, 0.5}).norm() < 0.3) return 0.0;
            return layer.gradient(x).x;
        }, mode);
    };
    double sink_serial = 0.0, sink_parallel = 0.0;
    const double t_serial = time_ms([&] { sink_serial = grid_pass(RunMode::Serial); });
    const double t_parallel = time_ms([&] { sink_parallel = grid_pass(RunMode::Parallel); });
    report("batched field gradients", t_serial, t_parallel);
    if (sink_serial != sink_parallel) {
        std::printf("ERROR: serial and openmp reductions disagree (%.17g vs %.17g)\n",
                    sink_serial, sink_parallel);
        return 1;
    }
    std::printf("serial/openmp reductions bitwise identical\n");
    return 0;
}
