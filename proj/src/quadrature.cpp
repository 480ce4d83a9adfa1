#include "percond/quadrature.hpp"

#include <cmath>
#include <numbers>

#include "percond/errors.hpp"

namespace percond {

std::pair<std::vector<double>, std::vector<double>> gauss_legendre_01(int n) {
    if (n < 1) throw config_error("gauss_legendre_01: n must be >= 1");
    std::vector<double> x(static_cast<std::size_t>(n)), w(static_cast<std::size_t>(n));
    const int m = (n + 1) / 2;
    for (int i = 0; i < m; ++i) {
        // Newton iteration from the Chebyshev-based initial guess.
        double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = 0.0;
            for (int k = 0; k < n; ++k) {
                const double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * k + 1.0) * z * p1 - k * p2) / (k + 1.0);
            }
            pp = n * (z * p0 - p1) / (z * z - 1.0);
            const double dz = p0 / pp;
            z -= dz;
            if (std::abs(dz) < 1e-15) break;
        }
        const std::size_t lo = static_cast<std::size_t>(i);
        const std::size_t hi = static_cast<std::size_t>(n - 1 - i);
        x[lo] = 0.5 * (1.0 - z);
        x[hi] = 0.5 * (1.0 + z);
        w[lo] = w[hi] = 1.0 / ((1.0 - z * z) * pp * pp);
    }
    return {x, w};
}

} // namespace percond
