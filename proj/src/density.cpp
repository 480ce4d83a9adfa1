#include "percond/density.hpp"

#include <cmath>
#include <complex>
#include <numbers>

#include "percond/errors.hpp"

namespace percond {

namespace {
constexpr double kPi = std::numbers::pi;
}

double boundary_integral(const BoundaryGeometry& g, const Eigen::VectorXd& v) {
    double s = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) s += g.weights[i] * v[static_cast<Eigen::Index>(i)];
    return s;
}

double boundary_mean(const BoundaryGeometry& g, const Eigen::VectorXd& v) {
    return boundary_integral(g, v) / g.perimeter;
}

bool is_zero_mean(const BoundaryGeometry& g, const Eigen::VectorXd& v) {
    const double scale = std::max(1.0, v.norm());
    return std::abs(boundary_integral(g, v)) <= 1e-12 * scale * std::max(1.0, g.perimeter);
}

Density project_zero_mean(const BoundaryGeometry& g, const Eigen::VectorXd& v) {
    Density d;
    d.values = v.array() - boundary_mean(g, v);
    d.zero_mean = true;
    return d;
}

double TrigPoly::eval(double t) const {
    double s = c0;
    for (std::size_t k = 0; k < ccos.size(); ++k)
        s += ccos[k] * std::cos(static_cast<double>(k + 1) * t);
    for (std::size_t k = 0; k < csin.size(); ++k)
        s += csin[k] * std::sin(static_cast<double>(k + 1) * t);
    return s;
}

Eigen::VectorXd TrigPoly::sample(const BoundaryGeometry& g) const {
    Eigen::VectorXd v(static_cast<Eigen::Index>(g.size()));
    for (std::size_t i = 0; i < g.size(); ++i)
        v[static_cast<Eigen::Index>(i)] = eval(g.params[i]);
    return v;
}

namespace {

/// Forward DFT coefficients c_m = (1/N) sum_j v_j exp(-i m t_j), m = 0..N-1.
std::vector<std::complex<double>> dft(const Eigen::VectorXd& v) {
    const std::size_t N = static_cast<std::size_t>(v.size());
    std::vector<std::complex<double>> c(N);
    for (std::size_t m = 0; m < N; ++m) {
        std::complex<double> s{0.0, 0.0};
        for (std::size_t j = 0; j < N; ++j) {
            const double ang = -2.0 * kPi * static_cast<double>(m) * static_cast<double>(j) /
                               static_cast<double>(N);
            s += v[static_cast<Eigen::Index>(j)] * std::complex<double>(std::cos(ang), std::sin(ang));
        }
        c[m] = s / static_cast<double>(N);
    }
    return c;
}

} // namespace

Eigen::VectorXd trig_upsample(const Eigen::VectorXd& values, std::size_t M) {
    const std::size_t N = static_cast<std::size_t>(values.size());
    if (M == N) return values;
    if (M < N || M % 2 != 0 || N % 2 != 0)
        throw config_error("trig_upsample: require even M >= N");
    const auto c = dft(values);
    Eigen::VectorXd out(static_cast<Eigen::Index>(M));
    const std::size_t half = N / 2;
    for (std::size_t j = 0; j < M; ++j) {
        const double t = 2.0 * kPi * static_cast<double>(j) / static_cast<double>(M);
        double s = c[0].real();
        for (std::size_t m = 1; m < half; ++m) {
            const std::complex<double> e{std::cos(m * t), std::sin(m * t)};
            s += 2.0 * (c[m] * e).real();
        }
        // Nyquist mode: split evenly between +N/2 and -N/2.
        s += (c[half] * std::complex<double>(std::cos(half * t), std::sin(half * t))).real();
        out[static_cast<Eigen::Index>(j)] = s;
    }
    return out;
}

Eigen::VectorXd trig_derivative(const Eigen::VectorXd& values) {
    const std::size_t N = static_cast<std::size_t>(values.size());
    if (N % 2 != 0) throw config_error("trig_derivative: even grid expected");
    const auto c = dft(values);
    const std::size_t half = N / 2;
    Eigen::VectorXd out(static_cast<Eigen::Index>(N));
    for (std::size_t j = 0; j < N; ++j) {
        const double t = 2.0 * kPi * static_cast<double>(j) / static_cast<double>(N);
        double s = 0.0;
        for (std::size_t m = 1; m < half; ++m) {
            const std::complex<double> e{std::cos(m * t), std::sin(m * t)};
            // d/dt of 2 Re(c_m e^{imt}) = 2 Re(i m c_m e^{imt})
            s += 2.0 * (std::complex<double>(0.0, static_cast<double>(m)) * c[m] * e).real();
        }
        // the Nyquist mode contributes cos(half t) * Re c_half; derivative
        // -half sin(half t) * Re c_half vanishes at the grid points
        out[static_cast<Eigen::Index>(j)] = s;
    }
    return out;
}

} // namespace percond
