#include "percond/potentials.hpp"

#include <cmath>
#include <numbers>

#include "percond/errors.hpp"

namespace percond {

namespace {
constexpr double kPi = std::numbers::pi;
}

Eigen::VectorXd kress_log_weights(std::size_t N) {
    if (N < 4 || N % 2 != 0) throw config_error("kress_log_weights: N must be even, N >= 4");
    const std::size_t half = N / 2;
    Eigen::VectorXd r(static_cast<Eigen::Index>(N));
    for (std::size_t d = 0; d < N; ++d) {
        const double dt = 2.0 * kPi * static_cast<double>(d) / static_cast<double>(N);
        double s = 0.0;
        for (std::size_t m = 1; m < half; ++m)
            s += std::cos(static_cast<double>(m) * dt) / static_cast<double>(m);
        const double nyq = (d % 2 == 0) ? 1.0 : -1.0; // cos((N/2) dt) = (-1)^d
        r[static_cast<Eigen::Index>(d)] =
            -(4.0 * kPi / static_cast<double>(N)) * s -
            (4.0 * kPi / static_cast<double>(N * N)) * nyq;
    }
    return r;
}

NystromBlock assemble_V(const BoundaryGeometry& g, RunMode mode) {
    const std::size_t N = g.size();
    if (N % 2 != 0) throw config_error("assemble_V: even node count required");
    const Eigen::VectorXd r = kress_log_weights(N);
    NystromBlock blk;
    blk.kind = NystromBlock::Kind::SingleLayerV;
    blk.matrix.resize(static_cast<Eigen::Index>(N), static_cast<Eigen::Index>(N));
    auto row = [&](std::size_t i) {
        for (std::size_t j = 0; j < N; ++j) {
            // log|x(t)-x(tau)| = (1/2) log(4 sin^2((t-tau)/2)) + chi(t,tau)
            double chi;
            if (i == j) {
                chi = std::log(g.speeds[i]);
            } else {
                const double dt = g.params[i] - g.params[j];
                const double dist = (g.nodes[i] - g.nodes[j]).norm();
                chi = std::log(dist / (2.0 * std::abs(std::sin(0.5 * dt))));
            }
            const std::size_t d = (i + N - j) % N;
            blk.matrix(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                g.speeds[j] * (r[static_cast<Eigen::Index>(d)] / (4.0 * kPi) +
                               chi / static_cast<double>(N));
        }
    };
    parallel_for(N, row, mode);
    return blk;
}

NystromBlock assemble_W(const BoundaryGeometry& g, RunMode mode) {
    const std::size_t N = g.size();
    NystromBlock blk;
    blk.kind = NystromBlock::Kind::AdjointDoubleW;
    blk.matrix.resize(static_cast<Eigen::Index>(N), static_cast<Eigen::Index>(N));
    auto row = [&](std::size_t i) {
        for (std::size_t j = 0; j < N; ++j)
            blk.matrix(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                laplace_adjoint_kernel(g, i, j) * g.weights[j];
    };
    parallel_for(N, row, mode);
    return blk;
}

std::pair<NystromBlock, NystromBlock> assemble_R_blocks(const BoundaryGeometry& g,
                                                        double eps,
                                                        const GreensEvaluator& ev,
                                                        RunMode mode) {
    const std::size_t N = g.size();
    if (!(std::abs(eps) * g.diameter_bound() < ev.cell().min_edge()))
        throw config_error("assemble_R_blocks: eps too large for the cell "
                           "(|eps|*diam(Omega) must stay below min q_ii)");
    Eigen::MatrixXd kR(static_cast<Eigen::Index>(N), static_cast<Eigen::Index>(N));
    Eigen::MatrixXd kGx(static_cast<Eigen::Index>(N), static_cast<Eigen::Index>(N));
    Eigen::MatrixXd kGy(static_cast<Eigen::Index>(N), static_cast<Eigen::Index>(N));
    // Rq is even and grad Rq odd, so the kernel is computed on the upper
    // triangle only and mirrored.
    auto row = [&](std::size_t i) {
        for (std::size_t j = i; j < N; ++j) {
            double val;
            Vec2 grad;
            ev.Rq_and_grad(eps * (g.nodes[i] - g.nodes[j]), val, grad);
            kR(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = val;
            kGx(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = grad.x;
            kGy(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = grad.y;
        }
    };
    parallel_for(N, row, mode);
    NystromBlock R, DR;
    R.kind = NystromBlock::Kind::PeriodicCorrectionR;
    R.scale = eps;
    DR.kind = NystromBlock::Kind::PeriodicCorrectionDR;
    DR.scale = eps;
    R.matrix.resize(static_cast<Eigen::Index>(N), static_cast<Eigen::Index>(N));
    DR.matrix.resize(static_cast<Eigen::Index>(N), static_cast<Eigen::Index>(N));
    for (std::size_t i = 0; i < N; ++i) {
        for (std::size_t j = 0; j < N; ++j) {
            const bool upper = j >= i;
            const std::size_t a = upper ? i : j;
            const std::size_t b = upper ? j : i;
            const double sgn = upper ? 1.0 : -1.0;
            const double rv = kR(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b));
            const Vec2 gv{sgn * kGx(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)),
                          sgn * kGy(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b))};
            R.matrix(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                rv * g.weights[j];
            DR.matrix(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                g.normals[i].dot(gv) * g.weights[j];
        }
    }
    return {std::move(R), std::move(DR)};
}

Eigen::VectorXd gauss_column_sums(const BoundaryGeometry& g) {
    const std::size_t N = g.size();
    Eigen::VectorXd s = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(N));
    for (std::size_t j = 0; j < N; ++j) {
        double acc = 0.0;
        for (std::size_t i = 0; i < N; ++i)
            acc += g.weights[i] * laplace_adjoint_kernel(g, i, j);
        s[static_cast<Eigen::Index>(j)] = acc;
    }
    return s;
}

namespace {

bool near_flag(const BoundaryGeometry& g, Vec2 x) {
    double dmin = std::numeric_limits<double>::infinity();
    double wmax = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
        dmin = std::min(dmin, (x - g.nodes[i]).norm());
        wmax = std::max(wmax, g.weights[i]);
    }
    return dmin < wmax;
}

} // namespace

FieldValue eval_single_layer(const BoundaryGeometry& g, const Eigen::VectorXd& mu, Vec2 x) {
    FieldValue out;
    out.near_boundary = near_flag(g, x);
    double v = 0.0;
    Vec2 grad{0.0, 0.0};
    for (std::size_t i = 0; i < g.size(); ++i) {
        const Vec2 d = x - g.nodes[i];
        const double r2 = d.norm2();
        const double c = g.weights[i] * mu[static_cast<Eigen::Index>(i)];
        v += c * 0.25 * std::log(r2) / kPi;
        grad += (c / (2.0 * kPi * r2)) * d;
    }
    out.value = v;
    out.gradient = grad;
    return out;
}

FieldValue eval_periodic_layer(const BoundaryGeometry& bd, const Eigen::VectorXd& mu,
                               const GreensEvaluator& ev, Vec2 x) {
    FieldValue out;
    out.near_boundary = near_flag(bd, x);
    double v = 0.0;
    Vec2 grad{0.0, 0.0};
    for (std::size_t i = 0; i < bd.size(); ++i) {
        const double c = bd.weights[i] * mu[static_cast<Eigen::Index>(i)];
        const Vec2 d = x - bd.nodes[i];
        v += c * ev.Sq(d);
        grad += c * ev.grad_Sq(d);
    }
    out.value = v;
    out.gradient = grad;
    return out;
}

FieldValue eval_R_convolution(const BoundaryGeometry& g, const Eigen::VectorXd& mu,
                              const GreensEvaluator& ev, double eps, Vec2 t) {
    FieldValue out;
    double v = 0.0;
    Vec2 grad{0.0, 0.0};
    for (std::size_t i = 0; i < g.size(); ++i) {
        const double c = g.weights[i] * mu[static_cast<Eigen::Index>(i)];
        double val;
        Vec2 gv;
        ev.Rq_and_grad(eps * (t - g.nodes[i]), val, gv);
        v += c * val;
        grad += (c * eps) * gv;
    }
    out.value = v;
    out.gradient = grad;
    return out;
}

std::pair<BoundaryGeometry, Eigen::VectorXd> refine(const BoundaryGeometry& g,
                                                    const Eigen::VectorXd& mu,
                                                    std::size_t M) {
    return {make_geometry(g.spec, M), trig_upsample(mu, M)};
}

void eval_periodic_layer_batch(const BoundaryGeometry& bd, const Eigen::VectorXd& mu,
                               const GreensEvaluator& ev, const std::vector<Vec2>& targets,
                               std::vector<FieldValue>& out, RunMode mode) {
    out.resize(targets.size());
    parallel_for(targets.size(),
                 [&](std::size_t i) { out[i] = eval_periodic_layer(bd, mu, ev, targets[i]); },
                 mode);
}

} // namespace percond
