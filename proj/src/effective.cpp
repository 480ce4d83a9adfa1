#include "percond/effective.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "percond/errors.hpp"
#include "percond/parallel.hpp"
#include "percond/quadrature.hpp"

namespace percond {

namespace {

double annulus_radius(const ProblemData& pd, Vec2 p, double eps) {
    const double wall = std::min(std::min(p.x, pd.cell.q(0) - p.x),
                                 std::min(p.y, pd.cell.q(1) - p.y));
    return std::min(2.0 * pd.geometry.diameter_bound(), 0.95 * wall / eps);
}

void check_annulus(const ProblemData& pd, Vec2 p, double eps) {
    if (!(annulus_radius(pd, p, eps) >= 1.2 * pd.geometry.max_radius()))
        throw config_error("effective conductivity: the rescaled annulus does not fit "
                           "inside the cell at this eps");
}

Eigen::Matrix2d boundary_f_term(const ProblemData& pd) {
    const BoundaryGeometry& g = pd.geometry;
    Eigen::Matrix2d ft = Eigen::Matrix2d::Zero();
    for (int k = 0; k < 2; ++k) {
        double s = 0.0;
        for (std::size_t i = 0; i < g.size(); ++i)
            s += g.weights[i] * pd.f.values[static_cast<Eigen::Index>(i)] * g.nodes[i][k];
        ft(k, 0) = ft(k, 1) = s / pd.cell.measure;
    }
    return ft;
}

} // namespace

EffectiveResult lambda_eff(const ProblemData& pd, const GreensEvaluator& ev, Vec2 p,
                           double eps, const std::vector<int>& directions,
                           const BoundaryOperators& ops) {
    check_annulus(pd, p, eps);
    const BoundaryGeometry& g = pd.geometry;
    const auto rblocks = assemble_R_blocks(g, eps, ev);
    EffectiveResult res;
    res.eps = eps;
    res.f_term = boundary_f_term(pd);
    for (int j : directions) {
        ProblemData pdj = pd;
        pdj.direction = j;
        const EpsSolution sol = solve_eps(pdj, ev, p, eps, ops, &rblocks);
        res.eps_prime = sol.eps_prime;
        const Eigen::VectorXd Up = sol.U_plus_nodes();
        const Eigen::VectorXd Vm = sol.V_minus_nodes();
        for (int k = 0; k < 2; ++k) {
            double sp = 0.0, sm = 0.0;
            for (std::size_t i = 0; i < g.size(); ++i) {
                const double wnu = g.weights[i] * g.normals[i][k];
                sp += wnu * Up[static_cast<Eigen::Index>(i)];
                sm += wnu * Vm[static_cast<Eigen::Index>(i)];
            }
            res.Lambda_plus(k, j - 1) = sp / pd.cell.measure;
            res.Lambda_minus(k, j - 1) = -sm / pd.cell.measure;
            res.Lambda(k, j - 1) = pd.lambda_plus * res.Lambda_plus(k, j - 1) +
                                   pd.lambda_minus * res.Lambda_minus(k, j - 1) +
                                   res.f_term(k, j - 1);
            res.lambda_eff(k, j - 1) = (k == j - 1 ? pd.lambda_minus : 0.0) +
                                       eps * eps * res.Lambda(k, j - 1);
        }
        res.has_column[static_cast<std::size_t>(j - 1)] = true;
        res.cond[static_cast<std::size_t>(j - 1)] = sol.cond;
        res.max_multiplier[static_cast<std::size_t>(j - 1)] =
            std::max(std::abs(sol.mult_i), std::abs(sol.mult_o));
    }
    return res;
}

Eigen::Matrix2d lambda_limit(const ProblemData& pd, const std::vector<int>& directions,
                             const BoundaryOperators& ops, std::array<bool, 2>* has_column) {
    const BoundaryGeometry& g = pd.geometry;
    const Eigen::Matrix2d ft = boundary_f_term(pd);
    Eigen::Matrix2d L = Eigen::Matrix2d::Zero();
    if (has_column) (*has_column) = {false, false};
    for (int j : directions) {
        ProblemData pdj = pd;
        pdj.direction = j;
        const LimitingSolution lim = solve_limiting(pdj, ops);
        for (int k = 0; k < 2; ++k) {
            double sp = 0.0, sm = 0.0;
            for (std::size_t i = 0; i < g.size(); ++i) {
                const double wnu = g.weights[i] * g.normals[i][k];
                sp += wnu * lim.u_plus_trace[static_cast<Eigen::Index>(i)];
                sm += wnu * lim.u_minus_trace[static_cast<Eigen::Index>(i)];
            }
            L(k, j - 1) = (pd.lambda_plus * sp - pd.lambda_minus * sm) / pd.cell.measure +
                          (k == j - 1 ? g.enclosed_measure / pd.cell.measure *
                                            (pd.lambda_plus - pd.lambda_minus)
                                      : 0.0) +
                          ft(k, j - 1);
        }
        if (has_column) (*has_column)[static_cast<std::size_t>(j - 1)] = true;
    }
    return L;
}

namespace {

struct BoundaryGradients {
    // One-sided gradients of u on the scaled boundary nodes.
    std::vector<Vec2> interior;
    std::vector<Vec2> exterior;
};

BoundaryGradients boundary_gradients(const EpsSolution& sol) {
    const BoundaryGeometry& g = sol.geometry;
    const std::size_t N = g.size();
    const Eigen::VectorXd dtin = trig_derivative(sol.u_plus_trace());
    const Eigen::VectorXd dtout = trig_derivative(sol.u_minus_trace());
    BoundaryGradients out;
    out.interior.resize(N);
    out.exterior.resize(N);
    for (std::size_t i = 0; i < N; ++i) {
        const Vec2 nu = g.normals[i];
        const Vec2 tau{-nu.y, nu.x}; // unit tangent of the ccw parametrization
        const double sp_scaled = sol.eps * g.speeds[i];
        out.interior[i] = sol.dnu_u_plus_nodes[static_cast<Eigen::Index>(i)] * nu +
                          (dtin[static_cast<Eigen::Index>(i)] / sp_scaled) * tau;
        out.exterior[i] = sol.dnu_u_minus_nodes[static_cast<Eigen::Index>(i)] * nu +
                          (dtout[static_cast<Eigen::Index>(i)] / sp_scaled) * tau;
    }
    return out;
}

/// Deterministic chunked Vec2 reduction (same contract as parallel_sum).
template <typename F>
Vec2 parallel_sum_vec2(std::size_t n, F&& term, RunMode mode, std::size_t chunk = 64) {
    if (n == 0) return {0.0, 0.0};
    const std::size_t nchunks = (n + chunk - 1) / chunk;
    std::vector<Vec2> partial(nchunks, Vec2{0.0, 0.0});
    parallel_for(nchunks, [&](std::size_t c) {
        const std::size_t lo = c * chunk;
        const std::size_t hi = std::min(lo + chunk, n);
        Vec2 s{0.0, 0.0};
        for (std::size_t i = lo; i < hi; ++i) s += term(i);
        partial[c] = s;
    }, mode);
    Vec2 total{0.0, 0.0};
    for (const Vec2& s : partial) total += s;
    return total;
}

} // namespace

VolumeCheckResult lambda_eff_volume_check(const ProblemData& pd, const GreensEvaluator& ev,
                                          Vec2 p, double eps,
                                          const std::vector<int>& directions,
                                          const BoundaryOperators& ops, int grid_n,
                                          RunMode mode) {
    if (grid_n < 32)
        throw config_error("volume check: grid resolution too coarse to be meaningful");
    const BoundaryGeometry& g = pd.geometry;
    const std::size_t N = g.size();
    const double eps0 = admissible_scale(g, p, pd.cell);
    if (!(eps > 0.0 && eps < eps0))
        throw config_error("volume check: eps outside the admissible range");

    // Radial standoff (in shape-radial units) below which plain quadrature of
    // the layer gradients degrades; the strip up to the boundary is closed
    // with the one-sided trace gradients instead.
    double align = 1.0, max_ratio = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
        const double cnorm = g.nodes[i].norm();
        align = std::min(align, g.nodes[i].dot(g.normals[i]) / cnorm);
        max_ratio = std::max(max_ratio, g.speeds[i] / cnorm);
    }
    if (!(align > 0.05))
        throw config_error("volume check: shape is not sufficiently star-shaped");
    const double d0 =
        std::min(0.3, 26.0 * max_ratio / (static_cast<double>(N) * align));

    const double sigma_max = 0.9 * eps0 / eps;
    const double sigma = std::min(2.5, sigma_max);
    if (!(sigma >= 1.0 + 3.0 * d0))
        throw config_error("volume check: eps too large to fit the matching annulus");

    // A faster Ewald split for the amortized far-field gradient sums.
    const double eta_far = 3.5 / std::pow(pd.cell.q(0) * pd.cell.q(1), 0.25);
    const GreensEvaluator ev_far(pd.cell, 1e-11, eta_far);

    const auto [xg, wg] = gauss_legendre_01(24);
    const double dt = 2.0 * std::numbers::pi / static_cast<double>(N);

    VolumeCheckResult out;
    double worst_far_err = 0.0;

    const auto rblocks = assemble_R_blocks(g, eps, ev);
    for (int j : directions) {
        ProblemData pdj = pd;
        pdj.direction = j;
        const EpsSolution sol = solve_eps(pdj, ev, p, eps, ops, &rblocks);
        const BoundaryGradients bg = boundary_gradients(sol);
        const Vec2 ej = (j == 1) ? Vec2{1.0, 0.0} : Vec2{0.0, 1.0};

        std::vector<double> coef_i(N), coef_o(N);
        for (std::size_t i = 0; i < N; ++i) {
            coef_i[i] = sol.scaled.weights[i] * sol.theta_i.values[static_cast<Eigen::Index>(i)];
            coef_o[i] = sol.scaled.weights[i] * sol.theta_o.values[static_cast<Eigen::Index>(i)];
        }
        const PeriodicLayerSum layer_i(sol.scaled.nodes, coef_i, ev);
        const PeriodicLayerSum layer_o(sol.scaled.nodes, coef_o, ev);
        const PeriodicLayerSum layer_o_far(sol.scaled.nodes, coef_o, ev_far);

        // Interior: polar family x = p + eps r c(t), Jacobian eps^2 r (c x c').
        std::vector<Vec2> interior_t(N, Vec2{0.0, 0.0});
        const double rb = 1.0 - d0;
        parallel_for(N, [&](std::size_t i) {
            const Vec2 c = g.nodes[i];
            const double J = c.cross(g.spec.derivative(g.params[i]));
            Vec2 radial{0.0, 0.0};
            for (std::size_t q = 0; q < xg.size(); ++q) {
                const double r = rb * xg[q];
                const Vec2 grad = layer_i.gradient(p + (eps * r) * c) + ej;
                radial += (rb * wg[q] * r) * grad;
            }
            const Vec2 gb = layer_i.gradient(p + (eps * rb) * c) + ej;
            radial += (d0 * 0.5) * (rb * gb + bg.interior[i]);
            interior_t[i] = J * radial;
        }, mode);
        Vec2 I{0.0, 0.0};
        for (std::size_t i = 0; i < N; ++i) I += dt * interior_t[i];
        I = (eps * eps) * I;

        // Exterior annulus r in [1, sigma]; the integrand is the fluctuation
        // grad(u- - x_j), whose boundary value is the exterior trace gradient
        // minus e_j.
        std::vector<Vec2> annulus_t(N, Vec2{0.0, 0.0});
        const double r_lo = 1.0 + d0;
        parallel_for(N, [&](std::size_t i) {
            const Vec2 c = g.nodes[i];
            const double J = c.cross(g.spec.derivative(g.params[i]));
            Vec2 radial{0.0, 0.0};
            for (std::size_t q = 0; q < xg.size(); ++q) {
                const double r = r_lo + (sigma - r_lo) * xg[q];
                const Vec2 grad = layer_o.gradient(p + (eps * r) * c);
                radial += ((sigma - r_lo) * wg[q] * r) * grad;
            }
            const Vec2 gb = layer_o.gradient(p + (eps * r_lo) * c);
            radial += (d0 * 0.5) * (r_lo * gb + (bg.exterior[i] - ej));
            annulus_t[i] = J * radial;
        }, mode);
        Vec2 ann{0.0, 0.0};
        for (std::size_t i = 0; i < N; ++i) ann += dt * annulus_t[i];
        ann = (eps * eps) * ann;

        // Far region: midpoint tensor grid over Q, skipping cells whose
        // centers lie inside the sigma-scaled inclusion. The constant part
        // of grad u- enters exactly through the known areas.
        auto far_sum = [&](int ng) {
            const double hx = pd.cell.q(0) / ng;
            const double hy = pd.cell.q(1) / ng;
            const double cellarea = hx * hy;
            return parallel_sum_vec2(static_cast<std::size_t>(ng) * static_cast<std::size_t>(ng),
                                     [&](std::size_t idx) {
                                         const int iy = static_cast<int>(idx / static_cast<std::size_t>(ng));
                                         const int ix = static_cast<int>(idx % static_cast<std::size_t>(ng));
                                         const Vec2 x{(ix + 0.5) * hx, (iy + 0.5) * hy};
                                         if (g.spec.contains((x - p) / eps, sigma))
                                             return Vec2{0.0, 0.0};
                                         return cellarea * layer_o_far.gradient(x);
                                     },
                                     mode);
        };
        const Vec2 far = far_sum(grid_n);
        const Vec2 far_half = far_sum(grid_n / 2);
        worst_far_err = std::max(worst_far_err, (far - far_half).norm());

        double f_int = boundary_integral(g, pd.f.values);
        for (int k = 0; k < 2; ++k) {
            const double ek = (k == j - 1) ? 1.0 : 0.0;
            const double E_k = ek * (pd.cell.measure - eps * eps * g.enclosed_measure) +
                               ann[k] + far[k];
            double f_moment = 0.0;
            for (std::size_t i = 0; i < N; ++i)
                f_moment += g.weights[i] * pd.f.values[static_cast<Eigen::Index>(i)] *
                            g.nodes[i][k];
            const double Fk = eps * eps * f_moment + eps * (k == 0 ? p.x : p.y) * f_int;
            out.lambda_eff(k, j - 1) =
                (pd.lambda_plus * I[k] + pd.lambda_minus * E_k + Fk) / pd.cell.measure;
        }
        out.has_column[static_cast<std::size_t>(j - 1)] = true;
    }
    out.error_estimate = worst_far_err * pd.lambda_minus / pd.cell.measure +
                         eps * eps * d0 * d0 * d0;
    return out;
}

} // namespace percond
