// Acceptance suite: end-to-end criteria for the effective-conductivity
// artifact, one pass/fail line each. Exit code = number of failed criteria.

#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <numbers>
#include <random>
#include <vector>

#include "percond/checks.hpp"
#include "percond/continuation.hpp"
#include "percond/effective.hpp"
#include "percond/errors.hpp"
#include "percond/transmission.hpp"

using namespace percond;

namespace {

constexpr double kPi = std::numbers::pi;
int g_failures = 0;

void report(int n, const char* name, bool pass, const std::string& detail) {
    std::printf("[%s] %2d. %-34s %s\n", pass ? "PASS" : "FAIL", n, name, detail.c_str());
    if (!pass) ++g_failures;
}

std::string fmt(const char* f, ...) {
    va_list ap;
    va_start(ap, f);
    char buf[512];
    std::vsnprintf(buf, sizeof buf, f, ap);
    va_end(ap);
    return buf;
}

/// Independent closed-form oracle for the limiting disk problem with
/// f = g = 0: interior A t_j, exterior B t_j/|t|^2. Re-derived from the flux
/// and Robin jump conditions on the unit circle; solved by Cramer's rule.
void oracle_disk(double lp, double lm, double r, double& A, double& B) {
    // -lm B - lp A = lp - lm ;  lp A + r (A - B) = -lp
    const double a11 = -lp, a12 = -lm, a21 = lp + r, a22 = -r;
    const double det = a11 * a22 - a12 * a21;
    A = ((lp - lm) * a22 - a12 * (-lp)) / det;
    B = (a11 * (-lp) - (lp - lm) * a21) / det;
}

ProblemData disk_problem(std::size_t N, double lp, double lm, RhoLaw law, int j = 1) {
    const auto disk = make_ellipse(1.0, 1.0, N);
    const auto cell = make_cell({1.0, 1.0});
    const Eigen::VectorXd zero = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(N));
    return make_problem(disk, cell, lp, lm, zero, zero, std::move(law), j);
}

void criterion1_periodic_gauss() {
    const auto cell = make_cell({1.0, 1.0});
    const GreensEvaluator ev(cell);
    const double r128 =
        gauss_periodic_residual(scaled_copy(make_ellipse(1, 1, 128), {0.5, 0.5}, 0.25), ev);
    const double r256 =
        gauss_periodic_residual(scaled_copy(make_ellipse(1, 1, 256), {0.5, 0.5}, 0.25), ev);
    // at the rounding floor the doubling comparison saturates
    const bool decreases = r256 <= r128 || r256 < 1e-12;
    report(1, "periodic Gauss identity",
           r128 < 1e-8 && decreases,
           fmt("residual(N=128)=%.2e (tol 1e-8), residual(N=256)=%.2e", r128, r256));
}

void criterion2_sqn_equation() {
    const auto cell = make_cell({1.0, 1.0});
    const GreensEvaluator ev(cell);
    const double fd = fd_laplacian_residual(ev, 100, 20260810);
    const double eta = eta_robustness_residual(cell, 1e-13, 20, 8102026);
    report(2, "defining equation of Sq", fd < 1e-6 && eta < 1e-12,
           fmt("FD-Laplacian rel=%.2e (tol 1e-6), eta-robustness=%.2e (tol 1e-12)", fd, eta));
}

void criterion3_jump_relations() {
    const auto g = make_ellipse(2.0, 1.0, 256);
    const auto W = assemble_W(g);
    std::mt19937_64 rng(4242);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    double worst = 0.0;
    for (int d = 0; d < 5; ++d) {
        TrigPoly p;
        for (int k = 0; k < 8; ++k) {
            p.ccos.push_back(u(rng));
            p.csin.push_back(u(rng));
        }
        worst = std::max(worst, jump_relation_residual(g, p, W.matrix, 8));
    }
    report(3, "jump relations", worst < 1e-6,
           fmt("max residual=%.2e over 5 densities (tol 1e-6)", worst));
}

void criterion4_disk_oracle() {
    const std::size_t N = 256;
    double worst_trace = 0.0;
    double limit_err = 0.0;
    for (double rstar : {1.0, 0.0}) {
        double A, B;
        oracle_disk(2.0, 1.0, rstar, A, B);
        // frozen oracle values
        if (rstar == 1.0 && (std::abs(A + 0.6) > 1e-14 || std::abs(B - 0.2) > 1e-14))
            throw std::logic_error("disk oracle self-check failed");
        if (rstar == 0.0 && (std::abs(A + 1.0) > 1e-14 || std::abs(B - 1.0) > 1e-14))
            throw std::logic_error("disk oracle self-check failed");

        const RhoLaw law =
            rstar > 0.0 ? make_power_law(1.0 / rstar, 1.0) : make_power_law(1.0, 0.0);
        const auto pd = disk_problem(N, 2.0, 1.0, law);
        const auto ops = make_boundary_operators(pd.geometry);
        const auto lim = solve_limiting(pd, ops);
        for (std::size_t i = 0; i < N; ++i) {
            const Eigen::Index ii = static_cast<Eigen::Index>(i);
            worst_trace = std::max(
                worst_trace, std::abs(lim.u_plus_trace[ii] - A * pd.geometry.nodes[i].x));
            worst_trace = std::max(
                worst_trace, std::abs(lim.u_minus_trace[ii] - B * pd.geometry.nodes[i].x));
        }
        if (rstar == 1.0) {
            const Eigen::Matrix2d L = lambda_limit(pd, {1}, ops);
            limit_err = std::abs(L(0, 0) - (-0.4 * kPi));
        }
    }
    report(4, "disk limiting oracle", worst_trace < 1e-8 && limit_err < 1e-8,
           fmt("trace err=%.2e (tol 1e-8), |Lambda11[0,1] + 0.4 pi|=%.2e (tol 1e-8)",
               worst_trace, limit_err));
}

void criterion5_structure_theorem() {
    const auto t0 = std::chrono::steady_clock::now();
    const auto pd = disk_problem(256, 2.0, 1.0, make_power_law(1.0, 1.0));
    const auto ops = make_boundary_operators(pd.geometry);
    const GreensEvaluator ev(pd.cell);
    const Eigen::Matrix2d L0 = lambda_limit(pd, {1}, ops);
    const std::vector<double> grid{0.2, 0.141, 0.1, 0.071, 0.05};
    const auto rec = sweep(pd, ev, {0.5, 0.5}, grid, {1}, ops);
    bool all_ok = true, monotone = true;
    double prev = 1e30;
    for (const auto& e : rec.entries) {
        all_ok = all_ok && e.ok;
        if (!e.ok) continue;
        const double diff = std::abs(e.result.Lambda(0, 0) - L0(0, 0));
        monotone = monotone && diff < prev;
        prev = diff;
    }
    const auto est = order_estimate(rec, 1.0, L0(0, 0), 1, 1);
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    report(5, "eps^2 structure of lambda_eff",
           all_ok && monotone && !est.saturated && est.slope >= 2.8 && secs <= 300.0,
           fmt("|Lambda11[eps]-Lambda11[0,1]| monotone=%d, slope=%.2f (tol >= 2.8), %.1fs",
               static_cast<int>(monotone), est.slope, secs));
}

void criterion6_route_equivalence() {
    const auto pd = disk_problem(256, 2.0, 1.0, make_power_law(1.0, 1.0));
    const GreensEvaluator ev(pd.cell);
    const double res = route_equivalence_residual(pd, ev, {0.5, 0.5}, 0.15, 20, 613);
    report(6, "route equivalence M vs J", res < 1e-8,
           fmt("max field mismatch=%.2e at 20 probes, eps=0.15 (tol 1e-8)", res));
}

void criterion7_representation_limits() {
    // rho(eps) = eps/(1+eps) keeps eps' = 1 + eps: r* = 1 with a genuinely
    // linear eps-dependence, so the residual decay rate is observable.
    const std::size_t N = 256;
    std::vector<double> etab, rtab;
    for (double e : {5e-4, 1e-3, 2e-3, 4e-3, 8e-3}) {
        etab.push_back(e);
        rtab.push_back(e / (1.0 + e));
    }
    const auto pd = disk_problem(N, 2.0, 1.0, make_table_law(etab, rtab, 1.0));
    const auto ops = make_boundary_operators(pd.geometry);
    const GreensEvaluator ev(pd.cell);
    const auto lim = solve_limiting(pd, ops);
    const BoundaryGeometry& g = pd.geometry;

    Eigen::VectorXd Up0(static_cast<Eigen::Index>(N)), Vm0(static_cast<Eigen::Index>(N));
    double mean_sj = 0.0;
    for (std::size_t i = 0; i < N; ++i) mean_sj += g.weights[i] * g.nodes[i].x;
    mean_sj /= g.perimeter;
    for (std::size_t i = 0; i < N; ++i) {
        const Eigen::Index ii = static_cast<Eigen::Index>(i);
        Up0[ii] = lim.u_plus_trace[ii] + g.nodes[i].x - mean_sj;
        Vm0[ii] = lim.u_minus_trace[ii] - lim.l_minus + g.nodes[i].x;
    }
    std::vector<double> r2s, r7s;
    for (double eps : {4e-3, 2e-3, 1e-3}) {
        const auto sol = solve_eps(pd, ev, {0.5, 0.5}, eps, ops);
        r2s.push_back((sol.U_plus_nodes() - Up0).cwiseAbs().maxCoeff());
        r7s.push_back((sol.V_minus_nodes() - Vm0).cwiseAbs().maxCoeff());
    }
    bool pass = r2s[2] < 5e-3 && r7s[2] < 5e-3;
    for (int i = 0; i < 2; ++i) {
        const double q2 = r2s[i] / r2s[i + 1];
        const double q7 = r7s[i] / r7s[i + 1];
        pass = pass && q2 > 1.6 && q2 < 2.5 && q7 > 1.6 && q7 < 2.5; // linear shrink
    }
    report(7, "representation limits", pass,
           fmt("rep2 res=%.2e rep7 res=%.2e at eps=1e-3 (tol 5e-3), ratios %.2f/%.2f",
               r2s[2], r7s[2], r2s[1] / r2s[2], r7s[1] / r7s[2]));
}

void criterion8_far_field_dipole() {
    const auto pd = disk_problem(256, 2.0, 1.0, make_power_law(1.0, 1.0));
    const auto ops = make_boundary_operators(pd.geometry);
    const GreensEvaluator ev(pd.cell);
    const Vec2 p{0.5, 0.5};
    const auto lim = solve_limiting(pd, ops);
    std::vector<Vec2> probes;
    for (int i = 0; i < 10; ++i) {
        const double a = 2.0 * kPi * (i + 0.3) / 10.0;
        probes.push_back(p + Vec2{0.43 * std::cos(a), 0.43 * std::sin(a)});
    }
    std::vector<double> ratios;
    for (double eps : {0.2, 0.1, 0.05}) {
        const auto sol = solve_eps(pd, ev, p, eps, ops);
        const auto rep = far_field_dipole_check(pd, ev, p, eps, probes, lim, sol);
        ratios.push_back(rep.max_residual_over_eps_n);
    }
    const bool pass = ratios[1] < ratios[0] && ratios[2] < ratios[1];
    report(8, "far-field dipole", pass,
           fmt("residual/eps^2 = %.2e -> %.2e -> %.2e (monotone decrease)", ratios[0],
               ratios[1], ratios[2]));
}

void criterion9_invariance_suite() {
    const auto pd = disk_problem(256, 2.0, 1.0, make_power_law(1.0, 1.0));
    const auto ops = make_boundary_operators(pd.geometry);
    const GreensEvaluator ev(pd.cell);

    const auto a = lambda_eff(pd, ev, {0.5, 0.5}, 0.1, {1, 2}, ops);
    const auto b = lambda_eff(pd, ev, {0.3, 0.7}, 0.1, {1, 2}, ops);
    const double p_err = (a.lambda_eff - b.lambda_eff).cwiseAbs().maxCoeff();
    const double offdiag =
        std::max(std::abs(a.lambda_eff(0, 1)), std::abs(a.lambda_eff(1, 0)));

    const auto sol = solve_eps(pd, ev, {0.5, 0.5}, 0.1, ops);
    double qp = 0.0;
    std::mt19937_64 rng(11235);
    std::uniform_real_distribution<double> u(0.05, 0.35);
    for (int i = 0; i < 5; ++i) {
        const Vec2 x{u(rng), 1.0 - u(rng)};
        qp = std::max(qp, std::abs(sol.u_minus({x.x + 1.0, x.y}) - sol.u_minus(x) - 1.0));
        qp = std::max(qp, std::abs(sol.u_minus({x.x, x.y + 1.0}) - sol.u_minus(x)));
    }
    report(9, "invariance suite", p_err < 1e-9 && offdiag < 1e-10 && qp < 1e-10,
           fmt("p-shift=%.2e (tol 1e-9), offdiag=%.2e (tol 1e-10), quasi-periodicity=%.2e",
               p_err, offdiag, qp));
}

void criterion10_volume_cross_check() {
    const auto pd = disk_problem(256, 2.0, 1.0, make_power_law(1.0, 1.0));
    const auto ops = make_boundary_operators(pd.geometry);
    const GreensEvaluator ev(pd.cell);
    const Vec2 p{0.5, 0.5};
    const auto bf = lambda_eff(pd, ev, p, 0.2, {1}, ops);
    const auto vol = lambda_eff_volume_check(pd, ev, p, 0.2, {1}, ops, 200);
    const double diff =
        std::max(std::abs(vol.lambda_eff(0, 0) - bf.lambda_eff(0, 0)),
                 std::abs(vol.lambda_eff(1, 0) - bf.lambda_eff(1, 0)));
    report(10, "volume-definition cross-check", diff < 1e-3,
           fmt("|boundary - volume| = %.2e at eps=0.2, grid 200 (tol 1e-3)", diff));
}

} // namespace

int main() {
    std::printf("percond acceptance suite\n");
    try {
        criterion1_periodic_gauss();
        criterion2_sqn_equation();
        criterion3_jump_relations();
        criterion4_disk_oracle();
        criterion5_structure_theorem();
        criterion6_route_equivalence();
        criterion7_representation_limits();
        criterion8_far_field_dipole();
        criterion9_invariance_suite();
        criterion10_volume_cross_check();
    } catch (const std::exception& e) {
        std::printf("[FAIL] suite aborted: %s\n", e.what());
        return 99;
    }
    std::printf("%d of 10 criteria passed\n", 10 - g_failures);
    return g_failures;
}
