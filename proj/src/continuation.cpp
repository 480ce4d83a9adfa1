#include "percond/continuation.hpp"

#include <Eigen/SVD>
#include <algorithm>
#include <cmath>

#include "percond/errors.hpp"
#include "percond/parallel.hpp"

namespace percond {

std::vector<double> default_eps_grid(int n) {
    std::vector<double> grid;
    for (int k = 0; k < n; ++k) grid.push_back(0.2 * std::pow(2.0, -0.5 * k));
    return grid;
}

SweepRecord sweep(const ProblemData& pd, const GreensEvaluator& ev, Vec2 p,
                  const std::vector<double>& eps_grid, const std::vector<int>& directions,
                  const BoundaryOperators& ops, const std::string& fingerprint) {
    if (eps_grid.empty()) throw config_error("sweep: empty eps grid");
    for (std::size_t i = 0; i < eps_grid.size(); ++i) {
        if (!(eps_grid[i] > 0.0)) throw config_error("sweep: eps values must be positive");
        if (i > 0 && !(eps_grid[i] < eps_grid[i - 1]))
            throw config_error("sweep: eps grid must be strictly decreasing");
    }
    SweepRecord rec;
    rec.rho_law = pd.rho_law;
    rec.directions = directions;
    rec.fingerprint = fingerprint;
    rec.entries.resize(eps_grid.size());
    // Entries are independent jobs writing disjoint slots; failures are
    // recorded per eps and the sweep continues. Inner assembly loops fall
    // back to a single thread inside the outer team (nested parallelism is
    // off by default).
    parallel_for(eps_grid.size(), [&](std::size_t i) {
        SweepEntry& e = rec.entries[i];
        e.eps = eps_grid[i];
        try {
            e.result = lambda_eff(pd, ev, p, e.eps, directions, ops);
            e.ok = true;
        } catch (const std::exception& ex) {
            e.ok = false;
            e.error = ex.what();
        }
    });
    return rec;
}

double SeriesFit::eval(double eps) const {
    if (eps < eps_min || eps > eps_max)
        throw config_error("series fit: refusing to extrapolate outside the sampled range");
    double s = 0.0;
    double pw = 1.0;
    for (double c : coeffs) {
        s += c * pw;
        pw *= eps;
    }
    return s;
}

SeriesFit fit_series(const SweepRecord& rec, int k, int j, int degree) {
    if (!rec.rho_law.analytic_eps_prime())
        throw config_error("series fit: eps/rho(eps) must extend real-analytically to 0 "
                           "(power law with exponent 0 or 1)");
    std::vector<double> xs, ys;
    for (const SweepEntry& e : rec.entries) {
        if (!e.ok || !e.result.has_column[static_cast<std::size_t>(j - 1)]) continue;
        xs.push_back(e.eps);
        ys.push_back(e.result.Lambda(k - 1, j - 1));
    }
    if (static_cast<int>(xs.size()) < degree + 2)
        throw config_error("series fit: need at least degree + 2 samples");
    const double emax = *std::max_element(xs.begin(), xs.end());
    const double emin = *std::min_element(xs.begin(), xs.end());

    const Eigen::Index rows = static_cast<Eigen::Index>(xs.size());
    const Eigen::Index cols = degree + 1;
    Eigen::MatrixXd V(rows, cols);
    Eigen::VectorXd y(rows);
    for (Eigen::Index r = 0; r < rows; ++r) {
        const double u = xs[static_cast<std::size_t>(r)] / emax;
        double pw = 1.0;
        for (Eigen::Index c = 0; c < cols; ++c) {
            V(r, c) = pw;
            pw *= u;
        }
        y(r) = ys[static_cast<std::size_t>(r)];
    }
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(V, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const double smin = svd.singularValues().minCoeff();
    const double smax = svd.singularValues().maxCoeff();
    if (!(smin > 1e-12 * smax))
        throw config_error("series fit: ill-conditioned Vandermonde; rescale the eps grid");
    const Eigen::VectorXd cu = svd.solve(y);
    const Eigen::VectorXd resid = V * cu - y;

    SeriesFit fit;
    fit.k = k;
    fit.j = j;
    fit.degree = degree;
    fit.coeffs.resize(static_cast<std::size_t>(cols));
    double scale = 1.0;
    for (Eigen::Index c = 0; c < cols; ++c) {
        fit.coeffs[static_cast<std::size_t>(c)] = cu(c) / scale;
        scale *= emax;
    }
    fit.residual_rms = std::sqrt(resid.squaredNorm() / static_cast<double>(rows));
    // Standard error of the constant term: residual variance propagated
    // through [(V^T V)^{-1}]_{00} = sum_k W(0,k)^2 / sigma_k^2.
    const double dof = std::max<double>(1.0, static_cast<double>(rows - cols));
    double g00 = 0.0;
    for (Eigen::Index kk = 0; kk < svd.singularValues().size(); ++kk) {
        const double w0 = svd.matrixV()(0, kk) / svd.singularValues()(kk);
        g00 += w0 * w0;
    }
    fit.a0_stderr = std::sqrt(resid.squaredNorm() / dof) * std::sqrt(g00);
    fit.cond = smax / smin;
    fit.eps_min = emin;
    fit.eps_max = emax;
    return fit;
}

OrderEstimate order_estimate(const SweepRecord& rec, double lambda_minus,
                             double reference_limit, int k, int j) {
    OrderEstimate est;
    const double delta = (k == j) ? 1.0 : 0.0;
    for (const SweepEntry& e : rec.entries) {
        if (!e.ok || !e.result.has_column[static_cast<std::size_t>(j - 1)]) continue;
        const double lam = e.result.lambda_eff(k - 1, j - 1);
        const double rem = std::abs(lam - lambda_minus * delta -
                                    e.eps * e.eps * reference_limit);
        est.remainders.push_back(rem);
        est.eps_used.push_back(e.eps);
    }
    // Drop points at the quadrature noise floor.
    std::vector<double> lx, ly;
    for (std::size_t i = 0; i < est.remainders.size(); ++i) {
        if (est.remainders[i] < 1e-12 * std::max(1.0, std::abs(lambda_minus))) continue;
        lx.push_back(std::log(est.eps_used[i]));
        ly.push_back(std::log(est.remainders[i]));
    }
    est.points_used = static_cast<int>(lx.size());
    if (est.points_used < 3) {
        est.saturated = true;
        return est;
    }
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        sx += lx[i];
        sy += ly[i];
        sxx += lx[i] * lx[i];
        sxy += lx[i] * ly[i];
    }
    const double n = static_cast<double>(lx.size());
    est.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    return est;
}

} // namespace percond
