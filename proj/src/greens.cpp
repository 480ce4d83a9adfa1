#include "percond/greens.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "percond/errors.hpp"

namespace percond {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kGamma = std::numbers::egamma;

/// Exponential integral E1(u), u > 0.
double expint_e1(double u) { return -std::expint(-u); }

/// Entire part e1(u) = E1(u) + gamma + log(u) = sum_{k>=1} (-1)^{k+1} u^k/(k k!),
/// evaluated without cancellation for small u.
double e1_regular(double u) {
    if (u < 0.5) {
        double term = u; // k = 1
        double sum = u;
        for (int k = 2; k < 30; ++k) {
            term *= -u / static_cast<double>(k);
            const double add = term / static_cast<double>(k);
            sum += add;
            if (std::abs(add) < 1e-18 * (1.0 + std::abs(sum))) break;
        }
        return sum;
    }
    return expint_e1(u) + kGamma + std::log(u);
}

/// (1 - exp(-u))/u with the removable singularity at u = 0 filled in.
double expm1_ratio(double u) {
    if (u < 1e-4) return 1.0 - u / 2.0 + u * u / 6.0 - u * u * u / 24.0;
    return -std::expm1(-u) / u;
}

} // namespace

double S2(Vec2 x) {
    const double r2 = x.norm2();
    if (r2 == 0.0) throw numeric_error("S2: evaluation at the singular point");
    return 0.25 * std::log(r2) / kPi;
}

Vec2 grad_S2(Vec2 x) {
    const double r2 = x.norm2();
    if (r2 == 0.0) throw numeric_error("grad_S2: evaluation at the singular point");
    return x / (2.0 * kPi * r2);
}

GreensEvaluator::GreensEvaluator(const PeriodicCell& cell, double tol, double eta)
    : cell_(cell), tol_(tol) {
    if (cell.dim != 2 || cell.q_diag.size() != 2)
        throw config_error("GreensEvaluator: only the 2D diagonal lattice is supported");
    if (!(tol > 0.0 && tol < 1e-2))
        throw config_error("GreensEvaluator: tolerance out of range");
    const double q0 = cell.q(0);
    const double q1 = cell.q(1);
    eta_ = eta > 0.0 ? eta : std::sqrt(kPi) / std::pow(q0 * q1, 0.25);
    eta2_ = eta_ * eta_;
    const_term_ = 1.0 / (4.0 * eta2_ * cell_.measure);

    // Screened spatial images: keep terms with eta^2 r^2 <= u_max, where the
    // dropped tail satisfies E1(u) <= exp(-u)/u < tol.
    u_max_ = std::log(1.0 / tol_) + 6.0;
    const double reach = std::max(cell_.min_edge(),
                                  0.5 * std::hypot(q0, q1)) * 1.01;
    real_cutoff_ = static_cast<int>(
        std::ceil((std::sqrt(u_max_) / eta_ + reach) / cell_.min_edge()));

    // Reciprocal terms k = 2 pi (z1/q0, z2/q1), damped by exp(-|k|^2/(4 eta^2)).
    const double kmax = 2.0 * eta_ * std::sqrt(u_max_);
    const int m0 = static_cast<int>(std::ceil(kmax * q0 / (2.0 * kPi))) + 1;
    const int m1 = static_cast<int>(std::ceil(kmax * q1 / (2.0 * kPi))) + 1;
    recip_cutoff_ = std::max(m0, m1);
    const double coef_floor = tol_ * 1e-3;
    for (int z0 = -m0; z0 <= m0; ++z0) {
        for (int z1 = -m1; z1 <= m1; ++z1) {
            if (z0 == 0 && z1 == 0) continue;
            const Vec2 k{2.0 * kPi * z0 / q0, 2.0 * kPi * z1 / q1};
            const double k2 = k.norm2();
            const double coef = std::exp(-k2 / (4.0 * eta2_)) / (cell_.measure * k2);
            if (coef > coef_floor) recip_.push_back({k, coef});
        }
    }
}

Vec2 GreensEvaluator::wrap(Vec2 x) const {
    const double q0 = cell_.q(0);
    const double q1 = cell_.q(1);
    return {x.x - q0 * std::round(x.x / q0), x.y - q1 * std::round(x.y / q1)};
}

double GreensEvaluator::recip_value(Vec2 x) const {
    double s = 0.0;
    for (const RecipTerm& t : recip_) s += t.coef * std::cos(t.k.dot(x));
    return -s;
}

Vec2 GreensEvaluator::recip_grad(Vec2 x) const {
    Vec2 g{0.0, 0.0};
    for (const RecipTerm& t : recip_) g += (t.coef * std::sin(t.k.dot(x))) * t.k;
    return g;
}

double GreensEvaluator::Sq(Vec2 x) const {
    const Vec2 xw = wrap(x);
    const double lattice_tol = 1e-12 * cell_.min_edge();
    if (xw.norm2() < lattice_tol * lattice_tol)
        throw numeric_error("Sq: evaluation point is on the lattice q*Z^2");
    double spatial = 0.0;
    const int M = real_cutoff_;
    for (int z0 = -M; z0 <= M; ++z0) {
        for (int z1 = -M; z1 <= M; ++z1) {
            const Vec2 d{xw.x - cell_.q(0) * z0, xw.y - cell_.q(1) * z1};
            const double u = eta2_ * d.norm2();
            if (u > u_max_) continue;
            spatial += expint_e1(u);
        }
    }
    return -spatial / (4.0 * kPi) + recip_value(xw) + const_term_;
}

Vec2 GreensEvaluator::grad_Sq(Vec2 x) const {
    const Vec2 xw = wrap(x);
    const double lattice_tol = 1e-12 * cell_.min_edge();
    if (xw.norm2() < lattice_tol * lattice_tol)
        throw numeric_error("grad_Sq: evaluation point is on the lattice q*Z^2");
    Vec2 g{0.0, 0.0};
    const int M = real_cutoff_;
    for (int z0 = -M; z0 <= M; ++z0) {
        for (int z1 = -M; z1 <= M; ++z1) {
            const Vec2 d{xw.x - cell_.q(0) * z0, xw.y - cell_.q(1) * z1};
            const double r2 = d.norm2();
            const double u = eta2_ * r2;
            if (u > u_max_) continue;
            g += (std::exp(-u) / (2.0 * kPi * r2)) * d;
        }
    }
    return g + recip_grad(xw);
}

double GreensEvaluator::Rq(Vec2 x) const {
    if (!(x.norm() < cell_.min_edge()))
        throw numeric_error("Rq: argument outside the principal cell");
    double spatial = 0.0;
    const int M = real_cutoff_;
    for (int z0 = -M; z0 <= M; ++z0) {
        for (int z1 = -M; z1 <= M; ++z1) {
            if (z0 == 0 && z1 == 0) continue;
            const Vec2 d{x.x - cell_.q(0) * z0, x.y - cell_.q(1) * z1};
            const double u = eta2_ * d.norm2();
            if (u > u_max_) continue;
            spatial += expint_e1(u);
        }
    }
    // Central image minus S2, continued through x = 0:
    //   -E1(eta^2 r^2)/(4 pi) - log(r)/(2 pi) = (gamma + 2 log eta)/(4 pi)
    //                                           - e1(eta^2 r^2)/(4 pi).
    const double central =
        (kGamma + 2.0 * std::log(eta_)) / (4.0 * kPi) - e1_regular(eta2_ * x.norm2()) / (4.0 * kPi);
    return central - spatial / (4.0 * kPi) + recip_value(x) + const_term_;
}

Vec2 GreensEvaluator::grad_Rq(Vec2 x) const {
    if (!(x.norm() < cell_.min_edge()))
        throw numeric_error("grad_Rq: argument outside the principal cell");
    Vec2 g{0.0, 0.0};
    const int M = real_cutoff_;
    for (int z0 = -M; z0 <= M; ++z0) {
        for (int z1 = -M; z1 <= M; ++z1) {
            if (z0 == 0 && z1 == 0) continue;
            const Vec2 d{x.x - cell_.q(0) * z0, x.y - cell_.q(1) * z1};
            const double r2 = d.norm2();
            const double u = eta2_ * r2;
            if (u > u_max_) continue;
            g += (std::exp(-u) / (2.0 * kPi * r2)) * d;
        }
    }
    // Central screened image minus grad S2; smooth and zero at x = 0.
    const double u = eta2_ * x.norm2();
    g += (-eta2_ / (2.0 * kPi) * expm1_ratio(u)) * x;
    return g + recip_grad(x);
}

void GreensEvaluator::Rq_and_grad(Vec2 x, double& value, Vec2& grad) const {
    if (!(x.norm() < cell_.min_edge()))
        throw numeric_error("Rq: argument outside the principal cell");
    double spatial = 0.0;
    Vec2 g{0.0, 0.0};
    const int M = real_cutoff_;
    for (int z0 = -M; z0 <= M; ++z0) {
        for (int z1 = -M; z1 <= M; ++z1) {
            if (z0 == 0 && z1 == 0) continue;
            const Vec2 d{x.x - cell_.q(0) * z0, x.y - cell_.q(1) * z1};
            const double r2 = d.norm2();
            const double u = eta2_ * r2;
            if (u > u_max_) continue;
            spatial += expint_e1(u);
            g += (std::exp(-u) / (2.0 * kPi * r2)) * d;
        }
    }
    const double u = eta2_ * x.norm2();
    const double central =
        (kGamma + 2.0 * std::log(eta_)) / (4.0 * kPi) - e1_regular(u) / (4.0 * kPi);
    g += (-eta2_ / (2.0 * kPi) * expm1_ratio(u)) * x;
    double rv = 0.0;
    Vec2 rg{0.0, 0.0};
    for (const RecipTerm& t : recip_) {
        const double ang = t.k.dot(x);
        rv -= t.coef * std::cos(ang);
        rg += (t.coef * std::sin(ang)) * t.k;
    }
    value = central - spatial / (4.0 * kPi) + rv + const_term_;
    grad = g + rg;
}

double laplace_adjoint_kernel(const BoundaryGeometry& g, std::size_t i, std::size_t j) {
    if (i == j) return g.curvatures[i] / (4.0 * kPi);
    const Vec2 d = g.nodes[i] - g.nodes[j];
    return g.normals[i].dot(d) / (2.0 * kPi * d.norm2());
}

PeriodicLayerSum::PeriodicLayerSum(std::vector<Vec2> sources, std::vector<double> coeffs,
                                   const GreensEvaluator& ev)
    : ev_(ev), src_(std::move(sources)), coef_(std::move(coeffs)) {
    if (src_.size() != coef_.size())
        throw config_error("PeriodicLayerSum: sources/coefficients size mismatch");
    for (double c : coef_) csum_ += c;
    mom_cos_.resize(ev_.recip_.size());
    mom_sin_.resize(ev_.recip_.size());
    for (std::size_t r = 0; r < ev_.recip_.size(); ++r) {
        double mc = 0.0, ms = 0.0;
        const Vec2 k = ev_.recip_[r].k;
        for (std::size_t i = 0; i < src_.size(); ++i) {
            const double ang = k.dot(src_[i]);
            mc += coef_[i] * std::cos(ang);
            ms += coef_[i] * std::sin(ang);
        }
        mom_cos_[r] = mc;
        mom_sin_[r] = ms;
    }
}

double PeriodicLayerSum::value(Vec2 x) const {
    double spatial = 0.0;
    const int M = ev_.real_cutoff_;
    for (std::size_t i = 0; i < src_.size(); ++i) {
        const Vec2 dw = ev_.wrap(x - src_[i]);
        double s = 0.0;
        for (int z0 = -M; z0 <= M; ++z0) {
            for (int z1 = -M; z1 <= M; ++z1) {
                const Vec2 d{dw.x - ev_.cell_.q(0) * z0, dw.y - ev_.cell_.q(1) * z1};
                const double u = ev_.eta2_ * d.norm2();
                if (u > ev_.u_max_) continue;
                s += expint_e1(u);
            }
        }
        spatial += coef_[i] * s;
    }
    double recip = 0.0;
    for (std::size_t r = 0; r < ev_.recip_.size(); ++r) {
        const double ang = ev_.recip_[r].k.dot(x);
        recip -= ev_.recip_[r].coef * (std::cos(ang) * mom_cos_[r] + std::sin(ang) * mom_sin_[r]);
    }
    return -spatial / (4.0 * kPi) + recip + ev_.const_term_ * csum_;
}

Vec2 PeriodicLayerSum::gradient(Vec2 x) const {
    Vec2 g{0.0, 0.0};
    const int M = ev_.real_cutoff_;
    for (std::size_t i = 0; i < src_.size(); ++i) {
        const Vec2 dw = ev_.wrap(x - src_[i]);
        Vec2 gi{0.0, 0.0};
        for (int z0 = -M; z0 <= M; ++z0) {
            for (int z1 = -M; z1 <= M; ++z1) {
                const Vec2 d{dw.x - ev_.cell_.q(0) * z0, dw.y - ev_.cell_.q(1) * z1};
                const double r2 = d.norm2();
                const double u = ev_.eta2_ * r2;
                if (u > ev_.u_max_) continue;
                gi += (std::exp(-u) / (2.0 * kPi * r2)) * d;
            }
        }
        g += coef_[i] * gi;
    }
    for (std::size_t r = 0; r < ev_.recip_.size(); ++r) {
        const double ang = ev_.recip_[r].k.dot(x);
        g += (ev_.recip_[r].coef *
              (std::sin(ang) * mom_cos_[r] - std::cos(ang) * mom_sin_[r])) *
             ev_.recip_[r].k;
    }
    return g;
}

double gauss_periodic_residual(const BoundaryGeometry& bd, const GreensEvaluator& ev) {
    const std::size_t n = bd.size();
    const double target = 0.5 - bd.enclosed_measure / ev.cell().measure;
    double worst = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        double sum = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            double entry = laplace_adjoint_kernel(bd, i, j);
            entry += bd.normals[i].dot(ev.grad_Rq(bd.nodes[i] - bd.nodes[j]));
            sum += bd.weights[i] * entry;
        }
        worst = std::max(worst, std::abs(sum - target));
    }
    return worst;
}

} // namespace percond
