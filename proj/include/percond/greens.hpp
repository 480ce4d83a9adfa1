#pragma once

#include <cstddef>
#include <vector>

#include "percond/geometry.hpp"
#include "percond/vec2.hpp"

namespace percond {

/// Free-space fundamental solution of the Laplacian in the plane,
/// S2(x) = log|x| / (2*pi), and its gradient x / (2*pi*|x|^2).
double S2(Vec2 x);
Vec2 grad_S2(Vec2 x);

/// Evaluates the q-periodic analogue Sq of S2, its regular part
/// Rq = Sq - S2, and their gradients.
///
/// Sq solves  Delta Sq = sum_z delta_{qz} - 1/|Q|  and is normalized to zero
/// cell mean (no constant Fourier mode). The lattice sum is evaluated by
/// Ewald splitting: Gaussian-screened spatial images plus a damped reciprocal
/// sum, both truncated adaptively so the neglected tail is below `tol`.
/// Rq is obtained by excluding the central image from the spatial sum and
/// adding the exact screened-log limit, which is smooth through x = 0.
///
/// Immutable after construction; evaluation is pure and thread-safe.
class GreensEvaluator {
public:
    explicit GreensEvaluator(const PeriodicCell& cell, double tol = 1e-13,
                             double eta = 0.0 /* 0 = autotune */);

    double Sq(Vec2 x) const;
    Vec2 grad_Sq(Vec2 x) const;

    /// Regular part; requires |x| < min q_ii so the subtracted singularity is
    /// the nearest lattice image.
    double Rq(Vec2 x) const;
    Vec2 grad_Rq(Vec2 x) const;
    /// Value and gradient of Rq in one pass over the lattice sums.
    void Rq_and_grad(Vec2 x, double& value, Vec2& grad) const;

    const PeriodicCell& cell() const { return cell_; }
    double eta() const { return eta_; }
    double tolerance() const { return tol_; }
    int real_cutoff() const { return real_cutoff_; }
    int recip_cutoff() const { return recip_cutoff_; }

    /// Wraps x into the centered cell [-q/2, q/2)^2.
    Vec2 wrap(Vec2 x) const;

private:
    friend class PeriodicLayerSum;
    PeriodicCell cell_;
    double tol_;
    double eta_;
    double eta2_;
    double u_max_;        // screened spatial terms with eta^2 r^2 > u_max are dropped
    int real_cutoff_;     // spatial image index range per axis
    int recip_cutoff_;    // reciprocal index range per axis
    double const_term_;   // zero-mean normalization constant 1/(4 eta^2 |Q|)
    struct RecipTerm {
        Vec2 k;
        double coef; // exp(-|k|^2/(4 eta^2)) / (|Q| |k|^2)
    };
    std::vector<RecipTerm> recip_;

    double recip_value(Vec2 x) const;
    Vec2 recip_grad(Vec2 x) const;
};

/// Fixed linear combination sum_i c_i Sq(x - y_i) of periodic fundamental
/// solutions, optimized for many evaluation points: the reciprocal sums
/// collapse onto precomputed source moments, so their cost per target is
/// independent of the number of sources.
class PeriodicLayerSum {
public:
    PeriodicLayerSum(std::vector<Vec2> sources, std::vector<double> coeffs,
                     const GreensEvaluator& ev);

    /// Evaluation requires x off the source lattice (no self-term handling).
    double value(Vec2 x) const;
    Vec2 gradient(Vec2 x) const;

private:
    GreensEvaluator ev_;
    std::vector<Vec2> src_;
    std::vector<double> coef_;
    double csum_{0.0};
    std::vector<double> mom_cos_; // per recip term: sum_i c_i cos(k.y_i)
    std::vector<double> mom_sin_; // per recip term: sum_i c_i sin(k.y_i)
};

/// Adjoint double-layer kernel entry nu(x_i) . grad S2(x_i - x_j) / speed
/// conventions of the Nystrom rule: the removable diagonal singularity is
/// filled with the curvature limit kappa_i/(4*pi).
double laplace_adjoint_kernel(const BoundaryGeometry& g, std::size_t i, std::size_t j);

/// Residual of the periodic Gauss identity on a boundary inside the cell:
/// max over boundary nodes y of
///   | quadrature_x( d/dnu(x) Sq(y - x) ) - (1/2 - |Omega_Q|/|Q|) |,
/// with the singular node handled by the same Nystrom rule used for the
/// adjoint double layer. The identity itself is exact; the residual measures
/// discretization error.
double gauss_periodic_residual(const BoundaryGeometry& scaled_boundary,
                               const GreensEvaluator& ev);

} // namespace percond
