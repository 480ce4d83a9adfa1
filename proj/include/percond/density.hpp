#pragma once

#include <Eigen/Dense>
#include <vector>

#include "percond/geometry.hpp"

namespace percond {

/// Nodal values of a boundary density on the parameter grid of a
/// BoundaryGeometry. `zero_mean` marks membership in the discrete analogue of
/// the zero-integral subspace: sum_i w_i values_i = 0.
struct Density {
    Eigen::VectorXd values;
    bool zero_mean{false};
};

/// Weighted boundary integral sum_i w_i v_i.
double boundary_integral(const BoundaryGeometry& g, const Eigen::VectorXd& v);

/// Boundary mean (1/|dOmega|) sum_i w_i v_i.
double boundary_mean(const BoundaryGeometry& g, const Eigen::VectorXd& v);

/// Checks the zero-mean invariant |sum w v| <= 1e-12 * max(1, ||v||).
bool is_zero_mean(const BoundaryGeometry& g, const Eigen::VectorXd& v);

/// Subtracts the weighted mean, returning a discretely zero-mean density.
Density project_zero_mean(const BoundaryGeometry& g, const Eigen::VectorXd& v);

/// Trigonometric polynomial in the boundary parameter:
/// p(t) = c0 + sum_k ccos[k-1] cos(k t) + csin[k-1] sin(k t).
struct TrigPoly {
    double c0{0.0};
    std::vector<double> ccos;
    std::vector<double> csin;

    double eval(double t) const;
    Eigen::VectorXd sample(const BoundaryGeometry& g) const;
};

/// Trigonometric interpolation of 2*pi-periodic nodal data onto a finer
/// uniform grid of size M (M >= N, both even). Exact for band-limited data.
Eigen::VectorXd trig_upsample(const Eigen::VectorXd& values, std::size_t M);

/// Spectral derivative d/dt of periodic nodal data on its own grid.
Eigen::VectorXd trig_derivative(const Eigen::VectorXd& values);

} // namespace percond
