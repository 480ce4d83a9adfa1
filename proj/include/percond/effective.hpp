#pragma once

#include <Eigen/Dense>
#include <array>
#include <vector>

#include "percond/transmission.hpp"

namespace percond {

/// Effective conductivity at one eps, decomposed exactly as
///   lambda_eff_kj = lambda_minus delta_kj + eps^n Lambda_kj,
///   Lambda = lambda_plus Lambda_plus + lambda_minus Lambda_minus + f_term.
/// Only the columns in `has_column` are populated (one solve per direction).
struct EffectiveResult {
    double eps{0.0};
    double eps_prime{0.0};
    Eigen::Matrix2d lambda_eff = Eigen::Matrix2d::Zero();
    Eigen::Matrix2d Lambda = Eigen::Matrix2d::Zero();
    Eigen::Matrix2d Lambda_plus = Eigen::Matrix2d::Zero();
    Eigen::Matrix2d Lambda_minus = Eigen::Matrix2d::Zero();
    Eigen::Matrix2d f_term = Eigen::Matrix2d::Zero();
    std::array<bool, 2> has_column{false, false};
    std::array<double, 2> cond{0.0, 0.0};
    std::array<double, 2> max_multiplier{0.0, 0.0};
};

/// Boundary-formula route: quadrature of U+_j nu_k and V-_j nu_k over the
/// reference boundary for each requested direction j.
EffectiveResult lambda_eff(const ProblemData& pd, const GreensEvaluator& ev, Vec2 p,
                           double eps, const std::vector<int>& directions,
                           const BoundaryOperators& ops);

/// Limit matrix Lambda[0, r*] computed from the limiting solution's boundary
/// traces only; columns for the requested directions.
Eigen::Matrix2d lambda_limit(const ProblemData& pd, const std::vector<int>& directions,
                             const BoundaryOperators& ops,
                             std::array<bool, 2>* has_column = nullptr);

/// Direct volume-quadrature route for the defining cell averages, used as a
/// low-accuracy cross-check of the boundary formulas. `grid_n` is the tensor
/// grid resolution over the cell.
struct VolumeCheckResult {
    Eigen::Matrix2d lambda_eff = Eigen::Matrix2d::Zero();
    std::array<bool, 2> has_column{false, false};
    double error_estimate{0.0};
};

VolumeCheckResult lambda_eff_volume_check(const ProblemData& pd, const GreensEvaluator& ev,
                                          Vec2 p, double eps,
                                          const std::vector<int>& directions,
                                          const BoundaryOperators& ops, int grid_n = 200,
                                          RunMode mode = default_mode());

} // namespace percond
