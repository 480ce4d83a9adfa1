#pragma once

#include <Eigen/Dense>

namespace percond {

/// Solution of a 2x2-block Nystrom system with zero-mean constraints
/// enforced by bordering (Lagrange multipliers), keeping the system square.
/// The multipliers must vanish within quadrature tolerance when the
/// right-hand side is consistent; they are reported as a diagnostic.
struct BorderedSolution {
    Eigen::VectorXd theta_i;
    Eigen::VectorXd theta_o;
    double mult_i{0.0};
    double mult_o{0.0};
    double cond{0.0}; // 1-norm condition estimate of the bordered matrix
};

/// Solves
///   [A11 A12 | 1  0] [theta_i]   [b1]
///   [A21 A22 | 0  1] [theta_o] = [b2]
///   [ w^T 0  | 0  0] [mult_i ]   [0 ]
///   [ 0  w^T | 0  0] [mult_o ]   [0 ]
/// where w are the quadrature weights defining the discrete zero-mean
/// constraints. Throws numeric_error on singular or non-finite solves.
BorderedSolution solve_bordered(const Eigen::MatrixXd& A11, const Eigen::MatrixXd& A12,
                                const Eigen::MatrixXd& A21, const Eigen::MatrixXd& A22,
                                const Eigen::VectorXd& b1, const Eigen::VectorXd& b2,
                                const Eigen::VectorXd& w);

} // namespace percond
