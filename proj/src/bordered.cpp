#include "percond/bordered.hpp"

#include <cmath>

#include "percond/errors.hpp"

namespace percond {

BorderedSolution solve_bordered(const Eigen::MatrixXd& A11, const Eigen::MatrixXd& A12,
                                const Eigen::MatrixXd& A21, const Eigen::MatrixXd& A22,
                                const Eigen::VectorXd& b1, const Eigen::VectorXd& b2,
                                const Eigen::VectorXd& w) {
    const Eigen::Index n = A11.rows();
    const Eigen::Index m = 2 * n + 2;
    Eigen::MatrixXd M = Eigen::MatrixXd::Zero(m, m);
    M.block(0, 0, n, n) = A11;
    M.block(0, n, n, n) = A12;
    M.block(n, 0, n, n) = A21;
    M.block(n, n, n, n) = A22;
    M.block(0, 2 * n, n, 1).setOnes();
    M.block(n, 2 * n + 1, n, 1).setOnes();
    M.block(2 * n, 0, 1, n) = w.transpose();
    M.block(2 * n + 1, n, 1, n) = w.transpose();

    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(m);
    rhs.segment(0, n) = b1;
    rhs.segment(n, n) = b2;

    Eigen::PartialPivLU<Eigen::MatrixXd> lu(M);
    const Eigen::VectorXd sol = lu.solve(rhs);
    const double rc = lu.rcond();

    BorderedSolution out;
    out.theta_i = sol.segment(0, n);
    out.theta_o = sol.segment(n, n);
    out.mult_i = sol(2 * n);
    out.mult_o = sol(2 * n + 1);
    out.cond = rc > 0.0 ? 1.0 / rc : std::numeric_limits<double>::infinity();
    if (!sol.allFinite() || !(rc > 1e-15))
        throw numeric_error("bordered solve failed (condition estimate " +
                            std::to_string(out.cond) + ")");
    return out;
}

} // namespace percond
