#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "percond/config.hpp"
#include "percond/effective.hpp"
#include "percond/transmission.hpp"

namespace percond {

/// One validation check with its measured residual and the tolerance it was
/// held to (tolerances follow a documented schedule in the node count N).
struct CheckResult {
    std::string name;
    double residual{0.0};
    double tolerance{0.0};
    bool pass{false};
    std::string detail;
};

/// Polynomial (Neville) extrapolation of samples f(h_k) to h = 0.
double richardson_extrapolate(const std::vector<double>& h, const std::vector<double>& f);

/// Max mismatch between extrapolated off-boundary normal derivatives of the
/// simple layer and the on-boundary Nystrom values -mu/2 + W mu (interior)
/// and +mu/2 + W mu (exterior), over `sample_stride`-spaced nodes.
double jump_relation_residual(const BoundaryGeometry& g, const TrigPoly& density,
                              const Eigen::MatrixXd& W, std::size_t sample_stride = 8);

/// Max 5-point FD-Laplacian deviation of Sq from -1/|Q|, relative, over
/// seeded off-lattice points.
double fd_laplacian_residual(const GreensEvaluator& ev, int npoints, std::uint64_t seed);

/// Max |Sq| disagreement over seeded points between Ewald parameters
/// eta*/2, eta*, 2 eta*.
double eta_robustness_residual(const PeriodicCell& cell, double tol, int npoints,
                               std::uint64_t seed);

/// Max field mismatch at seeded probe points between the fixed-boundary
/// (operator M) route and the scaled-domain (operator J) route.
double route_equivalence_residual(const ProblemData& pd, const GreensEvaluator& ev, Vec2 p,
                                  double eps, int nprobes, std::uint64_t seed);

/// Independent closed-form solution of the limiting disk problem with
/// f = g = 0: interior field A t_j, exterior field B t_j/|t|^2.
void disk_dipole_oracle(double lambda_plus, double lambda_minus, double r_star, double& A,
                        double& B);

/// Residual of the periodic Gauss identity computed from assembled blocks
/// (so the fault-injection hook on the W diagonal flows through).
double gauss_residual_from_blocks(const BoundaryGeometry& scaled, const GreensEvaluator& ev,
                                  double perturb_w_diag);

/// The full identity suite behind `percond validate`.
std::vector<CheckResult> run_validation_suite(const RunConfig& cfg, const Instance& inst);

} // namespace percond
