#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <utility>

#include "percond/density.hpp"
#include "percond/geometry.hpp"
#include "percond/greens.hpp"
#include "percond/parallel.hpp"
#include "percond/vec2.hpp"

namespace percond {

/// Dense Nystrom discretization of one boundary integral operator.
struct NystromBlock {
    enum class Kind { SingleLayerV, AdjointDoubleW, PeriodicCorrectionR, PeriodicCorrectionDR };
    Eigen::MatrixXd matrix;
    Kind kind{Kind::SingleLayerV};
    double scale{0.0}; // eps for the periodic correction blocks
};

/// Quadrature weights for the 2*pi-periodic logarithmic kernel
/// log(4 sin^2((t - tau)/2)): entry d is the weight coupling nodes a circular
/// distance d apart on an N-point grid. Exact on trigonometric polynomials of
/// degree < N/2.
Eigen::VectorXd kress_log_weights(std::size_t N);

/// On-boundary single-layer matrix (V mu)(x_i) ~ int S2(x_i - y) mu dsigma,
/// assembled with the kernel-splitting trapezoidal rule: the log part gets
/// the exact periodic-log weights, the analytic remainder plain trapezoid.
NystromBlock assemble_V(const BoundaryGeometry& g, RunMode mode = default_mode());

/// Adjoint double-layer matrix (W mu)(x_i) ~ int nu(x_i).grad S2(x_i - y) mu dsigma.
/// The removable diagonal singularity is filled with the curvature limit;
/// the fill is validated by the Gauss-identity column sums, not assumed.
NystromBlock assemble_W(const BoundaryGeometry& g, RunMode mode = default_mode());

/// Trapezoid matrices for the smooth periodic-correction kernels
///   R_ij  = Rq(eps (x_i - x_j)) w_j,
///   DR_ij = grad Rq(eps (x_i - x_j)) . nu_i w_j.
/// Requires |eps| * diam(Omega) < min q_ii so arguments stay in the principal
/// cell.
std::pair<NystromBlock, NystromBlock> assemble_R_blocks(const BoundaryGeometry& g,
                                                        double eps,
                                                        const GreensEvaluator& ev,
                                                        RunMode mode = default_mode());

/// Weighted column sums sum_i w_i K*(x_i, x_j) of the adjoint kernel; the
/// classical Gauss identity makes each equal 1/2 up to quadrature error.
Eigen::VectorXd gauss_column_sums(const BoundaryGeometry& g);

/// Result of an off-boundary field evaluation. `near_boundary` flags targets
/// closer to the discretized boundary than one node spacing, where plain
/// quadrature loses accuracy; the value is still returned.
struct FieldValue {
    double value{0.0};
    Vec2 gradient{0.0, 0.0};
    bool near_boundary{false};
};

/// Classical simple layer v[dOmega, mu](x) and gradient by plain quadrature.
FieldValue eval_single_layer(const BoundaryGeometry& g, const Eigen::VectorXd& mu, Vec2 x);

/// Periodic simple layer over a boundary on cell scale:
/// v_q[dOmega_Q, mu](x) = sum_i w_i Sq(x - y_i) mu_i, with gradient.
FieldValue eval_periodic_layer(const BoundaryGeometry& bd, const Eigen::VectorXd& mu,
                               const GreensEvaluator& ev, Vec2 x);

/// Convolution with the regular part on the reference boundary:
/// sum_i w_i Rq(eps (t - x_i)) mu_i and its gradient in t (times eps).
FieldValue eval_R_convolution(const BoundaryGeometry& g, const Eigen::VectorXd& mu,
                              const GreensEvaluator& ev, double eps, Vec2 t);

/// Exact re-sampling of a geometry and trig-interpolated density onto M
/// nodes; used for high-accuracy evaluation near the boundary.
std::pair<BoundaryGeometry, Eigen::VectorXd> refine(const BoundaryGeometry& g,
                                                    const Eigen::VectorXd& mu,
                                                    std::size_t M);

/// Batched field evaluation with deterministic chunking (results identical
/// for serial and parallel runs).
void eval_periodic_layer_batch(const BoundaryGeometry& bd, const Eigen::VectorXd& mu,
                               const GreensEvaluator& ev, const std::vector<Vec2>& targets,
                               std::vector<FieldValue>& out, RunMode mode = default_mode());

} // namespace percond
