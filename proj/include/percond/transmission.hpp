#pragma once

#include <Eigen/Dense>
#include <optional>
#include <utility>
#include <vector>

#include "percond/bordered.hpp"
#include "percond/density.hpp"
#include "percond/geometry.hpp"
#include "percond/greens.hpp"
#include "percond/potentials.hpp"

namespace percond {

/// Interfacial resistivity law rho(eps) > 0 with a finite limit of
/// eps/rho(eps) as eps -> 0+.
///
/// Formats: power law rho = c * eps^a with a <= 1 (limit r* = 1/c for a = 1,
/// r* = 0 for a < 1), or a sampled table with a user-supplied r*.
struct RhoLaw {
    enum class Type { Power, Table };
    Type type{Type::Power};
    double c{1.0};
    double a{1.0};
    std::vector<double> eps_tab;
    std::vector<double> rho_tab;
    double r_star_table{0.0};

    double rho(double eps) const;
    double r_star() const;
    /// True when eps/rho(eps) extends real-analytically through eps = 0
    /// (power law with a in {0, 1}); series fitting requires this.
    bool analytic_eps_prime() const;
};

RhoLaw make_power_law(double c, double a);
RhoLaw make_table_law(std::vector<double> eps, std::vector<double> rho, double r_star);

/// Data of the transmission problem on the reference inclusion Omega:
/// conductivities, boundary data, resistivity law and the direction index j
/// of the imposed unit temperature jump.
struct ProblemData {
    BoundaryGeometry geometry;
    PeriodicCell cell;
    double lambda_plus{1.0};
    double lambda_minus{1.0};
    Density f; // zero-mean flux-jump datum
    Density g; // temperature-jump datum
    RhoLaw rho_law;
    int direction{1}; // j, 1-based
};

/// Validates invariants (positive conductivities, zero-mean f, direction in
/// range) and returns the assembled problem. f is projected onto the
/// discrete zero-mean subspace.
ProblemData make_problem(BoundaryGeometry geometry, PeriodicCell cell, double lambda_plus,
                         double lambda_minus, const Eigen::VectorXd& f_values,
                         const Eigen::VectorXd& g_values, RhoLaw law, int direction);

/// Zero-mean layer-density pair for one direction, tagged with where it came
/// from (the limiting eps = 0 solve or a finite-eps solve).
struct DensityPair {
    enum class Provenance { Limiting, FiniteEps };
    Density theta_i;
    Density theta_o;
    Provenance provenance{Provenance::Limiting};
};

/// Single-layer and adjoint double-layer blocks for one geometry, assembled
/// once and shared between operator builds.
struct BoundaryOperators {
    NystromBlock V;
    NystromBlock W;
};

BoundaryOperators make_boundary_operators(const BoundaryGeometry& g,
                                          RunMode mode = default_mode());

/// 2x2-block linear system A theta = b on the zero-mean subspace (before
/// bordering).
struct TransmissionSystem {
    Eigen::MatrixXd A11, A12, A21, A22;
    Eigen::VectorXd b1, b2;
    double eps{0.0};
    double eps_prime{0.0};
};

/// Operator K_gamma of the exterior transmission problem (blocks only, zero
/// right-hand side): row 1 the flux jump, row 2 the Robin-type jump with the
/// mean-subtracted single layers scaled by gamma >= 0.
TransmissionSystem assemble_K(const BoundaryGeometry& g, const BoundaryOperators& ops,
                              double lambda_plus, double lambda_minus, double gamma);

/// Operator M[eps, eps'] of the eps-dependent integral formulation, with the
/// right-hand side of the direction-j problem. The periodic-correction blocks
/// are always assembled; at eps = 0 their mean-subtracted contribution
/// vanishes on the zero-mean subspace and the system coincides with
/// K_{eps'}.
TransmissionSystem assemble_M(const BoundaryGeometry& g, const PeriodicCell& cell,
                              const GreensEvaluator& ev, const ProblemData& pd,
                              const BoundaryOperators& ops, double eps, double eps_prime,
                              const std::pair<NystromBlock, NystromBlock>* rblocks = nullptr);

/// Solution of the limiting (eps = 0) transmission problem for direction j.
struct LimitingSolution {
    Density theta_i, theta_o;
    Eigen::VectorXd u_plus_trace;  // trace of u~+_j, zero boundary mean
    Eigen::VectorXd u_minus_trace; // trace of u~-_j, zero boundary mean
    Eigen::VectorXd dnu_u_minus;   // exterior normal derivative (1/2 + W) theta_o
    double l_minus{0.0};           // value of u~-_j at infinity
    double mean_v_i{0.0}, mean_v_o{0.0};
    double cond{0.0}, mult_i{0.0}, mult_o{0.0};
    BoundaryGeometry geometry;
    int direction{1};

    DensityPair pair() const {
        return {theta_i, theta_o, DensityPair::Provenance::Limiting};
    }
    double u_plus(Vec2 t) const;  // t in cl(Omega)
    double u_minus(Vec2 t) const; // t exterior
    Vec2 grad_u_plus(Vec2 t) const;
    Vec2 grad_u_minus(Vec2 t) const;
};

LimitingSolution solve_limiting(const ProblemData& pd, const BoundaryOperators& ops);

/// Solution of the finite-eps problem for direction j, exposing the interior
/// and exterior temperature fields, the rescaled fields on the reference
/// boundary and the constant C-_j.
struct EpsSolution {
    Density theta_i, theta_o;
    double eps{0.0}, eps_prime{0.0}, rho_eps{0.0};
    Vec2 p;
    int direction{1};
    double C_minus{0.0};
    double mean_a{0.0}, mean_b{0.0}; // boundary means of (V + R(eps)) theta
    double mean_tj{0.0}, mean_g{0.0};
    Eigen::VectorXd a_nodes, b_nodes; // (V + R(eps)) theta at nodes
    Eigen::VectorXd dnu_u_plus_nodes, dnu_u_minus_nodes; // on the scaled boundary
    double cond{0.0}, mult_i{0.0}, mult_o{0.0};
    BoundaryGeometry geometry; // reference Omega
    BoundaryGeometry scaled;   // p + eps*Omega
    GreensEvaluator evaluator;

    DensityPair pair() const {
        return {theta_i, theta_o, DensityPair::Provenance::FiniteEps};
    }
    double u_plus(Vec2 x) const;
    double u_minus(Vec2 x) const;
    Vec2 grad_u_plus(Vec2 x) const;
    Vec2 grad_u_minus(Vec2 x) const;

    // Rescaled fields (independent of p).
    Eigen::VectorXd U_plus_nodes() const;
    Eigen::VectorXd V_minus_nodes() const;
    double U_plus(Vec2 t) const;  // t in cl(Omega), off-boundary
    double V_minus(Vec2 t) const; // t exterior to Omega, inside the annulus
    Eigen::VectorXd u_plus_trace() const;
    Eigen::VectorXd u_minus_trace() const;
};

EpsSolution solve_eps(const ProblemData& pd, const GreensEvaluator& ev, Vec2 p, double eps,
                      const BoundaryOperators& ops,
                      const std::pair<NystromBlock, NystromBlock>* rblocks = nullptr);

/// Operator J_gamma# of the periodic transmission problem on a boundary at
/// cell scale (blocks only). gamma# must be positive.
TransmissionSystem assemble_J(const BoundaryGeometry& bdQ, const GreensEvaluator& ev,
                              double lambda_plus, double lambda_minus, double gamma_sharp,
                              RunMode mode = default_mode());

/// Fields of the periodic transmission problem with data (Phi, Gamma, c):
/// flux jump Phi, Robin datum Gamma, prescribed boundary integral c of v+.
struct PeriodicDirectSolution {
    Density mu_i, mu_o;
    double gamma_sharp{0.0};
    double add_plus{0.0};  // constant completing v+ = Vq mu_i + add_plus
    double add_minus{0.0}; // constant completing v-, including the -(1/gamma#) mean Gamma shift
    double cond{0.0}, mult_i{0.0}, mult_o{0.0};
    BoundaryGeometry boundary;
    GreensEvaluator evaluator;

    double v_plus(Vec2 x) const;
    double v_minus(Vec2 x) const;
    Vec2 grad_v_plus(Vec2 x) const;
    Vec2 grad_v_minus(Vec2 x) const;
};

PeriodicDirectSolution solve_periodic_direct(const BoundaryGeometry& bdQ,
                                             const GreensEvaluator& ev, double lambda_plus,
                                             double lambda_minus, double gamma_sharp,
                                             const Eigen::VectorXd& Phi,
                                             const Eigen::VectorXd& Gamma, double c);

/// Rescaled interior/exterior fields U+_j, V-_j together with C-_j, plus the
/// annulus radius used for validity checks. V- is only ever integrated over
/// the reference boundary, so the radius affects nothing but admissibility.
struct RescaledFields {
    EpsSolution solution;
    double annulus_radius{0.0};
    double C_minus{0.0};
};

RescaledFields rescaled_fields(const ProblemData& pd, const GreensEvaluator& ev, double eps,
                               std::optional<Vec2> p = std::nullopt);

/// Far-field check of the dipole representation: the exterior field minus
/// its linear part and constant must match eps^n DSq(x - p) . moment up to
/// o(eps^n), with the moment computed from the limiting solution via the
/// exterior jump relation.
struct DipoleReport {
    Vec2 moment;
    double eps{0.0};
    std::vector<double> residuals;
    double max_residual{0.0};
    double max_residual_over_eps_n{0.0};
};

DipoleReport far_field_dipole_check(const ProblemData& pd, const GreensEvaluator& ev, Vec2 p,
                                    double eps, const std::vector<Vec2>& probes,
                                    const LimitingSolution& lim, const EpsSolution& sol);

} // namespace percond
