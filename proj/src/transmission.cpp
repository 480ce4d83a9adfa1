#include "percond/transmission.hpp"

#include <algorithm>
#include <cmath>

#include "percond/errors.hpp"

namespace percond {

namespace {

Eigen::VectorXd normal_component(const BoundaryGeometry& g, int j) {
    Eigen::VectorXd v(static_cast<Eigen::Index>(g.size()));
    for (std::size_t i = 0; i < g.size(); ++i)
        v[static_cast<Eigen::Index>(i)] = g.normals[i][j - 1];
    return v;
}

Eigen::VectorXd node_component(const BoundaryGeometry& g, int j) {
    Eigen::VectorXd v(static_cast<Eigen::Index>(g.size()));
    for (std::size_t i = 0; i < g.size(); ++i)
        v[static_cast<Eigen::Index>(i)] = g.nodes[i][j - 1];
    return v;
}

Eigen::VectorXd weight_vector(const BoundaryGeometry& g) {
    Eigen::VectorXd w(static_cast<Eigen::Index>(g.size()));
    for (std::size_t i = 0; i < g.size(); ++i) w[static_cast<Eigen::Index>(i)] = g.weights[i];
    return w;
}

/// Left-multiplies by the mean-subtraction projector P = I - 1 w^T / |dOmega|.
Eigen::MatrixXd mean_subtracted(const Eigen::MatrixXd& M, const Eigen::VectorXd& w,
                                double perimeter) {
    const Eigen::RowVectorXd colmeans = (w.transpose() * M) / perimeter;
    return M - Eigen::VectorXd::Ones(M.rows()) * colmeans;
}

} // namespace

double RhoLaw::rho(double eps) const {
    if (!(eps > 0.0)) throw config_error("rho law: eps must be positive");
    switch (type) {
    case Type::Power:
        return c * std::pow(eps, a);
    case Type::Table: {
        if (eps < eps_tab.front() || eps > eps_tab.back())
            throw config_error("rho table: eps outside the sampled range");
        auto hi = std::upper_bound(eps_tab.begin(), eps_tab.end(), eps);
        if (hi == eps_tab.begin()) return rho_tab.front();
        if (hi == eps_tab.end()) return rho_tab.back();
        const std::size_t i1 = static_cast<std::size_t>(hi - eps_tab.begin());
        const std::size_t i0 = i1 - 1;
        const double s = (eps - eps_tab[i0]) / (eps_tab[i1] - eps_tab[i0]);
        return (1.0 - s) * rho_tab[i0] + s * rho_tab[i1];
    }
    }
    throw config_error("rho law: unknown type");
}

double RhoLaw::r_star() const {
    switch (type) {
    case Type::Power:
        return a == 1.0 ? 1.0 / c : 0.0;
    case Type::Table:
        return r_star_table;
    }
    throw config_error("rho law: unknown type");
}

bool RhoLaw::analytic_eps_prime() const {
    return type == Type::Power && (a == 0.0 || a == 1.0);
}

RhoLaw make_power_law(double c, double a) {
    if (!(c > 0.0)) throw config_error("power rho law: c must be positive");
    if (!(a <= 1.0))
        throw config_error("power rho law: exponent a must satisfy a <= 1 so that "
                           "eps/rho(eps) has a finite limit");
    RhoLaw law;
    law.type = RhoLaw::Type::Power;
    law.c = c;
    law.a = a;
    return law;
}

RhoLaw make_table_law(std::vector<double> eps, std::vector<double> rho, double r_star) {
    if (eps.size() != rho.size() || eps.size() < 2)
        throw config_error("table rho law: need matching eps/rho samples (>= 2)");
    if (!std::is_sorted(eps.begin(), eps.end()))
        throw config_error("table rho law: eps samples must be increasing");
    for (std::size_t i = 0; i < eps.size(); ++i)
        if (!(eps[i] > 0.0) || !(rho[i] > 0.0))
            throw config_error("table rho law: eps and rho must be positive");
    if (!(r_star >= 0.0)) throw config_error("table rho law: r_star must be >= 0");
    RhoLaw law;
    law.type = RhoLaw::Type::Table;
    law.eps_tab = std::move(eps);
    law.rho_tab = std::move(rho);
    law.r_star_table = r_star;
    return law;
}

ProblemData make_problem(BoundaryGeometry geometry, PeriodicCell cell, double lambda_plus,
                         double lambda_minus, const Eigen::VectorXd& f_values,
                         const Eigen::VectorXd& g_values, RhoLaw law, int direction) {
    if (!(lambda_plus > 0.0) || !(lambda_minus > 0.0))
        throw config_error("conductivities lambda+/lambda- must be positive");
    if (direction < 1 || direction > geometry.dim)
        throw config_error("direction index out of range");
    if (f_values.size() != static_cast<Eigen::Index>(geometry.size()) ||
        g_values.size() != static_cast<Eigen::Index>(geometry.size()))
        throw config_error("boundary data size mismatch");
    if (!geometry.contains_origin)
        throw config_error("reference inclusion must contain the origin");
    if (!(law.r_star() >= 0.0)) throw config_error("rho law: r_star must be >= 0");
    ProblemData pd;
    pd.geometry = std::move(geometry);
    pd.cell = std::move(cell);
    pd.lambda_plus = lambda_plus;
    pd.lambda_minus = lambda_minus;
    // f must have zero boundary integral; the sampled data is projected onto
    // the discrete zero-mean subspace (a constant shift).
    pd.f = project_zero_mean(pd.geometry, f_values);
    pd.g.values = g_values;
    pd.g.zero_mean = false;
    pd.rho_law = std::move(law);
    pd.direction = direction;
    return pd;
}

BoundaryOperators make_boundary_operators(const BoundaryGeometry& g, RunMode mode) {
    return {assemble_V(g, mode), assemble_W(g, mode)};
}

TransmissionSystem assemble_K(const BoundaryGeometry& g, const BoundaryOperators& ops,
                              double lambda_plus, double lambda_minus, double gamma) {
    if (!(gamma >= 0.0)) throw config_error("assemble_K: gamma must be >= 0");
    const Eigen::Index n = ops.V.matrix.rows();
    const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(n, n);
    const Eigen::VectorXd w = weight_vector(g);
    const Eigen::MatrixXd PV = mean_subtracted(ops.V.matrix, w, g.perimeter);
    TransmissionSystem sys;
    sys.eps = 0.0;
    sys.eps_prime = gamma;
    sys.A11 = lambda_plus * (0.5 * I - ops.W.matrix);
    sys.A12 = lambda_minus * (0.5 * I + ops.W.matrix);
    sys.A21 = lambda_plus * (-0.5 * I + ops.W.matrix) + gamma * PV;
    sys.A22 = -gamma * PV;
    sys.b1 = Eigen::VectorXd::Zero(n);
    sys.b2 = Eigen::VectorXd::Zero(n);
    return sys;
}

TransmissionSystem assemble_M(const BoundaryGeometry& g, const PeriodicCell& cell,
                              const GreensEvaluator& ev, const ProblemData& pd,
                              const BoundaryOperators& ops, double eps, double eps_prime,
                              const std::pair<NystromBlock, NystromBlock>* rblocks) {
    if (!(std::abs(eps) * g.diameter_bound() < cell.min_edge()))
        throw config_error("assemble_M: inclusion too large for the cell at this eps");
    std::pair<NystromBlock, NystromBlock> local;
    if (rblocks == nullptr) {
        local = assemble_R_blocks(g, eps, ev);
        rblocks = &local;
    }
    const Eigen::Index n = ops.V.matrix.rows();
    const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(n, n);
    const Eigen::VectorXd w = weight_vector(g);
    // n = 2: the DR term carries eps^{n-1} = eps, the R term eps^{n-2} = 1.
    const Eigen::MatrixXd WD = ops.W.matrix + eps * rblocks->second.matrix;
    const Eigen::MatrixXd VR = ops.V.matrix + rblocks->first.matrix;
    const Eigen::MatrixXd PVR = mean_subtracted(VR, w, g.perimeter);
    const Eigen::VectorXd nu_j = normal_component(g, pd.direction);

    TransmissionSystem sys;
    sys.eps = eps;
    sys.eps_prime = eps_prime;
    sys.A11 = pd.lambda_plus * (0.5 * I - WD);
    sys.A12 = pd.lambda_minus * (0.5 * I + WD);
    sys.A21 = pd.lambda_plus * (-0.5 * I + WD) + eps_prime * PVR;
    sys.A22 = -eps_prime * PVR;
    sys.b1 = pd.f.values + (pd.lambda_plus - pd.lambda_minus) * nu_j;
    sys.b2 = pd.g.values.array() - boundary_mean(g, pd.g.values);
    sys.b2 -= pd.lambda_plus * nu_j;
    return sys;
}

LimitingSolution solve_limiting(const ProblemData& pd, const BoundaryOperators& ops) {
    const BoundaryGeometry& g = pd.geometry;
    const double rstar = pd.rho_law.r_star();
    TransmissionSystem sys = assemble_K(g, ops, pd.lambda_plus, pd.lambda_minus, rstar);
    const Eigen::VectorXd nu_j = normal_component(g, pd.direction);
    sys.b1 = pd.f.values + (pd.lambda_plus - pd.lambda_minus) * nu_j;
    sys.b2 = pd.g.values.array() - boundary_mean(g, pd.g.values);
    sys.b2 -= pd.lambda_plus * nu_j;

    const Eigen::VectorXd w = weight_vector(g);
    BorderedSolution bs = solve_bordered(sys.A11, sys.A12, sys.A21, sys.A22, sys.b1, sys.b2, w);

    LimitingSolution out;
    out.theta_i = {bs.theta_i, true};
    out.theta_o = {bs.theta_o, true};
    const Eigen::VectorXd vi = ops.V.matrix * bs.theta_i;
    const Eigen::VectorXd vo = ops.V.matrix * bs.theta_o;
    out.mean_v_i = boundary_mean(g, vi);
    out.mean_v_o = boundary_mean(g, vo);
    out.u_plus_trace = vi.array() - out.mean_v_i;
    out.u_minus_trace = vo.array() - out.mean_v_o;
    out.dnu_u_minus = 0.5 * bs.theta_o + ops.W.matrix * bs.theta_o;
    out.l_minus = -out.mean_v_o;
    out.cond = bs.cond;
    out.mult_i = bs.mult_i;
    out.mult_o = bs.mult_o;
    out.geometry = g;
    out.direction = pd.direction;
    return out;
}

double LimitingSolution::u_plus(Vec2 t) const {
    return eval_single_layer(geometry, theta_i.values, t).value - mean_v_i;
}

double LimitingSolution::u_minus(Vec2 t) const {
    return eval_single_layer(geometry, theta_o.values, t).value - mean_v_o;
}

Vec2 LimitingSolution::grad_u_plus(Vec2 t) const {
    return eval_single_layer(geometry, theta_i.values, t).gradient;
}

Vec2 LimitingSolution::grad_u_minus(Vec2 t) const {
    return eval_single_layer(geometry, theta_o.values, t).gradient;
}

EpsSolution solve_eps(const ProblemData& pd, const GreensEvaluator& ev, Vec2 p, double eps,
                      const BoundaryOperators& ops,
                      const std::pair<NystromBlock, NystromBlock>* rblocks) {
    const BoundaryGeometry& g = pd.geometry;
    validate_scaled(p, eps, g, pd.cell);
    if (!(eps > 0.0)) throw config_error("solve_eps: eps must be positive");
    const double rho = pd.rho_law.rho(eps);
    if (!(rho > 0.0)) throw config_error("solve_eps: rho(eps) must be positive");
    const double eps_prime = eps / rho;

    std::pair<NystromBlock, NystromBlock> local;
    if (rblocks == nullptr) {
        local = assemble_R_blocks(g, eps, ev);
        rblocks = &local;
    }
    TransmissionSystem sys = assemble_M(g, pd.cell, ev, pd, ops, eps, eps_prime, rblocks);
    const Eigen::VectorXd w = weight_vector(g);
    BorderedSolution bs = solve_bordered(sys.A11, sys.A12, sys.A21, sys.A22, sys.b1, sys.b2, w);

    EpsSolution out{.theta_i = {bs.theta_i, true},
                    .theta_o = {bs.theta_o, true},
                    .eps = eps,
                    .eps_prime = eps_prime,
                    .rho_eps = rho,
                    .p = p,
                    .direction = pd.direction,
                    .C_minus = 0.0,
                    .mean_a = 0.0,
                    .mean_b = 0.0,
                    .mean_tj = 0.0,
                    .mean_g = 0.0,
                    .a_nodes = {},
                    .b_nodes = {},
                    .dnu_u_plus_nodes = {},
                    .dnu_u_minus_nodes = {},
                    .cond = 0.0,
                    .mult_i = 0.0,
                    .mult_o = 0.0,
                    .geometry = g,
                    .scaled = scaled_copy(g, p, eps),
                    .evaluator = ev};
    const Eigen::MatrixXd VR = ops.V.matrix + rblocks->first.matrix;
    out.a_nodes = VR * bs.theta_i;
    out.b_nodes = VR * bs.theta_o;
    out.mean_a = boundary_mean(g, out.a_nodes);
    out.mean_b = boundary_mean(g, out.b_nodes);
    out.mean_tj = boundary_mean(g, node_component(g, pd.direction));
    out.mean_g = boundary_mean(g, pd.g.values);
    out.C_minus = -out.mean_g - eps_prime * (out.mean_b + out.mean_tj);
    const Eigen::MatrixXd WD = ops.W.matrix + eps * rblocks->second.matrix;
    const Eigen::VectorXd nu_j = normal_component(g, pd.direction);
    out.dnu_u_plus_nodes = -0.5 * bs.theta_i + WD * bs.theta_i + nu_j;
    out.dnu_u_minus_nodes = 0.5 * bs.theta_o + WD * bs.theta_o + nu_j;
    out.cond = bs.cond;
    out.mult_i = bs.mult_i;
    out.mult_o = bs.mult_o;
    return out;
}

double EpsSolution::u_plus(Vec2 x) const {
    const double layer = eval_periodic_layer(scaled, theta_i.values, evaluator, x).value;
    return layer - eps * mean_a + (x - p)[direction - 1] - eps * mean_tj;
}

double EpsSolution::u_minus(Vec2 x) const {
    const double layer = eval_periodic_layer(scaled, theta_o.values, evaluator, x).value;
    return layer + (x - p)[direction - 1] + rho_eps * C_minus;
}

Vec2 EpsSolution::grad_u_plus(Vec2 x) const {
    Vec2 grad = eval_periodic_layer(scaled, theta_i.values, evaluator, x).gradient;
    if (direction == 1) grad.x += 1.0; else grad.y += 1.0;
    return grad;
}

Vec2 EpsSolution::grad_u_minus(Vec2 x) const {
    Vec2 grad = eval_periodic_layer(scaled, theta_o.values, evaluator, x).gradient;
    if (direction == 1) grad.x += 1.0; else grad.y += 1.0;
    return grad;
}

Eigen::VectorXd EpsSolution::U_plus_nodes() const {
    Eigen::VectorXd tj = node_component(geometry, direction);
    return (a_nodes.array() - mean_a + tj.array() - mean_tj).matrix();
}

Eigen::VectorXd EpsSolution::V_minus_nodes() const {
    Eigen::VectorXd tj = node_component(geometry, direction);
    return b_nodes + tj;
}

double EpsSolution::U_plus(Vec2 t) const {
    const double v = eval_single_layer(geometry, theta_i.values, t).value +
                     eval_R_convolution(geometry, theta_i.values, evaluator, eps, t).value;
    return v - mean_a + t[direction - 1] - mean_tj;
}

double EpsSolution::V_minus(Vec2 t) const {
    const double v = eval_single_layer(geometry, theta_o.values, t).value +
                     eval_R_convolution(geometry, theta_o.values, evaluator, eps, t).value;
    return v + t[direction - 1];
}

Eigen::VectorXd EpsSolution::u_plus_trace() const { return eps * U_plus_nodes(); }

Eigen::VectorXd EpsSolution::u_minus_trace() const {
    return (rho_eps * C_minus + (eps * V_minus_nodes()).array()).matrix();
}

TransmissionSystem assemble_J(const BoundaryGeometry& bdQ, const GreensEvaluator& ev,
                              double lambda_plus, double lambda_minus, double gamma_sharp,
                              RunMode mode) {
    if (!(gamma_sharp > 0.0)) throw config_error("assemble_J: gamma# must be positive");
    const BoundaryOperators ops = make_boundary_operators(bdQ, mode);
    const auto rs = assemble_R_blocks(bdQ, 1.0, ev, mode);
    const Eigen::Index n = ops.V.matrix.rows();
    const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(n, n);
    const Eigen::MatrixXd Wq = ops.W.matrix + rs.second.matrix;
    const Eigen::MatrixXd Vq = ops.V.matrix + rs.first.matrix;
    const Eigen::VectorXd w = weight_vector(bdQ);
    const Eigen::MatrixXd PVq = mean_subtracted(Vq, w, bdQ.perimeter);
    TransmissionSystem sys;
    sys.eps_prime = gamma_sharp;
    sys.A11 = lambda_plus * (0.5 * I - Wq);
    sys.A12 = lambda_minus * (0.5 * I + Wq);
    sys.A21 = lambda_plus * (-0.5 * I + Wq) + gamma_sharp * PVq;
    sys.A22 = -gamma_sharp * PVq;
    sys.b1 = Eigen::VectorXd::Zero(n);
    sys.b2 = Eigen::VectorXd::Zero(n);
    return sys;
}

PeriodicDirectSolution solve_periodic_direct(const BoundaryGeometry& bdQ,
                                             const GreensEvaluator& ev, double lambda_plus,
                                             double lambda_minus, double gamma_sharp,
                                             const Eigen::VectorXd& Phi,
                                             const Eigen::VectorXd& Gamma, double c) {
    TransmissionSystem sys = assemble_J(bdQ, ev, lambda_plus, lambda_minus, gamma_sharp);
    const double mean_Gamma = boundary_mean(bdQ, Gamma);
    sys.b1 = Phi;
    sys.b2 = Gamma.array() - mean_Gamma;
    const Eigen::VectorXd w = weight_vector(bdQ);
    BorderedSolution bs = solve_bordered(sys.A11, sys.A12, sys.A21, sys.A22, sys.b1, sys.b2, w);

    // Trace means of the periodic single layer, needed for the Thm-style
    // reconstruction constants.
    const BoundaryOperators ops = make_boundary_operators(bdQ);
    const auto rs = assemble_R_blocks(bdQ, 1.0, ev);
    const Eigen::MatrixXd Vq = ops.V.matrix + rs.first.matrix;
    const double mean_vq_i = boundary_mean(bdQ, Vq * bs.theta_i);
    const double mean_vq_o = boundary_mean(bdQ, Vq * bs.theta_o);

    PeriodicDirectSolution out{.mu_i = {bs.theta_i, true},
                               .mu_o = {bs.theta_o, true},
                               .gamma_sharp = gamma_sharp,
                               .add_plus = -mean_vq_i + c / bdQ.perimeter,
                               .add_minus = -mean_vq_o + c / bdQ.perimeter -
                                            mean_Gamma / gamma_sharp,
                               .cond = bs.cond,
                               .mult_i = bs.mult_i,
                               .mult_o = bs.mult_o,
                               .boundary = bdQ,
                               .evaluator = ev};
    return out;
}

double PeriodicDirectSolution::v_plus(Vec2 x) const {
    return eval_periodic_layer(boundary, mu_i.values, evaluator, x).value + add_plus;
}

double PeriodicDirectSolution::v_minus(Vec2 x) const {
    return eval_periodic_layer(boundary, mu_o.values, evaluator, x).value + add_minus;
}

Vec2 PeriodicDirectSolution::grad_v_plus(Vec2 x) const {
    return eval_periodic_layer(boundary, mu_i.values, evaluator, x).gradient;
}

Vec2 PeriodicDirectSolution::grad_v_minus(Vec2 x) const {
    return eval_periodic_layer(boundary, mu_o.values, evaluator, x).gradient;
}

RescaledFields rescaled_fields(const ProblemData& pd, const GreensEvaluator& ev, double eps,
                               std::optional<Vec2> p_opt) {
    const Vec2 p = p_opt.value_or(Vec2{0.5 * pd.cell.q(0), 0.5 * pd.cell.q(1)});
    const double wall = std::min(std::min(p.x, pd.cell.q(0) - p.x),
                                 std::min(p.y, pd.cell.q(1) - p.y));
    const double radius = std::min(2.0 * pd.geometry.diameter_bound(), 0.95 * wall / eps);
    if (!(radius >= 1.2 * pd.geometry.max_radius()))
        throw config_error("rescaled_fields: annulus exits the cell after scaling "
                           "(eps too large)");
    const BoundaryOperators ops = make_boundary_operators(pd.geometry);
    RescaledFields out{.solution = solve_eps(pd, ev, p, eps, ops),
                       .annulus_radius = radius,
                       .C_minus = 0.0};
    out.C_minus = out.solution.C_minus;
    return out;
}

DipoleReport far_field_dipole_check(const ProblemData& pd, const GreensEvaluator& ev, Vec2 p,
                                    double eps, const std::vector<Vec2>& probes,
                                    const LimitingSolution& lim, const EpsSolution& sol) {
    const BoundaryGeometry& g = pd.geometry;
    // Dipole moment of the limiting exterior field; the normal derivative
    // comes from the exterior jump relation, not numerical differentiation.
    Vec2 moment{0.0, 0.0};
    for (std::size_t i = 0; i < g.size(); ++i) {
        const double wu = g.weights[i] * lim.u_minus_trace[static_cast<Eigen::Index>(i)];
        const double wd = g.weights[i] * lim.dnu_u_minus[static_cast<Eigen::Index>(i)];
        moment += wu * g.normals[i] - wd * g.nodes[i];
    }
    DipoleReport rep;
    rep.moment = moment;
    rep.eps = eps;
    const double epsn = eps * eps;
    for (const Vec2& x : probes) {
        const Vec2 rel = ev.wrap(x - p);
        if (rel.norm() < 0.05 * ev.cell().min_edge())
            throw config_error("far-field probe too close to the lattice singularities");
        const double u = sol.u_minus(x);
        const double dip = epsn * ev.grad_Sq(x - p).dot(moment);
        const double res = std::abs(u - (x - p)[pd.direction - 1] -
                                    sol.rho_eps * sol.C_minus - dip);
        rep.residuals.push_back(res);
        rep.max_residual = std::max(rep.max_residual, res);
    }
    rep.max_residual_over_eps_n = rep.max_residual / epsn;
    return rep;
}

} // namespace percond
