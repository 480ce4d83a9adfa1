#include "percond/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "percond/errors.hpp"

namespace percond {

namespace {
constexpr double kPi = std::numbers::pi;
}

double PeriodicCell::min_edge() const {
    double m = std::numeric_limits<double>::infinity();
    for (double q : q_diag) m = std::min(m, q);
    return m;
}

PeriodicCell make_cell(const std::vector<double>& q_diag) {
    if (q_diag.size() != 2)
        throw config_error("cell: exactly two edge lengths expected");
    PeriodicCell c;
    c.dim = 2;
    c.q_diag = q_diag;
    c.measure = 1.0;
    for (double q : q_diag) {
        if (!(q > 0.0)) throw config_error("cell: edge lengths must be positive");
        c.measure *= q;
    }
    return c;
}

Vec2 ShapeSpec::point(double t) const {
    switch (kind) {
    case Kind::Ellipse:
        return {a * std::cos(t), b * std::sin(t)};
    case Kind::Star: {
        const double r = r0 + amp * std::cos(lobes * t);
        return {r * std::cos(t), r * std::sin(t)};
    }
    }
    return {};
}

Vec2 ShapeSpec::derivative(double t) const {
    switch (kind) {
    case Kind::Ellipse:
        return {-a * std::sin(t), b * std::cos(t)};
    case Kind::Star: {
        const double r = r0 + amp * std::cos(lobes * t);
        const double dr = -amp * lobes * std::sin(lobes * t);
        return {dr * std::cos(t) - r * std::sin(t), dr * std::sin(t) + r * std::cos(t)};
    }
    }
    return {};
}

Vec2 ShapeSpec::second_derivative(double t) const {
    switch (kind) {
    case Kind::Ellipse:
        return {-a * std::cos(t), -b * std::sin(t)};
    case Kind::Star: {
        const double r = r0 + amp * std::cos(lobes * t);
        const double dr = -amp * lobes * std::sin(lobes * t);
        const double ddr = -amp * lobes * lobes * std::cos(lobes * t);
        return {ddr * std::cos(t) - 2.0 * dr * std::sin(t) - r * std::cos(t),
                ddr * std::sin(t) + 2.0 * dr * std::cos(t) - r * std::sin(t)};
    }
    }
    return {};
}

double ShapeSpec::curvature(double t) const {
    const Vec2 d = derivative(t);
    const Vec2 dd = second_derivative(t);
    const double sp = d.norm();
    return d.cross(dd) / (sp * sp * sp);
}

bool ShapeSpec::contains(Vec2 y, double scale) const {
    switch (kind) {
    case Kind::Ellipse: {
        const double u = y.x / (scale * a);
        const double v = y.y / (scale * b);
        return u * u + v * v < 1.0;
    }
    case Kind::Star: {
        const double rr = y.norm();
        if (rr == 0.0) return true;
        const double t = std::atan2(y.y, y.x);
        return rr < scale * (r0 + amp * std::cos(lobes * t));
    }
    }
    return false;
}

void BoundaryGeometry::bounding_box(Vec2& lo, Vec2& hi) const {
    lo = {std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()};
    hi = {-lo.x, -lo.y};
    for (const Vec2& v : nodes) {
        lo.x = std::min(lo.x, v.x);
        lo.y = std::min(lo.y, v.y);
        hi.x = std::max(hi.x, v.x);
        hi.y = std::max(hi.y, v.y);
    }
}

double BoundaryGeometry::diameter_bound() const {
    Vec2 lo, hi;
    bounding_box(lo, hi);
    return (hi - lo).norm();
}

double BoundaryGeometry::max_radius() const {
    double m = 0.0;
    for (const Vec2& v : nodes) m = std::max(m, v.norm());
    return m;
}

namespace {

BoundaryGeometry sample(const ShapeSpec& spec, std::size_t N) {
    if (N < 8 || N % 2 != 0)
        throw config_error("boundary: node count N must be even and >= 8");
    BoundaryGeometry g;
    g.spec = spec;
    g.num_nodes = N;
    g.params.resize(N);
    g.nodes.resize(N);
    g.normals.resize(N);
    g.speeds.resize(N);
    g.curvatures.resize(N);
    g.weights.resize(N);

    const double h = 2.0 * kPi / static_cast<double>(N);
    double area2 = 0.0;    // 2*area via the shoelace integrand x cross x'
    double winding = 0.0;  // angle swept around the origin
    for (std::size_t i = 0; i < N; ++i) {
        const double t = h * static_cast<double>(i);
        const Vec2 x = spec.point(t);
        const Vec2 d = spec.derivative(t);
        const double sp = d.norm();
        if (!(sp > 0.0)) throw config_error("boundary: degenerate parametrization");
        g.params[i] = t;
        g.nodes[i] = x;
        g.speeds[i] = sp;
        // outward normal of a counterclockwise curve: rotate the tangent by -pi/2
        g.normals[i] = Vec2{d.y, -d.x} / sp;
        g.curvatures[i] = spec.curvature(t);
        g.weights[i] = h * sp;
        area2 += h * x.cross(d);
    }
    for (std::size_t i = 0; i < N; ++i) {
        const Vec2 v0 = g.nodes[i];
        const Vec2 v1 = g.nodes[(i + 1) % N];
        winding += std::atan2(v0.cross(v1), v0.dot(v1));
    }
    g.enclosed_measure = 0.5 * area2;
    if (!(g.enclosed_measure > 0.0))
        throw config_error("boundary: orientation must be counterclockwise");
    g.perimeter = 0.0;
    for (double w : g.weights) g.perimeter += w;
    g.contains_origin = std::abs(winding - 2.0 * kPi) < 1e-8;

    // closed-curve identity: the weighted normals must cancel
    double nx = 0.0, ny = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
        nx += g.weights[i] * g.normals[i].x;
        ny += g.weights[i] * g.normals[i].y;
    }
    if (std::max(std::abs(nx), std::abs(ny)) >
        1e-11 * static_cast<double>(N) * std::max(1.0, g.perimeter))
        throw config_error("boundary: discrete normal-closure identity violated");
    return g;
}

} // namespace

BoundaryGeometry make_ellipse(double a, double b, std::size_t N) {
    if (!(a > 0.0) || !(b > 0.0))
        throw config_error("ellipse: semi-axes must be positive");
    ShapeSpec s;
    s.kind = ShapeSpec::Kind::Ellipse;
    s.a = a;
    s.b = b;
    BoundaryGeometry g = sample(s, N);
    g.enclosed_measure = kPi * a * b; // analytic value; quadrature agrees spectrally
    return g;
}

BoundaryGeometry make_smooth_star(double r0, double amp, int lobes, std::size_t N) {
    if (!(r0 > 0.0) || amp < 0.0 || amp >= r0)
        throw config_error("star: require 0 <= amp < r0");
    if (lobes < 0) throw config_error("star: lobes must be >= 0");
    ShapeSpec s;
    s.kind = ShapeSpec::Kind::Star;
    s.r0 = r0;
    s.amp = amp;
    s.lobes = lobes;
    BoundaryGeometry g = sample(s, N);
    if (!g.contains_origin) throw config_error("star: boundary must enclose the origin");
    return g;
}

BoundaryGeometry make_geometry(const ShapeSpec& spec, std::size_t N) {
    switch (spec.kind) {
    case ShapeSpec::Kind::Ellipse:
        return make_ellipse(spec.a, spec.b, N);
    case ShapeSpec::Kind::Star:
        return make_smooth_star(spec.r0, spec.amp, spec.lobes, N);
    }
    throw config_error("unknown shape");
}

BoundaryGeometry scaled_copy(const BoundaryGeometry& g, Vec2 p, double eps) {
    if (!(eps > 0.0)) throw config_error("scaled_copy: eps must be positive");
    BoundaryGeometry s = g;
    for (std::size_t i = 0; i < g.num_nodes; ++i) {
        s.nodes[i] = p + eps * g.nodes[i];
        s.speeds[i] = eps * g.speeds[i];
        s.curvatures[i] = g.curvatures[i] / eps;
        s.weights[i] = eps * g.weights[i];
    }
    s.enclosed_measure = eps * eps * g.enclosed_measure;
    s.perimeter = eps * g.perimeter;
    s.contains_origin = false;
    return s;
}

double admissible_scale(const BoundaryGeometry& g, Vec2 p, const PeriodicCell& cell) {
    Vec2 lo, hi;
    g.bounding_box(lo, hi);
    double eps0 = std::numeric_limits<double>::infinity();
    const double lov[2] = {lo.x, lo.y};
    const double hiv[2] = {hi.x, hi.y};
    const double pv[2] = {p.x, p.y};
    for (int k = 0; k < 2; ++k) {
        if (hiv[k] > 0.0) eps0 = std::min(eps0, (cell.q(k) - pv[k]) / hiv[k]);
        if (lov[k] < 0.0) eps0 = std::min(eps0, pv[k] / (-lov[k]));
    }
    return eps0;
}

ScaledInclusion validate_scaled(Vec2 p, double eps, const BoundaryGeometry& g,
                                const PeriodicCell& cell) {
    if (!(p.x > 0.0 && p.x < cell.q(0) && p.y > 0.0 && p.y < cell.q(1)))
        throw config_error("inclusion center p must lie strictly inside the cell");
    const double eps0 = admissible_scale(g, p, cell);
    if (!(std::abs(eps) < eps0))
        throw config_error(
            "scaled inclusion violates the containment constraint: p + eps*cl(Omega) "
            "must stay strictly inside the cell (|eps| = " + std::to_string(eps) +
            " >= eps0 = " + std::to_string(eps0) + ")");
    ScaledInclusion inc;
    inc.center = p;
    inc.eps = eps;
    inc.eps0 = eps0;
    inc.geometry = &g;
    return inc;
}

} // namespace percond
