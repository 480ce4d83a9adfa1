#pragma once

#include <cstddef>
#include <vector>

#include "percond/vec2.hpp"

namespace percond {

/// Rectangular periodicity cell Q = (0,q11) x (0,q22) with diagonal lattice
/// matrix q. Only n = 2 is instantiated; `dim` is carried so interfaces do
/// not change for a future n = 3 backend.
struct PeriodicCell {
    int dim{2};
    std::vector<double> q_diag; // cell edge lengths, all > 0
    double measure{0.0};       // |Q|_n, product of the edge lengths

    double q(int k) const { return q_diag[static_cast<std::size_t>(k)]; }
    double min_edge() const;
};

/// Builds a cell from edge lengths, checking positivity.
PeriodicCell make_cell(const std::vector<double>& q_diag);

/// Analytic description of the model boundary, kept alongside the sampled
/// geometry so a discretization can be refined exactly.
struct ShapeSpec {
    enum class Kind { Ellipse, Star };
    Kind kind{Kind::Ellipse};
    double a{1.0}, b{1.0};          // ellipse semi-axes
    double r0{1.0}, amp{0.0};       // star base radius and lobe amplitude
    int lobes{0};

    Vec2 point(double t) const;
    Vec2 derivative(double t) const;
    Vec2 second_derivative(double t) const;
    double curvature(double t) const;
    /// True if y lies strictly inside the shape scaled by `scale`.
    bool contains(Vec2 y, double scale = 1.0) const;
};

/// Discretized model boundary: images of the uniform parameter grid
/// t_i = 2*pi*i/N together with every per-node quantity the Nystrom
/// quadrature needs. Immutable after construction; safe to share across
/// threads.
struct BoundaryGeometry {
    int dim{2};
    std::size_t num_nodes{0};
    std::vector<double> params;      // t_i
    std::vector<Vec2> nodes;         // x(t_i)
    std::vector<Vec2> normals;       // outward unit normals
    std::vector<double> speeds;      // |x'(t_i)|
    std::vector<double> curvatures;  // signed curvature, > 0 for convex ccw
    std::vector<double> weights;     // w_i = (2*pi/N) * speed_i
    double enclosed_measure{0.0};    // |Omega|_n
    double perimeter{0.0};           // |dOmega|_{n-1}
    bool contains_origin{false};
    ShapeSpec spec;                  // generator, used for exact refinement

    std::size_t size() const { return num_nodes; }
    /// Axis-aligned bounding box over the nodes: {min, max}.
    void bounding_box(Vec2& lo, Vec2& hi) const;
    double diameter_bound() const; // bbox diagonal, >= true diameter
    double max_radius() const;     // max_i |x_i|
};

/// Boundary of the ellipse (a cos t, b sin t), counterclockwise.
/// Requires a, b > 0 and even N >= 8. Enclosed measure is pi*a*b.
BoundaryGeometry make_ellipse(double a, double b, std::size_t N);

/// Smooth star-like curve with polar radius r(t) = r0 + amp*cos(lobes*t).
/// Requires 0 <= amp < r0 (radius stays positive) and even N >= 8.
BoundaryGeometry make_smooth_star(double r0, double amp, int lobes, std::size_t N);

/// Re-samples the analytic parametrization on M nodes.
BoundaryGeometry make_geometry(const ShapeSpec& spec, std::size_t N);

/// Geometry of p + eps*Omega sampled on the same parameter grid. Normals are
/// unchanged, speeds/weights scale by eps, curvatures by 1/eps. The copy does
/// not contain the origin in general and skips that check.
BoundaryGeometry scaled_copy(const BoundaryGeometry& g, Vec2 p, double eps);

/// Handle for the inclusion Omega_{p,eps} = p + eps*Omega placed in a cell.
struct ScaledInclusion {
    Vec2 center;
    double eps{0.0};
    double eps0{0.0}; // sup of admissible scales for this (p, Omega, Q)
    const BoundaryGeometry* geometry{nullptr};
};

/// Largest scale for which p + eps*bbox(Omega) stays inside Q (conservative).
double admissible_scale(const BoundaryGeometry& g, Vec2 p, const PeriodicCell& cell);

/// Validates p strictly inside Q and |eps| < eps0; throws config_error
/// naming the containment constraint otherwise.
ScaledInclusion validate_scaled(Vec2 p, double eps, const BoundaryGeometry& g,
                                const PeriodicCell& cell);

} // namespace percond
