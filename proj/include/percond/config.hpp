#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "percond/density.hpp"
#include "percond/geometry.hpp"
#include "percond/greens.hpp"
#include "percond/transmission.hpp"

namespace percond {

/// Parsed and schema-validated run configuration. Unknown keys anywhere in
/// the document are rejected.
struct RunConfig {
    ShapeSpec shape;
    std::size_t N{256};
    std::vector<double> cell_edges{1.0, 1.0};
    double lambda_plus{1.0};
    double lambda_minus{1.0};
    TrigPoly f, g;
    RhoLaw rho_law;
    std::optional<Vec2> p; // default: cell center
    std::vector<int> directions{1, 2};
    std::optional<double> eps;              // single-solve scale
    std::optional<std::vector<double>> eps_grid;
    int fit_degree{4};
    double greens_tol{1e-13};
    double ewald_eta{0.0}; // 0 = autotune
    std::uint64_t seed{12345};
    std::string out_dir{"."};
    double perturb_w_diag{0.0}; // fault-injection hook for the validate suite
    std::string fingerprint;    // hash of the canonical config text

    Vec2 center() const {
        return p.value_or(Vec2{0.5 * cell_edges[0], 0.5 * cell_edges[1]});
    }
};

RunConfig parse_config_text(const std::string& json_text);
RunConfig load_config(const std::string& path);

/// Concrete objects built from a config: geometry, cell, Green's evaluator
/// and the problem data (direction taken from `directions.front()`; callers
/// switch directions by copying the problem).
struct Instance {
    BoundaryGeometry geometry;
    PeriodicCell cell;
    GreensEvaluator evaluator;
    ProblemData problem;
};

Instance make_instance(const RunConfig& cfg);

} // namespace percond
