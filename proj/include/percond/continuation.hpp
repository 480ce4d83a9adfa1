#pragma once

#include <string>
#include <vector>

#include "percond/effective.hpp"

namespace percond {

/// One sweep point; failed entries keep their error message and leave the
/// rest of the sweep intact.
struct SweepEntry {
    double eps{0.0};
    bool ok{false};
    std::string error;
    EffectiveResult result;
};

/// Results of an eps sweep at fixed problem data, strictly decreasing eps.
struct SweepRecord {
    std::vector<SweepEntry> entries;
    RhoLaw rho_law;
    std::vector<int> directions;
    std::string fingerprint; // hash of the geometry/material configuration
};

SweepRecord sweep(const ProblemData& pd, const GreensEvaluator& ev, Vec2 p,
                  const std::vector<double>& eps_grid, const std::vector<int>& directions,
                  const BoundaryOperators& ops, const std::string& fingerprint = {});

/// Default geometric grid 0.2 * 2^{-k/2}, k = 0..n-1.
std::vector<double> default_eps_grid(int n = 8);

/// Least-squares polynomial fit of Lambda_kj[eps, eps/rho(eps)] in eps, in
/// the scaled variable eps/eps_max for conditioning. Refuses evaluation
/// outside the sampled range and requires a rho law whose eps/rho(eps) is
/// real-analytic at 0.
struct SeriesFit {
    int k{1}, j{1};
    int degree{0};
    std::vector<double> coeffs; // coefficients of eps^0 .. eps^degree
    double residual_rms{0.0};
    double a0_stderr{0.0}; // propagated uncertainty of the constant term;
                           // the raw RMS understates the extrapolation error
    double cond{0.0};      // condition estimate of the scaled Vandermonde
    double eps_min{0.0}, eps_max{0.0};

    double a0() const { return coeffs.empty() ? 0.0 : coeffs.front(); }
    double eval(double eps) const; // throws outside [eps_min, eps_max]
};

SeriesFit fit_series(const SweepRecord& rec, int k, int j, int degree);

/// Log-log regression slope of |lambda_eff_kj(eps) - lambda_minus delta_kj -
/// eps^n Lambda_kj[0, r*]| against eps. Remainders at the quadrature noise
/// floor are dropped; with fewer than 3 usable points the estimate reports
/// saturation.
struct OrderEstimate {
    double slope{0.0};
    bool saturated{false};
    int points_used{0};
    std::vector<double> remainders;
    std::vector<double> eps_used;
};

OrderEstimate order_estimate(const SweepRecord& rec, double lambda_minus,
                             double reference_limit, int k, int j);

} // namespace percond
