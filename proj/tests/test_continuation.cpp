#include <doctest.h>

#include <cmath>
#include <numbers>

#include "percond/continuation.hpp"
#include "percond/errors.hpp"

using namespace percond;

namespace {
constexpr double kPi = std::numbers::pi;

ProblemData disk_problem(std::size_t N, RhoLaw law) {
    const auto disk = make_ellipse(1.0, 1.0, N);
    const auto cell = make_cell({1.0, 1.0});
    const Eigen::VectorXd zero = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(N));
    return make_problem(disk, cell, 2.0, 1.0, zero, zero, std::move(law), 1);
}

SweepRecord synthetic_record(const std::vector<double>& eps, double L0, double a,
                             double power) {
    // lambda_eff = lambda_minus + eps^2 L0 + a eps^power on the diagonal
    SweepRecord rec;
    rec.rho_law = make_power_law(1.0, 1.0);
    rec.directions = {1};
    for (double e : eps) {
        SweepEntry entry;
        entry.eps = e;
        entry.ok = true;
        entry.result.eps = e;
        entry.result.has_column = {true, false};
        entry.result.Lambda(0, 0) = L0 + a * std::pow(e, power - 2.0);
        entry.result.lambda_eff(0, 0) = 1.0 + e * e * entry.result.Lambda(0, 0);
        rec.entries.push_back(entry);
    }
    return rec;
}
} // namespace

TEST_CASE("sweep over a decreasing grid with per-eps error isolation") {
    const auto pd = disk_problem(96, make_power_law(1.0, 1.0));
    const auto ops = make_boundary_operators(pd.geometry);
    const GreensEvaluator ev(pd.cell);
    // 0.49 is inside the containment bound but the matching annulus no
    // longer fits; the entry must fail without poisoning the rest
    const std::vector<double> grid{0.49, 0.2, 0.1, 0.05};
    const auto rec = sweep(pd, ev, {0.5, 0.5}, grid, {1}, ops);
    REQUIRE(rec.entries.size() == 4);
    CHECK(!rec.entries[0].ok);
    CHECK(!rec.entries[0].error.empty());
    for (std::size_t i = 1; i < 4; ++i) CHECK(rec.entries[i].ok);

    // values approach the limit monotonically
    const Eigen::Matrix2d L0 = lambda_limit(pd, {1}, ops);
    double prev = 1e9;
    for (std::size_t i = 1; i < 4; ++i) {
        const double diff = std::abs(rec.entries[i].result.Lambda(0, 0) - L0(0, 0));
        CHECK(diff < prev);
        prev = diff;
    }

    CHECK_THROWS_AS(sweep(pd, ev, {0.5, 0.5}, {}, {1}, ops), config_error);
    CHECK_THROWS_AS(sweep(pd, ev, {0.5, 0.5}, {0.1, 0.2}, {1}, ops), config_error);
}

TEST_CASE("series fit recovers the limit coefficient on the disk benchmark") {
    const auto pd = disk_problem(128, make_power_law(1.0, 1.0));
    const auto ops = make_boundary_operators(pd.geometry);
    const GreensEvaluator ev(pd.cell);
    const auto rec = sweep(pd, ev, {0.5, 0.5}, default_eps_grid(8), {1}, ops);
    const Eigen::Matrix2d L0 = lambda_limit(pd, {1}, ops);

    const SeriesFit fit = fit_series(rec, 1, 1, 4);
    CHECK(std::abs(fit.a0() - L0(0, 0)) <= 2.0 * std::max(fit.a0_stderr, 1e-10));
    CHECK(fit.cond < 1e6);
    // odd-power suppression with rho(eps) = eps: reported, not asserted
    MESSAGE("fitted linear coefficient (expected small): ", fit.coeffs[1]);

    // evaluation refuses extrapolation
    CHECK_THROWS_AS(fit.eval(0.5), config_error);
    CHECK(std::abs(fit.eval(rec.entries[2].eps) - rec.entries[2].result.Lambda(0, 0)) <
          10.0 * std::max(fit.residual_rms, 1e-12));
}

TEST_CASE("fit residual decreases with degree until the noise floor") {
    const auto pd = disk_problem(96, make_power_law(1.0, 1.0));
    const auto ops = make_boundary_operators(pd.geometry);
    const GreensEvaluator ev(pd.cell);
    const auto rec = sweep(pd, ev, {0.5, 0.5}, default_eps_grid(8), {1}, ops);
    double prev = 1e30;
    int knee = -1;
    for (int deg = 0; deg <= 5; ++deg) {
        const double rms = fit_series(rec, 1, 1, deg).residual_rms;
        if (rms > 0.5 * prev && knee < 0 && rms < 1e-10) knee = deg;
        if (rms > 1e-12) CHECK(rms < prev);
        prev = rms;
    }
    MESSAGE("residual knee at degree ", knee);
}

TEST_CASE("degree-0 fit reproduces a flat record exactly") {
    const auto rec = synthetic_record({0.2, 0.1, 0.05, 0.025}, -1.7, 0.0, 3.0);
    const SeriesFit fit = fit_series(rec, 1, 1, 0);
    CHECK(fit.a0() == doctest::Approx(-1.7).epsilon(1e-14));
    CHECK(fit.residual_rms < 1e-14);
}

TEST_CASE("series fit preconditions") {
    const auto rec = synthetic_record({0.2, 0.1, 0.05}, -1.0, 0.3, 3.0);
    CHECK_THROWS_AS(fit_series(rec, 1, 1, 2), config_error); // needs degree + 2 samples
    auto rec2 = rec;
    rec2.rho_law = make_power_law(1.0, 0.5); // eps/rho not analytic at 0
    CHECK_THROWS_AS(fit_series(rec2, 1, 1, 1), config_error);
}

TEST_CASE("order estimate on synthetic data with exact cubic remainder") {
    const auto rec =
        synthetic_record({0.2, 0.15, 0.1, 0.07, 0.05, 0.03}, -1.2566, 0.8, 3.0);
    const OrderEstimate est = order_estimate(rec, 1.0, -1.2566, 1, 1);
    CHECK(!est.saturated);
    CHECK(est.slope == doctest::Approx(3.0).epsilon(1e-2));
}

TEST_CASE("order estimate saturates at the noise floor") {
    const auto rec = synthetic_record({0.2, 0.1, 0.05}, -1.0, 0.0, 3.0);
    const OrderEstimate est = order_estimate(rec, 1.0, -1.0, 1, 1);
    CHECK(est.saturated);
}

TEST_CASE("remainder slope on the star shape") {
    const auto star = make_smooth_star(1.0, 0.3, 3, 128);
    const auto cell = make_cell({1.0, 1.0});
    const Eigen::VectorXd zero = Eigen::VectorXd::Zero(128);
    const auto pd =
        make_problem(star, cell, 2.0, 1.0, zero, zero, make_power_law(1.0, 1.0), 1);
    const auto ops = make_boundary_operators(star);
    const GreensEvaluator ev(cell);
    const auto rec = sweep(pd, ev, {0.5, 0.5}, {0.15, 0.106, 0.075, 0.053, 0.0375}, {1}, ops);
    const Eigen::Matrix2d L0 = lambda_limit(pd, {1}, ops);
    const OrderEstimate est = order_estimate(rec, 1.0, L0(0, 0), 1, 1);
    CHECK(!est.saturated);
    CHECK(est.slope >= 2.8);
}

TEST_CASE("default grid is geometric and decreasing") {
    const auto grid = default_eps_grid(8);
    REQUIRE(grid.size() == 8);
    CHECK(grid.front() == doctest::Approx(0.2));
    for (std::size_t i = 1; i < grid.size(); ++i) {
        CHECK(grid[i] < grid[i - 1]);
        CHECK(grid[i] / grid[i - 1] == doctest::Approx(std::pow(2.0, -0.5)).epsilon(1e-12));
    }
}
