#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "percond/checks.hpp"
#include "percond/errors.hpp"
#include "percond/potentials.hpp"

using namespace percond;

namespace {
constexpr double kPi = std::numbers::pi;

TrigPoly random_trig(std::mt19937_64& rng, int degree) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    TrigPoly p;
    for (int k = 0; k < degree; ++k) {
        p.ccos.push_back(u(rng));
        p.csin.push_back(u(rng));
    }
    return p;
}
} // namespace

TEST_CASE("log-kernel weights integrate trigonometric polynomials exactly") {
    const std::size_t N = 32;
    const Eigen::VectorXd r = kress_log_weights(N);
    // f = 1 integrates to 0; f = cos integrates to -2 pi cos(t) at t = 0
    double s1 = 0.0, sc = 0.0;
    for (std::size_t j = 0; j < N; ++j) {
        s1 += r[static_cast<Eigen::Index>(j)];
        sc += r[static_cast<Eigen::Index>(j)] * std::cos(2.0 * kPi * j / N);
    }
    CHECK(std::abs(s1) < 1e-13);
    CHECK(sc == doctest::Approx(-2.0 * kPi).epsilon(1e-13));
}

TEST_CASE("single layer of the constant density on circles") {
    const Eigen::VectorXd one = Eigen::VectorXd::Ones(64);

    const auto unit = make_ellipse(1.0, 1.0, 64);
    const auto V1 = assemble_V(unit);
    CHECK((V1.matrix * one).cwiseAbs().maxCoeff() < 1e-10); // a log a = 0

    const auto two = make_ellipse(2.0, 2.0, 64);
    const auto V2 = assemble_V(two);
    CHECK(((V2.matrix * one).array() - 2.0 * std::log(2.0)).abs().maxCoeff() < 1e-10);

    CHECK((V1.matrix * Eigen::VectorXd::Zero(64)).norm() == 0.0);
}

TEST_CASE("single layer assembly requires an even grid") {
    CHECK_THROWS_AS(kress_log_weights(31), config_error);
}

TEST_CASE("adjoint layer satisfies the classical Gauss identity") {
    for (const auto& g : {make_ellipse(1.0, 1.0, 64), make_ellipse(2.0, 1.0, 128)}) {
        const Eigen::VectorXd sums = gauss_column_sums(g);
        CHECK((sums.array() - 0.5).abs().maxCoeff() < 1e-10);
    }
}

TEST_CASE("adjoint layer preserves the zero-mean subspace") {
    const auto g = make_smooth_star(1.0, 0.3, 4, 256);
    const auto W = assemble_W(g);
    std::mt19937_64 rng(3);
    const Density th = project_zero_mean(g, random_trig(rng, 6).sample(g));
    const Eigen::VectorXd wth = W.matrix * th.values;
    CHECK(std::abs(boundary_integral(g, wth)) < 1e-10 * std::max(1.0, th.values.norm()));
    CHECK((W.matrix * Eigen::VectorXd::Zero(static_cast<Eigen::Index>(g.size()))).norm() == 0.0);
}

TEST_CASE("periodic correction blocks at eps = 0") {
    const auto g = make_ellipse(1.0, 1.0, 64);
    const auto cell = make_cell({1.0, 1.0});
    const GreensEvaluator ev(cell);
    const auto [R, DR] = assemble_R_blocks(g, 0.0, ev);
    // constant kernel: kills zero-mean densities
    std::mt19937_64 rng(4);
    const Density th = project_zero_mean(g, random_trig(rng, 3).sample(g));
    CHECK((R.matrix * th.values).cwiseAbs().maxCoeff() < 1e-12);
    // gradient of the even regular part vanishes at 0
    CHECK(DR.matrix.cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("periodic correction blocks are even in eps") {
    const auto g = make_smooth_star(1.0, 0.2, 3, 64);
    const auto cell = make_cell({1.0, 1.0});
    const GreensEvaluator ev(cell);
    const auto fwd = assemble_R_blocks(g, 0.1, ev);
    const auto bwd = assemble_R_blocks(g, -0.1, ev);
    CHECK((fwd.first.matrix - bwd.first.matrix).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("periodic correction blocks reject an oversize inclusion") {
    const auto g = make_ellipse(1.0, 1.0, 64);
    const auto cell = make_cell({1.0, 1.0});
    const GreensEvaluator ev(cell);
    CHECK_THROWS_AS(assemble_R_blocks(g, 0.51, ev), config_error);
}

TEST_CASE("field evaluation basics") {
    const auto g = make_ellipse(1.0, 1.0, 128);
    const Eigen::VectorXd zero = Eigen::VectorXd::Zero(128);
    CHECK(eval_single_layer(g, zero, {0.2, 0.1}).value == 0.0);

    // constant density on the unit circle: v = a log a = 0 at the center
    const Eigen::VectorXd one = Eigen::VectorXd::Ones(128);
    CHECK(std::abs(eval_single_layer(g, one, {0.0, 0.0}).value) < 1e-12);

    // near-boundary flag
    CHECK(eval_single_layer(g, one, {0.999, 0.0}).near_boundary);
    CHECK(!eval_single_layer(g, one, {0.5, 0.0}).near_boundary);
}

TEST_CASE("harmonicity of the evaluated fields") {
    const auto g = make_smooth_star(1.0, 0.25, 3, 128);
    std::mt19937_64 rng(9);
    const Eigen::VectorXd mu = random_trig(rng, 4).sample(g);
    const double h = 1e-3;
    for (const Vec2& x : {Vec2{0.1, -0.2}, Vec2{2.0, 1.4}}) {
        auto lap = (eval_single_layer(g, mu, {x.x + h, x.y}).value +
                    eval_single_layer(g, mu, {x.x - h, x.y}).value +
                    eval_single_layer(g, mu, {x.x, x.y + h}).value +
                    eval_single_layer(g, mu, {x.x, x.y - h}).value -
                    4.0 * eval_single_layer(g, mu, x).value) /
                   (h * h);
        CHECK(std::abs(lap) < 1e-5);
    }
    // periodic layer of a zero-mean density is harmonic off the boundary
    const auto cell = make_cell({1.0, 1.0});
    const GreensEvaluator ev(cell);
    const auto bd = scaled_copy(g, {0.5, 0.5}, 0.2);
    const Density th = project_zero_mean(g, mu);
    Eigen::VectorXd th_s = th.values;
    const Vec2 x{0.1, 0.85};
    auto plap = (eval_periodic_layer(bd, th_s, ev, {x.x + h, x.y}).value +
                 eval_periodic_layer(bd, th_s, ev, {x.x - h, x.y}).value +
                 eval_periodic_layer(bd, th_s, ev, {x.x, x.y + h}).value +
                 eval_periodic_layer(bd, th_s, ev, {x.x, x.y - h}).value -
                 4.0 * eval_periodic_layer(bd, th_s, ev, x).value) /
                (h * h);
    CHECK(std::abs(plap) < 1e-5);
}

TEST_CASE("jump relations via probe extrapolation") {
    const auto g = make_ellipse(2.0, 1.0, 256);
    const auto W = assemble_W(g);
    std::mt19937_64 rng(17);
    const TrigPoly mu = random_trig(rng, 5);
    CHECK(jump_relation_residual(g, mu, W.matrix, 32) < 1e-6);
}

TEST_CASE("spectral convergence of the single layer") {
    // apply V to an analytic density; compare against a refined reference at
    // the shared nodes
    const ShapeSpec spec = make_ellipse(2.0, 1.0, 32).spec;
    TrigPoly mu;
    mu.ccos = {0.3, -0.2, 0.5};
    mu.csin = {1.0, 0.0, -0.4};
    auto value_at_common_nodes = [&](std::size_t N) {
        const auto g = make_geometry(spec, N);
        const Eigen::VectorXd v = assemble_V(g).matrix * mu.sample(g);
        Eigen::VectorXd out(16);
        for (int i = 0; i < 16; ++i)
            out[i] = v[static_cast<Eigen::Index>(i * N / 16)];
        return out;
    };
    const Eigen::VectorXd ref = value_at_common_nodes(512);
    const double e16 = (value_at_common_nodes(16) - ref).cwiseAbs().maxCoeff();
    const double e32 = (value_at_common_nodes(32) - ref).cwiseAbs().maxCoeff();
    CHECK(e32 < 1e-2 * e16);
    CHECK((value_at_common_nodes(64) - ref).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("trig interpolation and derivative") {
    // band-limited data reproduces exactly on the finer grid
    TrigPoly p;
    p.c0 = 0.4;
    p.ccos = {1.0, -0.7};
    p.csin = {0.2, 0.9};
    const auto g8 = make_ellipse(1.0, 1.0, 16);
    const auto g32 = make_ellipse(1.0, 1.0, 64);
    const Eigen::VectorXd up = trig_upsample(p.sample(g8), 64);
    CHECK((up - p.sample(g32)).cwiseAbs().maxCoeff() < 1e-13);

    const Eigen::VectorXd d = trig_derivative(p.sample(g8));
    for (std::size_t i = 0; i < 16; ++i) {
        const double t = g8.params[i];
        const double expect = -1.0 * std::sin(t) + 1.4 * std::sin(2 * t) +
                              0.2 * std::cos(t) + 1.8 * std::cos(2 * t);
        CHECK(d[static_cast<Eigen::Index>(i)] == doctest::Approx(expect).epsilon(1e-12));
    }
}

TEST_CASE("refine resamples geometry and density together") {
    const auto g = make_smooth_star(1.0, 0.2, 4, 32);
    TrigPoly p;
    p.ccos = {0.5, 0.1};
    const auto [fine, mu] = refine(g, p.sample(g), 128);
    CHECK(fine.size() == 128);
    CHECK((mu - p.sample(fine)).cwiseAbs().maxCoeff() < 1e-12);
}
