#include "irs/manifold.hpp"

#include "oracles.hpp"

#include <doctest.h>

using namespace irs;
using namespace irs::manifold;

namespace {

ci::CoefficientBundle single_element(cdouble s)
{
    MatrixXcd rows(1, 1);
    rows << 1.0;
    VectorXcd sv(1);
    sv << s;
    return ci::build_coefficients_standalone(rows, sv, VectorXd::Ones(1), pi / 4);
}

} // namespace

TEST_CASE("log-sum-exp smoothing")
{
    ci::CoefficientBundle b;
    b.b_rows = MatrixXcd::Zero(1, 1);
    b.c_rows = MatrixXcd::Zero(1, 1);
    b.offsets_w = VectorXd::Constant(1, 0.0);
    b.offsets_z = VectorXd::Constant(1, 0.0);
    CHECK(lse_objective(VectorXcd::Ones(1), b, 0.1).value == doctest::Approx(0.1 * std::log(2.0)));

    CounterRng rng(derive_key(9, 1));
    for (int trial = 0; trial < 100; ++trial) {
        const auto bundle = oracle::random_standalone(3, 8, rng);
        const CirclePoint theta = oracle::random_circle(8, rng);
        const double eps = 0.01 + rng.uniform();
        const double top = oracle::max_objective(bundle, theta.values());
        const double v = lse_objective(theta.values(), bundle, eps).value;
        CHECK(v >= top - 1e-12);
        CHECK(v <= top + eps * std::log(2.0 * bundle.pairs()) + 1e-12);
        CHECK(v == doctest::Approx(oracle::lse(bundle, theta.values(), eps)).epsilon(1e-12));
    }
    // Huge offsets do not overflow.
    ci::CoefficientBundle big = b;
    big.offsets_w(0) = 1e6;
    CHECK(std::isfinite(lse_objective(VectorXcd::Ones(1), big, 1e-3).value));
    CHECK_THROWS(lse_objective(VectorXcd::Ones(1), b, 0.0));
}

TEST_CASE("gradient matches finite differences")
{
    CounterRng rng(derive_key(9, 2));
    for (int trial = 0; trial < 20; ++trial) {
        const auto bundle = oracle::random_standalone(2, 8, rng);
        const CirclePoint theta = oracle::random_circle(8, rng);
        const LseValue lv = lse_objective(theta.values(), bundle, 0.05);
        const VectorXcd fd =
            oracle::numeric_gradient([&](const VectorXcd& t) { return oracle::lse(bundle, t, 0.05); }, theta.values());
        CHECK((lv.gradient - fd).cwiseAbs().maxCoeff() < 1e-6);
    }
}

TEST_CASE("tangent projection and retraction")
{
    VectorXcd t(1), g(1);
    t << std::polar(1.0, pi / 4);
    g << 1.0;
    CHECK(std::abs(project_tangent(t, g)(0) - cdouble(0.5, -0.5)) < 1e-15);

    VectorXcd one(1), step(1);
    one << 1.0;
    step << cdouble(0, 1);
    CHECK(std::abs(retract(one, step)(0) - std::polar(1.0, pi / 4)) < 1e-15);
    CHECK(std::abs(retract(one, VectorXcd::Zero(1))(0) - 1.0) < 1e-15);
    CHECK_THROWS_AS(retract(one, VectorXcd::Constant(1, -1.0)), std::domain_error);

    CounterRng rng(derive_key(9, 3));
    for (int trial = 0; trial < 100; ++trial) {
        const CirclePoint th = oracle::random_circle(6, rng);
        const VectorXcd v = oracle::random_complex(6, rng);
        const VectorXcd p = project_tangent(th.values(), v);
        CHECK((project_tangent(th.values(), p) - p).norm() < 1e-13);
        CHECK((p.array() * th.values().array().conjugate()).real().abs().maxCoeff() < 1e-13);
        CHECK(CirclePoint(retract(th.values(), p)).max_modulus_error() < 1e-12);
    }
}

TEST_CASE("single element closed form")
{
    const auto bundle = single_element(std::polar(1.0, pi / 4));
    RcgOptions opts;
    opts.smoothing_eps = 1e-6;
    const RcgResult r = rcg_minimize(bundle, CirclePoint::ones(1), opts);
    CHECK(std::abs(std::arg(r.theta(0)) - pi / 4) < 1e-4);
    CHECK(ci::max_objective(bundle, r.theta.values()) == doctest::Approx(-std::sin(pi / 4)).epsilon(1e-6));

    // Already at the critical point: no step is accepted.
    const RcgResult fixed = rcg_minimize(bundle, CirclePoint(VectorXcd::Constant(1, std::polar(1.0, pi / 4))));
    CHECK(fixed.iterations == 0);
    CHECK(fixed.converged);
    CHECK(std::abs(fixed.theta(0) - std::polar(1.0, pi / 4)) < 1e-15);
}

TEST_CASE("armijo steps decrease the smoothed objective")
{
    CounterRng rng(derive_key(9, 4));
    for (int trial = 0; trial < 20; ++trial) {
        const auto bundle = oracle::random_standalone(3, 16, rng);
        RcgOptions opts;
        opts.record_trace = true;
        const RcgResult r = rcg_minimize(bundle, oracle::random_circle(16, rng), opts);
        for (std::size_t i = 1; i < r.trace.size(); ++i) CHECK(r.trace[i].value < r.trace[i - 1].value);
        CHECK(r.theta.max_modulus_error() < 1e-12);
        CHECK(r.converged);
    }
}

TEST_CASE("continuation never regresses from the start")
{
    CounterRng rng(derive_key(9, 5));
    for (int trial = 0; trial < 20; ++trial) {
        const auto bundle = oracle::random_standalone(3, 12, rng);
        const CirclePoint start = oracle::random_circle(12, rng);
        const MinimaxResult r = minimize_max(bundle, start);
        CHECK(r.value <= ci::max_objective(bundle, start.values()));
        CHECK(r.value == doctest::Approx(oracle::max_objective(bundle, r.theta.values())));
    }
}

TEST_CASE("two elements against a dense grid")
{
    CounterRng rng(derive_key(9, 6));
    for (int trial = 0; trial < 5; ++trial) {
        const auto bundle = oracle::random_standalone(2, 2, rng);
        const auto grid = oracle::grid_search_2d(720, [&](const VectorXcd& t) { return oracle::max_objective(bundle, t); });
        double best = std::numeric_limits<double>::infinity();
        for (int s = 0; s < 8; ++s) best = std::min(best, minimize_max(bundle, oracle::random_circle(2, rng)).value);
        // Grid resolution pi/360 bounds what the grid itself can miss.
        const double lipschitz = 2.0 * bundle.row_scale();
        CHECK(best <= grid.value + 1e-9);
        CHECK(best >= grid.value - lipschitz * pi / 360.0);
    }
}

TEST_CASE("options are validated")
{
    RcgOptions bad;
    bad.armijo_shrink = 1.5;
    CHECK_THROWS(bad.validate());
    const auto bundle = single_element(1.0);
    CHECK_THROWS(rcg_minimize(bundle, CirclePoint::ones(2)));
    MinimaxOptions m;
    m.stages = 0;
    CHECK_THROWS(minimize_max(bundle, CirclePoint::ones(1), m));
}
