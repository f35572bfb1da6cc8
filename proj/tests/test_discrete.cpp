#include "irs/discrete.hpp"

#include "oracles.hpp"

#include <doctest.h>

using namespace irs;
using namespace irs::discrete;

TEST_CASE("quantization")
{
    auto q = [](double phase, int bits) { return std::arg(quantize(CirclePoint::from_phases(VectorXd::Constant(1, phase)), bits)(0)); };
    CHECK(std::abs(q(0.3, 1)) < 1e-15);
    CHECK(q(2.0, 1) == doctest::Approx(pi));
    CHECK(q(pi / 4 + 0.1, 2) == doctest::Approx(pi / 2));
    CHECK(q(-pi / 2 + 0.01, 2) == doctest::Approx(-pi / 2));
    CHECK(std::abs(q(2.0 * pi - 0.01, 3)) < 1e-15);

    CounterRng rng(derive_key(13, 1));
    for (int bits = 1; bits <= 5; ++bits) {
        const CirclePoint th = oracle::random_circle(50, rng);
        const CirclePoint once = quantize(th, bits);
        CHECK((quantize(once, bits).values() - once.values()).norm() < 1e-14);
        const double delta = 2.0 * pi / (1 << bits);
        for (Index n = 0; n < 50; ++n) {
            CHECK(std::abs(std::arg(once(n) * std::conj(th(n)))) <= delta / 2 + 1e-12);
            CHECK_NOTHROW(grid_slots(once, PhaseGrid(bits)));
        }
    }
}

TEST_CASE("phase grid")
{
    const PhaseGrid g(2);
    CHECK(g.size() == 4);
    CHECK(g.points(3) == cdouble(1.0));
    CHECK(std::abs(g.points(0) - cdouble(0, 1)) < 1e-15);
    for (int j = 0; j < 4; ++j) CHECK(std::abs(g.points(j) - oracle::grid_point(j, 2)) < 1e-15);
    // Coarser grids nest inside finer ones.
    for (int bits = 1; bits < 5; ++bits) {
        const PhaseGrid coarse(bits), fine(bits + 1);
        for (Index j = 0; j < coarse.size(); ++j) CHECK(std::abs(coarse.points(j) - fine.points(2 * j + 1)) < 1e-14);
    }
    CHECK_THROWS(PhaseGrid(0));
}

TEST_CASE("branch and bound matches exhaustive search")
{
    CounterRng rng(derive_key(13, 2));
    for (int trial = 0; trial < 60; ++trial) {
        const Index N = 1 + static_cast<Index>(rng.uniform_index(4));
        const Index K = 1 + static_cast<Index>(rng.uniform_index(3));
        const int bits = 1 + static_cast<int>(rng.uniform_index(2));
        const auto bundle = oracle::random_standalone(K, N, rng, 0.5 + rng.uniform());
        const auto truth = oracle::exhaustive_grid(bundle, bits);
        const BnbResult r = branch_and_bound(bundle, bits);
        CHECK(r.certified);
        CHECK(r.value == doctest::Approx(truth.value).epsilon(1e-12));
        CHECK_NOTHROW(grid_slots(r.theta, PhaseGrid(bits)));
    }
}

TEST_CASE("branch and bound on an on-grid continuous optimum")
{
    MatrixXcd rows(1, 1);
    rows << 1.0;
    VectorXcd s(1);
    s << 1.0;
    const auto bundle = ci::build_coefficients_standalone(rows, s, VectorXd::Ones(1), pi / 2);
    const BnbResult r = branch_and_bound(bundle, 2);
    CHECK(std::abs(r.theta(0) - 1.0) < 1e-15);
    CHECK(r.value == doctest::Approx(-1.0));
}

TEST_CASE("node budget and guards")
{
    CounterRng rng(derive_key(13, 3));
    const auto bundle = oracle::random_standalone(3, 40, rng);
    BnbOptions opts;
    opts.node_budget = 50;
    const BnbResult r = branch_and_bound(bundle, 2, opts);
    CHECK_FALSE(r.certified);
    CHECK(std::isfinite(r.value));
    CHECK(r.value == doctest::Approx(ci::max_objective(bundle, r.theta.values())));
    CHECK_THROWS(branch_and_bound(bundle, 3));
    opts.incumbent = CirclePoint::ones(3);
    CHECK_THROWS(branch_and_bound(bundle, 2, opts));
}

TEST_CASE("incumbent is never worsened")
{
    CounterRng rng(derive_key(13, 4));
    for (int trial = 0; trial < 10; ++trial) {
        const auto bundle = oracle::random_standalone(2, 12, rng);
        const RefineResult h = coordinate_refine(oracle::random_circle(12, rng), bundle, 1);
        BnbOptions opts;
        opts.incumbent = h.theta;
        opts.node_budget = 1000;
        CHECK(branch_and_bound(bundle, 1, opts).value <= h.value + 1e-15);
    }
}

TEST_CASE("coordinate refinement")
{
    CounterRng rng(derive_key(13, 5));
    for (int trial = 0; trial < 30; ++trial) {
        const int bits = 1 + static_cast<int>(rng.uniform_index(4));
        const auto bundle = oracle::random_standalone(3, 10, rng);
        const CirclePoint start = oracle::random_circle(10, rng);
        const RefineResult r = coordinate_refine(start, bundle, bits);
        CHECK(r.value <= ci::max_objective(bundle, quantize(start, bits).values()) + 1e-15);
        CHECK_NOTHROW(grid_slots(r.theta, PhaseGrid(bits)));
        // Coordinate-wise optimal on termination.
        const PhaseGrid grid(bits);
        for (Index n = 0; n < 10; ++n) {
            VectorXcd t = r.theta.values();
            for (Index q = 0; q < grid.size(); ++q) {
                t(n) = grid.points(q);
                CHECK(ci::max_objective(bundle, t) >= r.value - 1e-12);
            }
        }
        // A grid point that is already a coordinate optimum is a fixed point.
        const RefineResult again = coordinate_refine(r.theta, bundle, bits);
        CHECK((again.theta.values() - r.theta.values()).norm() == 0.0);
        CHECK(again.sweeps == 1);
    }
}
