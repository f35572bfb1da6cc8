#include "irs/channel.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <sstream>

using namespace irs;
using namespace irs::channel;

TEST_CASE("path loss")
{
    CHECK(path_loss(1.0, 3.0, 1e-3, 1.0) == doctest::Approx(1e-3));
    CHECK(path_loss(100.0, 3.0, 1e-3, 1.0) == doctest::Approx(1e-9).epsilon(1e-12));
    CHECK(path_loss(10.0, 2.5, 1e-3, 1.0) == doctest::Approx(3.1623e-6).epsilon(1e-4));
    CHECK_THROWS_AS(path_loss(0.0, 3.0, 1e-3, 1.0), std::domain_error);
    CHECK_THROWS_AS(path_loss(-2.0, 3.0, 1e-3, 1.0), std::domain_error);
}

TEST_CASE("rician draws")
{
    const MatrixXcd los = ula_steering(4, 0.3) * ula_steering(3, -0.2).adjoint();
    SUBCASE("pure LoS limit")
    {
        const MatrixXcd h = draw_rician(4, 3, 1e12, los, 2.0, 5);
        CHECK((h - std::sqrt(2.0) * los).cwiseAbs().maxCoeff() < 1e-5);
    }
    SUBCASE("NLoS second moment")
    {
        const MatrixXcd h = draw_rician(1, 100000, 0.0, MatrixXcd::Zero(1, 100000), 3e-9, 9);
        const double moment = h.cwiseAbs2().mean() / 3e-9;
        CHECK(moment >= 0.99);
        CHECK(moment <= 1.01);
    }
    SUBCASE("seeded draws repeat bit for bit")
    {
        CHECK(draw_rician(4, 3, 2.0, los, 1.0, 77) == draw_rician(4, 3, 2.0, los, 1.0, 77));
        CHECK(draw_rician(4, 3, 2.0, los, 1.0, 77) != draw_rician(4, 3, 2.0, los, 1.0, 78));
    }
    CHECK_THROWS(draw_rician(4, 4, 2.0, los, 1.0, 1));
}

TEST_CASE("standalone effective channel")
{
    VectorXcd hr(2), hg(2);
    hr << 1.0, cdouble(0, 1);
    hg << 1.0, 2.0;
    const VectorXcd h = effective_channel_standalone(hr, hg);
    CHECK(std::abs(std::conj(h(0)) - 1.0) < 1e-15);
    CHECK(std::abs(std::conj(h(1)) - cdouble(0, -2)) < 1e-15);
    CHECK((effective_channel_standalone(hr, VectorXcd::Ones(2)) - hr).norm() < 1e-15);
    CHECK(effective_channel_standalone(VectorXcd::Zero(2), hg).norm() == 0.0);
    CHECK_THROWS(effective_channel_standalone(hr, VectorXcd::Ones(3)));
}

TEST_CASE("joint compound channel")
{
    CounterRng rng(derive_key(3, 3));
    const VectorXcd h = oracle::random_complex(3, rng), hr = oracle::random_complex(4, rng);
    const MatrixXcd G = oracle::random_complex(4, 3, rng);
    const VectorXcd t1 = oracle::random_complex(4, rng), t2 = oracle::random_complex(4, rng);

    CHECK((compound_channel_joint(h, VectorXcd::Zero(4), G, t1) - h).norm() < 1e-15);
    VectorXcd one(1);
    one << 1.0;
    MatrixXcd g1(1, 1);
    g1 << 1.0;
    VectorXcd flip(1);
    flip << std::polar(1.0, pi);
    CHECK(std::abs(compound_channel_joint(one, one, g1, flip)(0)) < 1e-15);
    const VectorXcd reflected = compound_channel_joint(VectorXcd::Zero(3), hr, G, VectorXcd::Ones(4));
    CHECK((reflected.adjoint() - hr.adjoint() * G).norm() < 1e-14);
    // Affine in theta: h(t1 + t2) = h(t1) + h(t2) - h(0).
    const VectorXcd lhs = compound_channel_joint(h, hr, G, t1 + t2);
    const VectorXcd rhs = compound_channel_joint(h, hr, G, t1) + compound_channel_joint(h, hr, G, t2) -
                          compound_channel_joint(h, hr, G, VectorXcd::Zero(4));
    CHECK((lhs - rhs).norm() < 1e-13);
    CHECK_THROWS(compound_channel_joint(h, hr, G, VectorXcd::Ones(5)));
}

TEST_CASE("scenario generation")
{
    ScenarioConfig cfg = ScenarioConfig::joint();
    cfg.n_irs_elements = 16;
    const ChannelSet a = generate(cfg, 4), b = generate(cfg, 4), c = generate(cfg, 5);
    CHECK(a.users() == 3);
    CHECK(a.elements() == 16);
    CHECK(a.antennas() == 6);
    CHECK(a.bs_irs == b.bs_irs);
    CHECK(a.direct == b.direct);
    CHECK(a.sir_irs == b.sir_irs);
    CHECK(a.bs_irs != c.bs_irs);
    CHECK_NOTHROW(a.validate());

    std::stringstream io;
    write_csv(io, a);
    const ChannelSet back = read_csv(io);
    CHECK(back.direct == a.direct);
    CHECK(back.irs_user == a.irs_user);
    CHECK(back.bs_irs == a.bs_irs);
    CHECK(back.generator_irs == a.generator_irs);
    CHECK(back.sir_direct == a.sir_direct);
    CHECK(back.sir_irs == a.sir_irs);

    ScenarioConfig bad = cfg;
    bad.constellation_order = 3;
    CHECK_THROWS(bad.validate());
    bad = cfg;
    bad.embedding_length = 0;
    CHECK_THROWS(bad.validate());
}

TEST_CASE("steering vectors are unit modulus")
{
    const VectorXcd a = ula_steering(64, 0.7);
    CHECK((a.cwiseAbs().array() - 1.0).abs().maxCoeff() < 1e-14);
    CHECK(std::abs(a(0) - 1.0) < 1e-15);
}
