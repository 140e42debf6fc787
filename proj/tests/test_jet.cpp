#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "kawaflat/jet.hpp"

using namespace kawaflat;

TEST_CASE("jet_mul examples") {
    // t * t at t=1 -> jet of t^2: [1, 2, 2]
    const Jet t1 = Jet::variable(1.0, 2);
    const Jet sq = jet_mul(t1, t1);
    CHECK(sq.values[0] == 1.0);
    CHECK(sq.values[1] == 2.0);
    CHECK(sq.values[2] == 2.0);

    // multiplying by the constant-1 jet is the identity
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> uni(-2.0, 2.0);
    std::vector<double> v(6);
    for (double& x : v) x = uni(rng);
    const Jet a(0.4, v);
    const Jet one = Jet::constant(0.4, 1.0, 5);
    const Jet same = jet_mul(a, one);
    for (std::size_t i = 0; i < v.size(); ++i) CHECK(same.values[i] == v[i]);

    // exp * exp = exp(2t) at 0: derivatives [1, 2, 4, 8, 16]
    const Jet e(0.0, {1.0, 1.0, 1.0, 1.0, 1.0});
    const Jet e2 = jet_mul(e, e);
    for (int m = 0; m <= 4; ++m)
        CHECK(e2.values[static_cast<std::size_t>(m)] == Catch::Approx(std::pow(2.0, m)).epsilon(1e-15));
}

TEST_CASE("jet_mul is commutative and associative") {
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    for (int rep = 0; rep < 100; ++rep) {
        std::vector<double> va(8), vb(8), vc(8);
        for (double& x : va) x = uni(rng);
        for (double& x : vb) x = uni(rng);
        for (double& x : vc) x = uni(rng);
        const Jet a(0.0, va), b(0.0, vb), c(0.0, vc);
        const Jet ab = jet_mul(a, b), ba = jet_mul(b, a);
        for (std::size_t i = 0; i < va.size(); ++i)
            CHECK(ab.values[i] == Catch::Approx(ba.values[i]).margin(1e-14));
        const Jet abc1 = jet_mul(jet_mul(a, b), c), abc2 = jet_mul(a, jet_mul(b, c));
        for (std::size_t i = 0; i < va.size(); ++i)
            CHECK(abc1.values[i] == Catch::Approx(abc2.values[i]).epsilon(1e-12).margin(1e-12));
    }
}

TEST_CASE("jet_mul rejects mismatches") {
    CHECK_THROWS(jet_mul(Jet::constant(0.0, 1.0, 3), Jet::constant(0.5, 1.0, 3)));
    CHECK_THROWS(jet_mul(Jet::constant(0.0, 1.0, 3), Jet::constant(0.0, 1.0, 4)));
}

TEST_CASE("jet_compose_affine") {
    std::vector<double> v{1.0, 2.0, 3.0, 4.0};
    const Jet j(0.0, v);
    const Jet same = jet_compose_affine(j, 1.0, 0.0);
    for (std::size_t i = 0; i < v.size(); ++i) CHECK(same.values[i] == v[i]);
    CHECK(same.point == 0.0);

    // scale = 2 doubles the first derivative, quadruples the second, ...
    const Jet sc = jet_compose_affine(j, 2.0, 0.0);
    for (std::size_t i = 0; i < v.size(); ++i)
        CHECK(sc.values[i] == Catch::Approx(v[i] * std::pow(2.0, static_cast<double>(i))));

    // chain-rule oracle for the bump-window substitution r = (t-tau)/(T-tau):
    // with T-tau = 0.5 the m-th entry is multiplied by 2^m and the point maps
    // to t = tau + r (T-tau)
    const double tau = 0.25, Tmt = 0.5;
    const Jet at_r(0.5, v);
    const Jet in_t = jet_compose_affine(at_r, 1.0 / Tmt, -tau / Tmt);
    CHECK(in_t.point == Catch::Approx(tau + 0.5 * Tmt));
    for (std::size_t i = 0; i < v.size(); ++i)
        CHECK(in_t.values[i] == Catch::Approx(v[i] * std::pow(2.0, static_cast<double>(i))));

    CHECK_THROWS(jet_compose_affine(j, 0.0, 1.0));
}

TEST_CASE("taylor-mode elementaries match closed forms") {
    // exp(u) with u = 0.3 + t: derivatives of e^(0.3+t) are all e^0.3
    const Jet u = Jet::variable(0.3, 5);
    const Jet e = taylor::to_jet(0.3, taylor::exp(taylor::from_jet(u)));
    for (double v : e.values) CHECK(v == Catch::Approx(std::exp(0.3)).epsilon(1e-14));

    // d/dr (1-r)^(-sigma) at r=0.5 equals sigma 2^(sigma+1) / 2 ... checked
    // against the direct formula
    const double sigma = 0.25;
    Jet one_minus(0.5, {0.5, -1.0, 0.0});
    const Jet p = taylor::to_jet(0.5, taylor::pow(taylor::from_jet(one_minus), -sigma));
    CHECK(p.values[0] == Catch::Approx(std::pow(0.5, -sigma)).epsilon(1e-15));
    CHECK(p.values[1] == Catch::Approx(sigma * std::pow(0.5, -sigma - 1.0)).epsilon(1e-14));

    // recip of (2 + t): derivatives (-1)^m m! / 2^(m+1)
    Jet den(0.0, {2.0, 1.0, 0.0, 0.0});
    const Jet r = taylor::to_jet(0.0, taylor::recip(taylor::from_jet(den)));
    double fact = 1.0;
    for (int m = 0; m <= 3; ++m) {
        if (m > 0) fact *= m;
        const double expect = ((m % 2 == 0) ? 1.0 : -1.0) * fact / std::pow(2.0, m + 1.0);
        CHECK(r.values[static_cast<std::size_t>(m)] == Catch::Approx(expect).epsilon(1e-14));
    }
}
