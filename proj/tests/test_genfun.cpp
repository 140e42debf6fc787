#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>
#include <vector>

#include "kawaflat/genfun.hpp"
#include "kawaflat/stencils.hpp"

using namespace kawaflat;

namespace {

// dense central differences of a closed form, order 8
double fd_deriv(double (*f)(double), double x, int m, double h = 1e-3) {
    const int half = (m + 9) / 2;
    std::vector<double> nodes;
    for (int o = -half; o <= half; ++o) nodes.push_back(o * h);
    const auto w = fd_weights(0.0, nodes, m);
    double acc = 0.0;
    for (int o = -half; o <= half; ++o) acc += w[static_cast<std::size_t>(o + half)] * f(x + o * h);
    return acc;
}

} // namespace

TEST_CASE("closed forms at the seed point and reference trace values") {
    CHECK(f0_closed(0.0) == Catch::Approx(0.0).margin(1e-15));
    CHECK(g0_closed(0.0) == Catch::Approx(0.0).margin(1e-15));
    // two-decimal values from the estimates' proof, tolerance 5e-3
    CHECK(std::fabs(fd_deriv(&f0_closed, -1.0, 1) - 0.54) < 5e-3);
    CHECK(std::fabs(fd_deriv(&f0_closed, -1.0, 3) - 1.59) < 5e-3);
    CHECK(std::fabs(fd_deriv(&g0_closed, -1.0, 1) - (-0.18)) < 5e-3);
    // g0 >= 0 on a dense grid
    for (int i = 0; i <= 1000; ++i) CHECK(g0_closed(-1.0 + i / 1000.0) >= -1e-15);
}

TEST_CASE("monotonicity facts") {
    for (int i = 0; i <= 1000; ++i) {
        const double x = -1.0 + i / 1000.0;
        CHECK(f0_closed(x) <= 1e-15);
        CHECK(f0_closed(x) >= x - 1e-15);
        CHECK(g0_closed(x) <= -x + 1e-15);
    }
}

TEST_CASE("series_solve_P reproduces the closed forms") {
    const PowerSeries none = PowerSeries::zero(0.0, 0);
    const PowerSeries f0 = series_solve_P(none, {0, 0, 0, 1, 0}, 60);
    const PowerSeries g0 = series_solve_P(none, {0, 0, 0, 0, 1}, 60);
    double worst = 0.0;
    for (int i = 0; i <= 512; ++i) {
        const double x = -1.0 + i / 512.0;
        worst = std::max(worst, std::fabs(ps_eval(f0, x) - f0_closed(x)));
        worst = std::max(worst, std::fabs(ps_eval(g0, x) - g0_closed(x)));
    }
    CHECK(worst <= 1e-12);

    // f0 is annihilated by P and has the seeded third derivative
    const PowerSeries Pf0 = ps_apply_P(f0);
    CHECK(ps_max_abs_coeff(Pf0) <= 1e-12);
    CHECK(ps_eval(ps_derivative(f0, 3), 0.0) == 1.0);

    // zero data -> zero series (uniqueness)
    const PowerSeries zero = series_solve_P(none, {0, 0, 0, 0, 0}, 40);
    CHECK(ps_max_abs_coeff(zero) == 0.0);

    CHECK_THROWS_WITH(series_solve_P(PowerSeries::zero(0.0, 60), {0, 0, 0, 1, 0}, 60),
                      Catch::Matchers::ContainsSubstring("minimum"));
}

TEST_CASE("toy variant equals the closed monomials") {
    // f_j = x^(5j+3)/(5j+3)!, g_j = x^(5j+4)/(5j+4)!. Off-monomial
    // coefficients are identically zero; the single nonzero entry agrees
    // with the factorial reciprocal to the last ulp or two (the recurrence's
    // division cascade and 1/fact round differently).
    const auto fam = build_family(3, 40, FamilyVariant::toy);
    for (int j = 0; j <= 3; ++j) {
        double f_fact = 1.0, g_fact = 1.0;
        for (int k = 1; k <= 5 * j + 3; ++k) f_fact *= k;
        for (int k = 1; k <= 5 * j + 4; ++k) g_fact *= k;
        const auto& fj = fam.f[static_cast<std::size_t>(j)];
        const auto& gj = fam.g[static_cast<std::size_t>(j)];
        for (int d = 0; d <= fam.order; ++d) {
            const auto di = static_cast<std::size_t>(d);
            if (d == 5 * j + 3) {
                CHECK(fj.coeffs[di] == Catch::Approx(1.0 / f_fact).epsilon(4e-16));
            } else {
                CHECK(fj.coeffs[di] == 0.0);
            }
            if (d == 5 * j + 4) {
                CHECK(gj.coeffs[di] == Catch::Approx(1.0 / g_fact).epsilon(4e-16));
            } else {
                CHECK(gj.coeffs[di] == 0.0);
            }
        }
    }
    // the single-seed example: toy f_1 is exactly one entry at degree 8
    CHECK(fam.f[1].coeffs[8] == Catch::Approx(1.0 / 40320.0).epsilon(4e-16));
}

TEST_CASE("build_family caches traces and enforces the order floor") {
    CHECK_THROWS_WITH(build_family(4, 20), Catch::Matchers::ContainsSubstring("30"));
    const auto fam = build_family(0, 60);
    CHECK(fam.traces_f[0][0] == Catch::Approx(f0_closed(-1.0)).epsilon(1e-13));
    CHECK(std::fabs(fam.traces_f[0][1] - 0.54) < 5e-3);
    CHECK(std::fabs(fam.traces_g[0][1] - (-0.18)) < 5e-3);
}

TEST_CASE("family envelope bound") {
    const auto fam = build_family(6, 80);
    for (int j = 0; j <= 6; ++j)
        for (int i = 0; i <= 256; ++i) {
            const double x = -1.0 + i / 256.0;
            const double bound = family_bound(j, x) + 1e-14;
            REQUIRE(std::fabs(ps_eval(fam.f[static_cast<std::size_t>(j)], x)) <= bound);
            REQUIRE(std::fabs(ps_eval(fam.g[static_cast<std::size_t>(j)], x)) <= bound);
        }
}

TEST_CASE("boundary seeds of the cascade hold exactly") {
    const auto fam = build_family(3, 40);
    CHECK(fam.f[0].coeffs[0] == 0.0);
    CHECK(fam.f[0].coeffs[1] == 0.0);
    CHECK(fam.f[0].coeffs[2] == 0.0);
    CHECK(fam.f[0].coeffs[3] == 1.0 / 6.0);
    CHECK(fam.f[0].coeffs[4] == 0.0);
    CHECK(fam.g[0].coeffs[4] == 1.0 / 24.0);
    for (int j = 1; j <= 3; ++j)
        for (int m = 0; m < 5; ++m) {
            CHECK(fam.f[static_cast<std::size_t>(j)].coeffs[static_cast<std::size_t>(m)] == 0.0);
            CHECK(fam.g[static_cast<std::size_t>(j)].coeffs[static_cast<std::size_t>(m)] == 0.0);
        }
}

TEST_CASE("convolution cross-check agrees with the recurrence") {
    const auto fam = build_family(1, 70);
    double worst_f = 0.0, worst_g = 0.0;
    for (int i = 0; i <= 64; ++i) {
        const double x = -1.0 + i / 64.0;
        worst_f = std::max(worst_f, std::fabs(convolution_f_eval(fam.f[0], fam.f[0], 48, x) -
                                              ps_eval(fam.f[1], x)));
        worst_g = std::max(worst_g, std::fabs(convolution_g_eval(fam.g[0], fam.g[0], 48, x) -
                                              ps_eval(fam.g[1], x)));
    }
    CHECK(worst_f <= 1e-9);
    CHECK(worst_g <= 1e-9);

    // zero previous member -> identically zero
    const PowerSeries z = PowerSeries::zero(0.0, 10);
    CHECK(convolution_f_eval(fam.f[0], z, 32, -0.7) == 0.0);
    CHECK_THROWS(convolution_f_eval(fam.f[0], z, 8, -0.5));
}

TEST_CASE("cascade identity P^k f_j = (-1)^k f_{j-k}") {
    const auto fam = build_family(5, 80);
    CHECK(verify_Pk_identity(fam, 0, 3) == 0.0);
    CHECK(verify_Pk_identity(fam, 1, 1) <= 1e-10);
    CHECK(verify_Pk_identity(fam, 2, 3) <= 1e-9);
    CHECK_THROWS(verify_Pk_identity(fam, 4, 3));
}

TEST_CASE("operator-norm inequality on random polynomials") {
    // ||P^n f||_inf <= 3^n sum_{i<=5n} ||f^(i)||_inf on a 512-point grid
    std::mt19937_64 rng(1234);
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    for (int rep = 0; rep < 200; ++rep) {
        std::vector<double> c(26);
        for (double& v : c) v = uni(rng);
        const PowerSeries f(0.0, c);
        PowerSeries p = f;
        for (int n = 1; n <= 3; ++n) {
            p = ps_apply_P(p);
            double lhs = 0.0;
            for (int i = 0; i <= 512; ++i) lhs = std::max(lhs, std::fabs(ps_eval(p, -1.0 + i / 512.0)));
            double rhs = 0.0;
            for (int d = 0; d <= 5 * n; ++d) {
                const PowerSeries df = ps_derivative(f, std::min(d, f.order()));
                double m = 0.0;
                for (int i = 0; i <= 512; ++i) m = std::max(m, std::fabs(ps_eval(df, -1.0 + i / 512.0)));
                rhs += m;
            }
            REQUIRE(lhs <= std::pow(3.0, n) * rhs * (1.0 + 1e-12));
        }
    }
}

TEST_CASE("min_order_for dominates the precondition floor") {
    for (int j = 0; j <= 10; ++j) {
        const int n = min_order_for(j);
        CHECK(n >= 5 * j + 10);
        CHECK_NOTHROW(build_family(j, n));
    }
}
