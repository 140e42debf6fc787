#pragma once

#include <array>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "kawaflat/power_series.hpp"
#include "kawaflat/quadrature.hpp"

namespace kawaflat {

// Roots of the characteristic factorization mu^4 ... : a*b = 1, a - b = 1.
[[nodiscard]] inline double golden_a() { return 0.5 * (std::sqrt(5.0) + 1.0); }
[[nodiscard]] inline double golden_b() { return 0.5 * (std::sqrt(5.0) - 1.0); }

/**
 * @brief Closed form of the first generating function f_0 on [-1,0].
 *
 * f_0 solves f' + f''' - f''''' = 0 with f(0)=f'(0)=f''(0)=f''''(0)=0,
 * f'''(0)=1.
 */
[[nodiscard]] inline double f0_closed(double x) {
    const double a = golden_a(), b = golden_b();
    return std::sinh(std::sqrt(a) * x) / (std::sqrt(a) * (a + b)) -
           std::sin(std::sqrt(b) * x) / (std::sqrt(b) * (a + b));
}

/// Closed form of g_0 (same ODE, fourth derivative seeded instead of third).
[[nodiscard]] inline double g0_closed(double x) {
    const double a = golden_a(), b = golden_b();
    return std::cosh(std::sqrt(a) * x) / (a * (a + b)) + std::cos(std::sqrt(b) * x) / (b * (a + b)) -
           1.0 / (a * (a + b)) - 1.0 / (b * (a + b));
}

enum class FamilyVariant {
    full, // P = d1 + d3 - d5
    toy   // dispersion-only operator -d5; members are exact monomials
};

/**
 * @brief Unique power series u with u' + u''' - u''''' = -rhs and prescribed
 *        derivatives u^(m)(0) = ic[m], m = 0..4.
 *
 * Coefficient recurrence (equate coefficients of x^k):
 *   a_{k+5} = [(k+1)a_{k+1} + (k+1)(k+2)(k+3)a_{k+3} + r_k]
 *             / [(k+1)(k+2)(k+3)(k+4)(k+5)]
 * The toy variant drops the a_{k+1} and a_{k+3} terms.
 */
[[nodiscard]] inline PowerSeries series_solve_P(const PowerSeries& rhs, const std::array<double, 5>& ic,
                                                int order, FamilyVariant variant = FamilyVariant::full) {
    if (rhs.base_point != 0.0) throw std::invalid_argument("series_solve_P: rhs must be about x0 = 0");
    if (order < rhs.order() + 5)
        throw std::invalid_argument("series_solve_P: target order must be >= rhs.order + 5 (minimum " +
                                    std::to_string(rhs.order() + 5) + ")");
    std::vector<double> a(static_cast<std::size_t>(order) + 1, 0.0);
    double fact = 1.0;
    for (int m = 0; m < 5; ++m) {
        if (m > 0) fact *= m;
        a[static_cast<std::size_t>(m)] = ic[static_cast<std::size_t>(m)] / fact;
    }
    for (int k = 0; k + 5 <= order; ++k) {
        const double rk = (k <= rhs.order()) ? rhs.coeffs[static_cast<std::size_t>(k)] : 0.0;
        double num = rk;
        if (variant == FamilyVariant::full)
            num += (k + 1.0) * a[static_cast<std::size_t>(k + 1)] +
                   (k + 1.0) * (k + 2.0) * (k + 3.0) * a[static_cast<std::size_t>(k + 3)];
        const double den = (k + 1.0) * (k + 2.0) * (k + 3.0) * (k + 4.0) * (k + 5.0);
        a[static_cast<std::size_t>(k + 5)] = num / den;
    }
    return PowerSeries(0.0, std::move(a));
}

/**
 * @brief The generating families {f_j}, {g_j} with boundary traces at x = -1.
 *
 * f_0, g_0 seed the cascade; for j >= 1, P f_j = -f_{j-1} with all five
 * derivatives vanishing at 0 (likewise g). traces_*[j] = (value, derivative)
 * at x = -1, cached because control synthesis queries them in a hot loop.
 */
struct GeneratingFamily {
    int j_max = 0;
    int order = 0;
    FamilyVariant variant = FamilyVariant::full;
    std::vector<PowerSeries> f, g;
    std::vector<std::array<double, 2>> traces_f, traces_g;
};

/// Smallest truncation order whose modeled coefficient tail at x = -1 is
/// below tol. The f_j coefficients are dominated by the sqrt(a)-exponential
/// envelope of f_0 scaled by the 2^j bound growth.
[[nodiscard]] inline int min_order_for(int j_max, double tol = 1e-14) {
    const double ra = std::sqrt(golden_a());
    const double amp = std::pow(2.0, j_max);
    int n = 5 * j_max + 10;
    for (;; ++n) {
        double tail = 0.0, term = amp * std::pow(ra, n + 1);
        double fact = 1.0;
        for (int k = 1; k <= n + 1; ++k) fact *= k;
        term /= fact;
        for (int k = n + 1; k < n + 200; ++k) {
            tail += term;
            term *= ra / (k + 1.0);
        }
        if (tail <= tol) return n;
        if (n > 4000) throw std::runtime_error("min_order_for: tolerance unreachable");
    }
}

[[nodiscard]] inline GeneratingFamily build_family(int j_max, int order,
                                                   FamilyVariant variant = FamilyVariant::full) {
    if (j_max < 0) throw std::invalid_argument("build_family: j_max must be >= 0");
    const int n_min = 5 * j_max + 10;
    if (order < n_min)
        throw std::invalid_argument("build_family: order too small, minimum is " + std::to_string(n_min));
    GeneratingFamily fam;
    fam.j_max = j_max;
    fam.order = order;
    fam.variant = variant;
    const PowerSeries none = PowerSeries::zero(0.0, 0);
    fam.f.push_back(series_solve_P(none, {0, 0, 0, 1, 0}, order, variant));
    fam.g.push_back(series_solve_P(none, {0, 0, 0, 0, 1}, order, variant));
    // the recurrence consumes rhs coefficients only up to order - 5
    auto truncated = [order](const PowerSeries& p) {
        std::vector<double> c(p.coeffs.begin(), p.coeffs.begin() + (order - 4));
        return PowerSeries(0.0, std::move(c));
    };
    for (int j = 1; j <= j_max; ++j) {
        fam.f.push_back(series_solve_P(truncated(fam.f.back()), {0, 0, 0, 0, 0}, order, variant));
        fam.g.push_back(series_solve_P(truncated(fam.g.back()), {0, 0, 0, 0, 0}, order, variant));
    }
    for (int j = 0; j <= j_max; ++j) {
        fam.traces_f.push_back({ps_eval(fam.f[static_cast<std::size_t>(j)], -1.0),
                                ps_eval(ps_derivative(fam.f[static_cast<std::size_t>(j)], 1), -1.0)});
        fam.traces_g.push_back({ps_eval(fam.g[static_cast<std::size_t>(j)], -1.0),
                                ps_eval(ps_derivative(fam.g[static_cast<std::size_t>(j)], 1), -1.0)});
    }
    return fam;
}

/**
 * @brief Independent cross-check of the recurrence: evaluates the iterated
 *        integral  int_0^x int_0^y f0(y - xi) f_prev(xi) dxi dy  by nested
 *        Gauss-Legendre quadrature. Not used in the main pipeline.
 */
[[nodiscard]] inline double convolution_f_eval(const PowerSeries& f0, const PowerSeries& f_prev,
                                               int quad_points, double x) {
    if (quad_points < 16) throw std::invalid_argument("convolution_f_eval: quad_points >= 16 required");
    const GaussLegendre gl(quad_points);
    auto inner = [&](double y) {
        return gl.integrate([&](double xi) { return ps_eval(f0, y - xi) * ps_eval(f_prev, xi); }, 0.0, y);
    };
    return gl.integrate(inner, 0.0, x);
}

/// Single-integral analogue for the g family: int_0^x g0(x - xi) g_prev(xi) dxi.
[[nodiscard]] inline double convolution_g_eval(const PowerSeries& g0, const PowerSeries& g_prev,
                                               int quad_points, double x) {
    if (quad_points < 16) throw std::invalid_argument("convolution_g_eval: quad_points >= 16 required");
    const GaussLegendre gl(quad_points);
    return gl.integrate([&](double xi) { return ps_eval(g0, x - xi) * ps_eval(g_prev, xi); }, 0.0, x);
}

/**
 * @brief Max relative coefficient discrepancy of P^k f_j vs (-1)^k f_{j-k}
 *        (and the g analogue); relative to the largest reference coefficient.
 */
[[nodiscard]] inline double verify_Pk_identity(const GeneratingFamily& fam, int k, int j) {
    if (k < 0 || j < k || j > fam.j_max) throw std::invalid_argument("verify_Pk_identity: need 0 <= k <= j <= j_max");
    if (fam.order < 5 * k + 1) throw std::invalid_argument("verify_Pk_identity: series order exhausted");
    const double sign = (k % 2 == 0) ? 1.0 : -1.0;
    double worst = 0.0;
    for (int fg = 0; fg < 2; ++fg) {
        const auto& fam_v = (fg == 0) ? fam.f : fam.g;
        PowerSeries p = fam_v[static_cast<std::size_t>(j)];
        for (int i = 0; i < k; ++i) p = ps_apply_P(p);
        const PowerSeries& ref = fam_v[static_cast<std::size_t>(j - k)];
        double scale = 0.0;
        for (std::size_t m = 0; m < p.coeffs.size(); ++m) scale = std::max(scale, std::fabs(ref.coeffs[m]));
        double d = 0.0;
        for (std::size_t m = 0; m < p.coeffs.size(); ++m)
            d = std::max(d, std::fabs(p.coeffs[m] - sign * ref.coeffs[m]));
        worst = std::max(worst, (scale > 0.0) ? d / scale : d);
    }
    return worst;
}

/// Factorial envelope 2^j |x|^(5j+1) / (5j+1)! bounding |f_j| and |g_j|.
[[nodiscard]] inline double family_bound(int j, double x) {
    double v = std::pow(2.0, j);
    const int n = 5 * j + 1;
    for (int k = 1; k <= n; ++k) v *= std::fabs(x) / k;
    return v;
}

} // namespace kawaflat
