#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace kawaflat {

/**
 * @brief Truncated Taylor series about a base point.
 *
 * coeffs[k] is the k-th Taylor coefficient a_k, so the represented function
 * is sum_k a_k (x - base_point)^k. The truncation order N = coeffs.size()-1
 * is carried explicitly and shrinks under differentiation; accuracy loss is
 * visible in the type rather than hidden by zero-padding.
 */
struct PowerSeries {
    double base_point = 0.0;
    std::vector<double> coeffs{0.0};
    // Sticky flag set when an operation saw intermediate coefficients more
    // than 1e12 times larger than the result (catastrophic cancellation).
    bool cancel_warning = false;

    PowerSeries() = default;
    PowerSeries(double x0, std::vector<double> c) : base_point(x0), coeffs(std::move(c)) {
        if (coeffs.empty()) throw std::invalid_argument("PowerSeries: empty coefficient array");
        for (double a : coeffs)
            if (!std::isfinite(a)) throw std::invalid_argument("PowerSeries: non-finite coefficient");
    }

    [[nodiscard]] int order() const { return static_cast<int>(coeffs.size()) - 1; }

    static PowerSeries zero(double x0, int order) {
        return PowerSeries(x0, std::vector<double>(static_cast<std::size_t>(order) + 1, 0.0));
    }
};

/// Horner evaluation of sum_k a_k (x - x0)^k.
[[nodiscard]] inline double ps_eval(const PowerSeries& p, double x) {
    if (!std::isfinite(x)) throw std::invalid_argument("ps_eval: x not finite");
    const double t = x - p.base_point;
    double v = 0.0;
    for (std::size_t i = p.coeffs.size(); i-- > 0;) v = v * t + p.coeffs[i];
    return v;
}

/**
 * @brief k-th derivative as a series of order p.order() - k.
 *
 * coeffs[m] of the result equals a_{m+k} * (m+k)!/m!, realized as k repeated
 * first derivatives so that iterated and direct differentiation produce
 * bit-identical coefficients.
 */
[[nodiscard]] inline PowerSeries ps_derivative(const PowerSeries& p, int k) {
    if (k < 0 || k > p.order())
        throw std::invalid_argument("ps_derivative: derivative order exceeds truncation");
    if (k == 0) return p;
    std::vector<double> c = p.coeffs;
    for (int step = 0; step < k; ++step) {
        const std::size_t n = c.size() - 1;
        for (std::size_t m = 0; m < n; ++m) c[m] = c[m + 1] * static_cast<double>(m + 1);
        c.resize(n);
    }
    PowerSeries r(p.base_point, std::move(c));
    r.cancel_warning = p.cancel_warning;
    return r;
}

namespace detail {

// Cancellation guard threshold: flag when intermediates exceed 1e12x result.
inline constexpr double kCancelGuard = 1e12;

inline bool cancellation(double max_in, double max_out) {
    return max_in > 0.0 && max_in > kCancelGuard * max_out;
}

} // namespace detail

/// Sum of two series about the same base point, at the common truncation.
[[nodiscard]] inline PowerSeries ps_add(const PowerSeries& a, const PowerSeries& b, double sb = 1.0) {
    if (a.base_point != b.base_point)
        throw std::invalid_argument("ps_add: base point mismatch");
    const std::size_t n = std::min(a.coeffs.size(), b.coeffs.size());
    std::vector<double> out(n);
    double max_in = 0.0, max_out = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double ai = a.coeffs[i], bi = sb * b.coeffs[i];
        out[i] = ai + bi;
        max_in = std::max({max_in, std::fabs(ai), std::fabs(bi)});
        max_out = std::max(max_out, std::fabs(out[i]));
    }
    PowerSeries r(a.base_point, std::move(out));
    r.cancel_warning = a.cancel_warning || b.cancel_warning || detail::cancellation(max_in, max_out);
    return r;
}

[[nodiscard]] inline PowerSeries ps_scale(const PowerSeries& p, double s) {
    PowerSeries r = p;
    for (double& c : r.coeffs) c *= s;
    return r;
}

/**
 * @brief Apply P = d/dx + d^3/dx^3 - d^5/dx^5; the result has order p.order() - 5.
 */
[[nodiscard]] inline PowerSeries ps_apply_P(const PowerSeries& p) {
    if (p.order() < 5) throw std::invalid_argument("ps_apply_P: series order must be >= 5");
    const PowerSeries d1 = ps_derivative(p, 1);
    const PowerSeries d3 = ps_derivative(p, 3);
    const PowerSeries d5 = ps_derivative(p, 5);
    return ps_add(ps_add(d1, d3), d5, -1.0);
}

/// Largest coefficient magnitude (0 for the all-zero series).
[[nodiscard]] inline double ps_max_abs_coeff(const PowerSeries& p) {
    double m = 0.0;
    for (double c : p.coeffs) m = std::max(m, std::fabs(c));
    return m;
}

} // namespace kawaflat
