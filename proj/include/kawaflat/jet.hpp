#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace kawaflat {

/**
 * @brief Value plus first M derivatives of a scalar function at one point.
 *
 * values[m] is the m-th derivative (NOT the Taylor coefficient; divide by m!
 * to normalize). Immutable by convention after construction.
 */
struct Jet {
    double point = 0.0;
    std::vector<double> values{0.0};

    Jet() = default;
    Jet(double p, std::vector<double> v) : point(p), values(std::move(v)) {
        if (values.empty()) throw std::invalid_argument("Jet: empty value array");
        for (double x : values)
            if (!std::isfinite(x)) throw std::invalid_argument("Jet: non-finite entry");
    }

    [[nodiscard]] int max_order() const { return static_cast<int>(values.size()) - 1; }

    static Jet constant(double point, double value, int M) {
        std::vector<double> v(static_cast<std::size_t>(M) + 1, 0.0);
        v[0] = value;
        return Jet(point, std::move(v));
    }
    /// Jet of the identity map t -> t.
    static Jet variable(double point, int M) {
        std::vector<double> v(static_cast<std::size_t>(M) + 1, 0.0);
        v[0] = point;
        if (M >= 1) v[1] = 1.0;
        return Jet(point, std::move(v));
    }
};

namespace detail {

/// Row n of Pascal's triangle in doubles (exact up to n = 56).
inline std::vector<double> binomial_row(int n) {
    std::vector<double> row(static_cast<std::size_t>(n) + 1);
    row[0] = 1.0;
    for (int k = 1; k <= n; ++k)
        row[static_cast<std::size_t>(k)] =
            row[static_cast<std::size_t>(k - 1)] * static_cast<double>(n - k + 1) / static_cast<double>(k);
    return row;
}

} // namespace detail

/// Leibniz product: values[n] = sum_j C(n,j) a[j] b[n-j].
[[nodiscard]] inline Jet jet_mul(const Jet& a, const Jet& b) {
    if (a.point != b.point) throw std::invalid_argument("jet_mul: point mismatch");
    if (a.values.size() != b.values.size()) throw std::invalid_argument("jet_mul: order mismatch");
    const int M = a.max_order();
    std::vector<double> out(static_cast<std::size_t>(M) + 1, 0.0);
    for (int n = 0; n <= M; ++n) {
        const auto bin = detail::binomial_row(n);
        double s = 0.0;
        for (int j = 0; j <= n; ++j)
            s += bin[static_cast<std::size_t>(j)] * a.values[static_cast<std::size_t>(j)] *
                 b.values[static_cast<std::size_t>(n - j)];
        out[static_cast<std::size_t>(n)] = s;
    }
    return Jet(a.point, std::move(out));
}

[[nodiscard]] inline Jet jet_add(const Jet& a, const Jet& b, double sb = 1.0) {
    if (a.point != b.point || a.values.size() != b.values.size())
        throw std::invalid_argument("jet_add: point/order mismatch");
    Jet r = a;
    for (std::size_t i = 0; i < r.values.size(); ++i) r.values[i] += sb * b.values[i];
    return r;
}

/**
 * @brief Chain rule through an affine substitution.
 *
 * Given the jet of f at x0, returns the jet of g(t) = f(scale*t + shift) at
 * the preimage t0 = (x0 - shift)/scale: values[m] <- values[m]*scale^m.
 */
[[nodiscard]] inline Jet jet_compose_affine(const Jet& j, double scale, double shift) {
    if (scale == 0.0) throw std::invalid_argument("jet_compose_affine: zero scale");
    Jet r = j;
    r.point = (j.point - shift) / scale;
    double f = 1.0;
    for (std::size_t m = 1; m < r.values.size(); ++m) {
        f *= scale;
        r.values[m] *= f;
    }
    return r;
}

// ---------------------------------------------------------------------------
// Taylor-mode propagation through elementary functions. These work on
// normalized coefficients c_k = f^(k)/k!; the standard recurrences below are
// exact to round-off at fixed order.
// ---------------------------------------------------------------------------
namespace taylor {

using Coeffs = std::vector<double>;

[[nodiscard]] inline Coeffs from_jet(const Jet& j) {
    Coeffs c = j.values;
    double f = 1.0;
    for (std::size_t k = 1; k < c.size(); ++k) {
        f *= static_cast<double>(k);
        c[k] /= f;
    }
    return c;
}

[[nodiscard]] inline Jet to_jet(double point, const Coeffs& c) {
    std::vector<double> v = c;
    double f = 1.0;
    for (std::size_t k = 1; k < v.size(); ++k) {
        f *= static_cast<double>(k);
        v[k] *= f;
    }
    return Jet(point, std::move(v));
}

[[nodiscard]] inline Coeffs exp(const Coeffs& u) {
    const std::size_t n = u.size();
    Coeffs e(n, 0.0);
    e[0] = std::exp(u[0]);
    for (std::size_t k = 1; k < n; ++k) {
        double s = 0.0;
        for (std::size_t j = 0; j < k; ++j) s += static_cast<double>(k - j) * u[k - j] * e[j];
        e[k] = s / static_cast<double>(k);
    }
    return e;
}

/// u^alpha for real alpha; requires u[0] > 0.
[[nodiscard]] inline Coeffs pow(const Coeffs& u, double alpha) {
    if (u[0] <= 0.0) throw std::domain_error("taylor::pow: base must be positive");
    const std::size_t n = u.size();
    Coeffs p(n, 0.0);
    p[0] = std::pow(u[0], alpha);
    for (std::size_t k = 1; k < n; ++k) {
        double s = 0.0;
        for (std::size_t j = 0; j < k; ++j)
            s += (alpha * static_cast<double>(k - j) - static_cast<double>(j)) * u[k - j] * p[j];
        p[k] = s / (static_cast<double>(k) * u[0]);
    }
    return p;
}

[[nodiscard]] inline Coeffs recip(const Coeffs& u) {
    if (u[0] == 0.0) throw std::domain_error("taylor::recip: division by zero constant term");
    const std::size_t n = u.size();
    Coeffs r(n, 0.0);
    r[0] = 1.0 / u[0];
    for (std::size_t k = 1; k < n; ++k) {
        double s = 0.0;
        for (std::size_t j = 0; j < k; ++j) s += u[k - j] * r[j];
        r[k] = -s / u[0];
    }
    return r;
}

} // namespace taylor

} // namespace kawaflat
