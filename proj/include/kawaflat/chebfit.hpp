#pragma once

#include <lapacke.h>

#include <cmath>
#include <stdexcept>
#include <vector>

namespace kawaflat {

/// Chebyshev expansion on [lo, hi].
struct ChebSeries {
    double lo = -1.0, hi = 1.0;
    std::vector<double> c; // coefficients of T_0..T_n in the mapped variable

    [[nodiscard]] double eval(double t) const {
        const double s = (2.0 * t - (lo + hi)) / (hi - lo);
        double b0 = 0.0, b1 = 0.0;
        for (std::size_t i = c.size(); i-- > 0;) {
            const double tmp = c[i] + 2.0 * s * b0 - b1;
            b1 = b0;
            b0 = tmp;
        }
        return b0 - s * b1;
    }

    /// Derivative series (degree drops by one); exact coefficient recurrence.
    [[nodiscard]] ChebSeries derivative() const {
        ChebSeries d;
        d.lo = lo;
        d.hi = hi;
        const int n = static_cast<int>(c.size()) - 1;
        if (n <= 0) {
            d.c = {0.0};
            return d;
        }
        std::vector<double> cp(static_cast<std::size_t>(n) + 2, 0.0);
        for (int k = n; k >= 1; --k)
            cp[static_cast<std::size_t>(k - 1)] = cp[static_cast<std::size_t>(k + 1)] + 2.0 * k * c[static_cast<std::size_t>(k)];
        cp[0] *= 0.5;
        cp.resize(static_cast<std::size_t>(n));
        const double scale = 2.0 / (hi - lo);
        for (double& v : cp) v *= scale;
        d.c = std::move(cp);
        return d;
    }
};

/// Least-squares Chebyshev fit of samples (ts, ys) on [lo, hi] (LAPACK dgels).
[[nodiscard]] inline ChebSeries cheb_fit(const std::vector<double>& ts, const std::vector<double>& ys,
                                         int degree, double lo, double hi) {
    const int m = static_cast<int>(ts.size());
    const int n = degree + 1;
    if (m < n) throw std::invalid_argument("cheb_fit: fewer samples than coefficients");
    if (!(hi > lo)) throw std::invalid_argument("cheb_fit: empty interval");
    // column-major design matrix of T_k at the mapped samples
    std::vector<double> A(static_cast<std::size_t>(m) * static_cast<std::size_t>(n));
    for (int i = 0; i < m; ++i) {
        const double s = (2.0 * ts[static_cast<std::size_t>(i)] - (lo + hi)) / (hi - lo);
        double p0 = 1.0, p1 = s;
        for (int k = 0; k < n; ++k) {
            double v;
            if (k == 0)
                v = 1.0;
            else if (k == 1)
                v = s;
            else {
                v = 2.0 * s * p1 - p0;
                p0 = p1;
                p1 = v;
            }
            A[static_cast<std::size_t>(i) + static_cast<std::size_t>(k) * static_cast<std::size_t>(m)] = v;
        }
    }
    std::vector<double> b = ys;
    const lapack_int info = LAPACKE_dgels(LAPACK_COL_MAJOR, 'N', m, n, 1, A.data(), m, b.data(), m);
    if (info != 0) throw std::runtime_error("cheb_fit: dgels failed (info=" + std::to_string(info) + ")");
    ChebSeries out;
    out.lo = lo;
    out.hi = hi;
    out.c.assign(b.begin(), b.begin() + n);
    return out;
}

} // namespace kawaflat
