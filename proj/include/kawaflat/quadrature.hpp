#pragma once

#include <cmath>
#include <stdexcept>
#include <utility>
#include <vector>

namespace kawaflat {

/// Gauss-Legendre nodes and weights on [-1,1], by Newton iteration on P_n.
struct GaussLegendre {
    std::vector<double> nodes, weights;

    explicit GaussLegendre(int n) {
        if (n < 1) throw std::invalid_argument("GaussLegendre: n >= 1 required");
        nodes.resize(static_cast<std::size_t>(n));
        weights.resize(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) {
            // Chebyshev-based initial guess, converges in a handful of steps.
            double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
            double dp = 0.0;
            for (int it = 0; it < 100; ++it) {
                double p0 = 1.0, p1 = x;
                for (int k = 2; k <= n; ++k) {
                    const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                    p0 = p1;
                    p1 = p2;
                }
                dp = n * (x * p1 - p0) / (x * x - 1.0);
                const double dx = p1 / dp;
                x -= dx;
                if (std::fabs(dx) < 1e-15) break;
            }
            nodes[static_cast<std::size_t>(i)] = x;
            weights[static_cast<std::size_t>(i)] = 2.0 / ((1.0 - x * x) * dp * dp);
        }
    }

    /// Integrate f over [a,b].
    template <class F>
    [[nodiscard]] double integrate(F&& f, double a, double b) const {
        const double m = 0.5 * (a + b), h = 0.5 * (b - a);
        double s = 0.0;
        for (std::size_t i = 0; i < nodes.size(); ++i) s += weights[i] * f(m + h * nodes[i]);
        return s * h;
    }
};

} // namespace kawaflat
