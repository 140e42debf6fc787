#pragma once

#include <algorithm>
#include <span>
#include <stdexcept>
#include <vector>

namespace kawaflat {

/**
 * @brief Finite-difference weights for the m-th derivative at z on arbitrary
 *        nodes (Fornberg's recursion; equivalent to solving the local
 *        Vandermonde system, but numerically stable).
 *
 * Real is double in the solver; tests instantiate __float128 where the
 *        oracle needs weights beyond double round-off.
 */
template <class Real = double>
[[nodiscard]] inline std::vector<Real> fd_weights_t(Real z, std::span<const Real> nodes, int m) {
    const int n = static_cast<int>(nodes.size()) - 1;
    if (n < m) throw std::invalid_argument("fd_weights: need at least m+1 nodes");
    std::vector<std::vector<Real>> c(static_cast<std::size_t>(n) + 1,
                                     std::vector<Real>(static_cast<std::size_t>(m) + 1, Real(0)));
    Real c1 = 1;
    Real c4 = nodes[0] - z;
    c[0][0] = 1;
    for (int i = 1; i <= n; ++i) {
        const int mn = std::min(i, m);
        Real c2 = 1;
        const Real c5 = c4;
        c4 = nodes[static_cast<std::size_t>(i)] - z;
        for (int j = 0; j < i; ++j) {
            const Real c3 = nodes[static_cast<std::size_t>(i)] - nodes[static_cast<std::size_t>(j)];
            c2 *= c3;
            if (j == i - 1) {
                for (int k = mn; k >= 1; --k)
                    c[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)] =
                        c1 *
                        (Real(k) * c[static_cast<std::size_t>(i - 1)][static_cast<std::size_t>(k - 1)] -
                         c5 * c[static_cast<std::size_t>(i - 1)][static_cast<std::size_t>(k)]) /
                        c2;
                c[static_cast<std::size_t>(i)][0] = -c1 * c5 * c[static_cast<std::size_t>(i - 1)][0] / c2;
            }
            for (int k = mn; k >= 1; --k)
                c[static_cast<std::size_t>(j)][static_cast<std::size_t>(k)] =
                    (c4 * c[static_cast<std::size_t>(j)][static_cast<std::size_t>(k)] -
                     Real(k) * c[static_cast<std::size_t>(j)][static_cast<std::size_t>(k - 1)]) /
                    c3;
            c[static_cast<std::size_t>(j)][0] = c4 * c[static_cast<std::size_t>(j)][0] / c3;
        }
        c1 = c2;
    }
    std::vector<Real> w(static_cast<std::size_t>(n) + 1);
    for (int i = 0; i <= n; ++i)
        w[static_cast<std::size_t>(i)] = c[static_cast<std::size_t>(i)][static_cast<std::size_t>(m)];
    return w;
}

[[nodiscard]] inline std::vector<double> fd_weights(double z, std::span<const double> nodes, int m) {
    return fd_weights_t<double>(z, nodes, m);
}

} // namespace kawaflat
