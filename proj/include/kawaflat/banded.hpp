#pragma once

#include <lapacke.h>

#include <stdexcept>
#include <vector>

namespace kawaflat {

/**
 * @brief General banded matrix in LAPACK dgbtrf storage (column-major,
 *        ldab = 2*kl + ku + 1 with kl spare rows for pivoting fill-in).
 */
class BandedMatrix {
public:
    BandedMatrix(int n, int kl, int ku)
        : n_(n), kl_(kl), ku_(ku), ldab_(2 * kl + ku + 1),
          ab_(static_cast<std::size_t>(ldab_) * static_cast<std::size_t>(n), 0.0) {}

    [[nodiscard]] int size() const { return n_; }
    [[nodiscard]] int kl() const { return kl_; }
    [[nodiscard]] int ku() const { return ku_; }

    double& at(int i, int j) {
        if (j - i > ku_ || i - j > kl_) throw std::out_of_range("BandedMatrix: entry outside band");
        return ab_[static_cast<std::size_t>(kl_ + ku_ + i - j) +
                   static_cast<std::size_t>(j) * static_cast<std::size_t>(ldab_)];
    }
    [[nodiscard]] double get(int i, int j) const {
        if (j - i > ku_ || i - j > kl_ || i < 0 || j < 0 || i >= n_ || j >= n_) return 0.0;
        return ab_[static_cast<std::size_t>(kl_ + ku_ + i - j) +
                   static_cast<std::size_t>(j) * static_cast<std::size_t>(ldab_)];
    }

    /// y = A x
    void multiply(const std::vector<double>& x, std::vector<double>& y) const {
        y.assign(static_cast<std::size_t>(n_), 0.0);
        for (int i = 0; i < n_; ++i) {
            const int lo = std::max(0, i - kl_), hi = std::min(n_ - 1, i + ku_);
            double s = 0.0;
            for (int j = lo; j <= hi; ++j) s += get(i, j) * x[static_cast<std::size_t>(j)];
            y[static_cast<std::size_t>(i)] = s;
        }
    }

    [[nodiscard]] const std::vector<double>& storage() const { return ab_; }
    [[nodiscard]] std::vector<double>& storage() { return ab_; }
    [[nodiscard]] int ldab() const { return ldab_; }

private:
    int n_, kl_, ku_, ldab_;
    std::vector<double> ab_;
};

/// LU factorization of a banded matrix (LAPACK dgbtrf/dgbtrs).
class BandedLU {
public:
    explicit BandedLU(BandedMatrix a) : a_(std::move(a)), ipiv_(static_cast<std::size_t>(a_.size())) {
        const lapack_int info =
            LAPACKE_dgbtrf(LAPACK_COL_MAJOR, a_.size(), a_.size(), a_.kl(), a_.ku(), a_.storage().data(),
                           a_.ldab(), ipiv_.data());
        if (info != 0) throw std::runtime_error("BandedLU: singular banded system (dgbtrf info=" +
                                                std::to_string(info) + ")");
    }

    void solve(std::vector<double>& rhs) const {
        if (static_cast<int>(rhs.size()) != a_.size()) throw std::invalid_argument("BandedLU: rhs size mismatch");
        const lapack_int info =
            LAPACKE_dgbtrs(LAPACK_COL_MAJOR, 'N', a_.size(), a_.kl(), a_.ku(), 1, a_.storage().data(),
                           a_.ldab(), ipiv_.data(), rhs.data(), a_.size());
        if (info != 0) throw std::runtime_error("BandedLU: solve failed (dgbtrs info=" + std::to_string(info) + ")");
    }

private:
    BandedMatrix a_;
    std::vector<lapack_int> ipiv_;
};

} // namespace kawaflat
