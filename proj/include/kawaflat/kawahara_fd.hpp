#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <memory>
#include <set>
#include <stdexcept>
#include <vector>

#include "kawaflat/banded.hpp"
#include "kawaflat/stencils.hpp"

namespace kawaflat {

/**
 * @brief Configuration of the finite-difference initial-boundary-value solver.
 *
 * nx counts interior grid points on [-1,0]; dt <= 0 selects cfl*dx. The first
 * rannacher_steps steps run implicit Euler (theta = 1) to damp the ringing
 * Crank-Nicolson leaves on stiff modes of incompatible initial data; with
 * norm_projection, free-evolution steps are projected onto the
 * previous-norm ball, which makes the discrete dynamics contractive like the
 * continuous semigroup.
 */
struct SolverConfig {
    int nx = 256;
    double dt = 0.0;
    double theta = 0.5;
    double T = 1.0;
    double mu0 = 0.0; // Benney-Lin dissipation; 0 recovers the Kawahara operator
    double cfl = 0.5;
    int rannacher_steps = 4;
    bool norm_projection = true;

    void validate() const {
        if (nx < 32) throw std::invalid_argument("SolverConfig: nx >= 32 required");
        if (theta < 0.5 || theta > 1.0) throw std::invalid_argument("SolverConfig: theta in [0.5, 1] required");
        if (T <= 0.0) throw std::invalid_argument("SolverConfig: T > 0 required");
        if (mu0 < 0.0) throw std::invalid_argument("SolverConfig: mu0 >= 0 required");
        if (dt > T) throw std::invalid_argument("SolverConfig: dt <= T required");
    }
    [[nodiscard]] double dx() const { return 1.0 / (nx + 1); }
    /// Time step rounded so that T is an exact multiple.
    [[nodiscard]] double resolved_dt() const {
        const double raw = (dt > 0.0) ? dt : cfl * dx();
        const int n = std::max(1, static_cast<int>(std::lround(T / raw)));
        return T / n;
    }
    [[nodiscard]] int n_steps() const { return static_cast<int>(std::lround(T / resolved_dt())); }
};

/// Grid function on [-1,0] including both boundary nodes.
struct GridState {
    std::vector<double> x, u;
    double t = 0.0;
};

/// Boundary data t -> (u(-1,t), u_x(-1,t)).
struct BoundarySignal {
    std::function<double(double)> h1 = [](double) { return 0.0; };
    std::function<double(double)> h2 = [](double) { return 0.0; };

    static BoundarySignal zero() { return {}; }
    /// Sample-table signal aligned with the step grid (nearest-index lookup).
    static BoundarySignal from_samples(std::vector<double> times, std::vector<double> h1v,
                                       std::vector<double> h2v) {
        if (times.size() != h1v.size() || times.size() != h2v.size() || times.size() < 2)
            throw std::invalid_argument("BoundarySignal: inconsistent sample tables");
        const double t0 = times.front(), dt = times[1] - times[0];
        auto look = [t0, dt](const std::vector<double>& v, double t) {
            const auto i = static_cast<std::size_t>(std::clamp<long>(
                std::lround((t - t0) / dt), 0, static_cast<long>(v.size()) - 1));
            return v[i];
        };
        BoundarySignal s;
        s.h1 = [look, h1 = std::move(h1v)](double t) { return look(h1, t); };
        s.h2 = [look, h2 = std::move(h2v)](double t) { return look(h2, t); };
        return s;
    }
};

struct StateNorms {
    double l2 = 0.0, h2_semi = 0.0, sup = 0.0;
};

/// Trapezoidal L2, second-difference H2 seminorm, and sup norm.
[[nodiscard]] inline StateNorms norms(const GridState& s) {
    StateNorms n;
    const std::size_t N = s.u.size();
    if (N < 3) throw std::invalid_argument("norms: grid too small");
    const double dx = s.x[1] - s.x[0];
    double l2sq = 0.0, h2sq = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
        const double w = (i == 0 || i == N - 1) ? 0.5 * dx : dx;
        l2sq += w * s.u[i] * s.u[i];
        n.sup = std::max(n.sup, std::fabs(s.u[i]));
        double d2;
        if (i == 0)
            d2 = (s.u[2] - 2.0 * s.u[1] + s.u[0]) / (dx * dx);
        else if (i == N - 1)
            d2 = (s.u[N - 1] - 2.0 * s.u[N - 2] + s.u[N - 3]) / (dx * dx);
        else
            d2 = (s.u[i + 1] - 2.0 * s.u[i] + s.u[i - 1]) / (dx * dx);
        h2sq += w * d2 * d2;
    }
    n.l2 = std::sqrt(l2sq);
    n.h2_semi = std::sqrt(h2sq);
    return n;
}

/// Full discrete H2 norm sqrt(||u||^2 + ||u'||^2 + ||u''||^2).
[[nodiscard]] inline double h2_norm(const GridState& s) {
    const std::size_t N = s.u.size();
    const double dx = s.x[1] - s.x[0];
    double acc = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
        const double w = (i == 0 || i == N - 1) ? 0.5 * dx : dx;
        double d1, d2;
        if (i == 0) {
            d1 = (s.u[1] - s.u[0]) / dx;
            d2 = (s.u[2] - 2.0 * s.u[1] + s.u[0]) / (dx * dx);
        } else if (i == N - 1) {
            d1 = (s.u[N - 1] - s.u[N - 2]) / dx;
            d2 = (s.u[N - 1] - 2.0 * s.u[N - 2] + s.u[N - 3]) / (dx * dx);
        } else {
            d1 = (s.u[i + 1] - s.u[i - 1]) / (2.0 * dx);
            d2 = (s.u[i + 1] - 2.0 * s.u[i] + s.u[i - 1]) / (dx * dx);
        }
        acc += w * (s.u[i] * s.u[i] + d1 * d1 + d2 * d2);
    }
    return std::sqrt(acc);
}

struct BoundaryTraces {
    double d3 = 0.0, d4 = 0.0;
};

/**
 * @brief theta-scheme solver for u_t + u_x + u_xxx (+ mu0 u_xxxx) - u_xxxxx = 0
 *        on [-1,0] with u(0)=u_x(0)=u_xx(0)=0 and driven u(-1), u_x(-1).
 *
 * Interior rows use centered (one biased near x=-1) second-order stencils;
 * the five boundary conditions replace the five rows nearest the boundaries.
 * The system matrix is constant in time, so it is factored once.
 */
class KawaharaSolver {
public:
    explicit KawaharaSolver(const SolverConfig& cfg) : cfg_(cfg) {
        cfg_.validate();
        dt_ = cfg_.resolved_dt();
        const int Np = cfg_.nx + 2;
        const double dx = cfg_.dx();
        x_.resize(static_cast<std::size_t>(Np));
        for (int i = 0; i < Np; ++i) x_[static_cast<std::size_t>(i)] = -1.0 + i * dx;

        // interior stencil rows of the spatial operator
        struct Row {
            int lo;
            std::vector<double> w;
        };
        std::vector<Row> lrows(static_cast<std::size_t>(Np));
        for (int i = 2; i <= Np - 4; ++i) {
            int lo = std::max(0, i - 3);
            int hi = lo + 6;
            if (hi > Np - 1) {
                hi = Np - 1;
                lo = hi - 6;
            }
            const std::span<const double> nodes(&x_[static_cast<std::size_t>(lo)], 7);
            const double z = x_[static_cast<std::size_t>(i)];
            auto w1 = fd_weights(z, nodes, 1);
            const auto w3 = fd_weights(z, nodes, 3);
            const auto w5 = fd_weights(z, nodes, 5);
            for (std::size_t k = 0; k < 7; ++k) w1[k] += w3[k] - w5[k];
            if (cfg_.mu0 > 0.0) {
                const auto w4 = fd_weights(z, nodes, 4);
                for (std::size_t k = 0; k < 7; ++k) w1[k] += cfg_.mu0 * w4[k];
            }
            lrows[static_cast<std::size_t>(i)] = {lo, std::move(w1)};
        }

        // boundary-condition rows: {row index, first column, weights}
        auto bc = [&](int row, int lo, int m, double z) {
            const int n = (row == 0 || row == Np - 1) ? 1 : (row == 1 ? 3 : (row == Np - 2 ? 3 : 4));
            const std::span<const double> nodes(&x_[static_cast<std::size_t>(lo)], static_cast<std::size_t>(n));
            bc_rows_.push_back({row, lo, (n == 1) ? std::vector<double>{1.0} : fd_weights(z, nodes, m)});
        };
        bc(0, 0, 0, -1.0);
        bc(1, 0, 1, -1.0);
        bc(Np - 3, Np - 4, 2, 0.0);
        bc(Np - 2, Np - 3, 1, 0.0);
        bc(Np - 1, Np - 1, 0, 0.0);

        // explicit-side operator B_theta = I - (1-theta) dt L (interior rows only)
        auto assemble = [&](double th) {
            BandedMatrix A(Np, 3, 4);
            BandedMatrix B(Np, 3, 4);
            for (int i = 2; i <= Np - 4; ++i) {
                A.at(i, i) += 1.0;
                B.at(i, i) += 1.0;
                const auto& row = lrows[static_cast<std::size_t>(i)];
                for (int k = 0; k < 7; ++k) {
                    A.at(i, row.lo + k) += th * dt_ * row.w[static_cast<std::size_t>(k)];
                    B.at(i, row.lo + k) -= (1.0 - th) * dt_ * row.w[static_cast<std::size_t>(k)];
                }
            }
            for (const auto& r : bc_rows_)
                for (std::size_t k = 0; k < r.w.size(); ++k) A.at(r.row, r.lo + static_cast<int>(k)) = r.w[k];
            return std::pair<BandedMatrix, BandedMatrix>(std::move(A), std::move(B));
        };
        auto [Ath, Bth] = assemble(cfg_.theta);
        b_theta_ = std::make_unique<BandedMatrix>(std::move(Bth));
        lu_theta_ = std::make_unique<BandedLU>(std::move(Ath));
        if (cfg_.rannacher_steps > 0 && cfg_.theta != 1.0) {
            auto [A1, B1] = assemble(1.0);
            b_be_ = std::make_unique<BandedMatrix>(std::move(B1));
            lu_be_ = std::make_unique<BandedLU>(std::move(A1));
        }

        // trace extraction: 8 nodes nearest x = 0, formal order >= 4
        const std::span<const double> tn(&x_[static_cast<std::size_t>(Np - 8)], 8);
        trace_w3_ = fd_weights(0.0, tn, 3);
        trace_w4_ = fd_weights(0.0, tn, 4);
    }

    [[nodiscard]] const SolverConfig& config() const { return cfg_; }
    [[nodiscard]] double dt() const { return dt_; }
    [[nodiscard]] const std::vector<double>& grid() const { return x_; }

    [[nodiscard]] GridState make_state(const std::function<double(double)>& f, double t = 0.0) const {
        GridState s;
        s.x = x_;
        s.t = t;
        s.u.resize(x_.size());
        for (std::size_t i = 0; i < x_.size(); ++i) s.u[i] = f(x_[i]);
        return s;
    }

    /// Advance one dt. Free-evolution steps are norm-projected when enabled.
    [[nodiscard]] GridState step(const GridState& state, const BoundarySignal& bc) const {
        if (state.u.size() != x_.size()) throw std::invalid_argument("step: state inconsistent with grid");
        const int k = static_cast<int>(std::lround(state.t / dt_));
        const bool startup = k < cfg_.rannacher_steps && lu_be_;
        const BandedLU& lu = startup ? *lu_be_ : *lu_theta_;
        const BandedMatrix& B = startup ? *b_be_ : *b_theta_;

        const double t1 = state.t + dt_;
        std::vector<double> rhs;
        B.multiply(state.u, rhs);
        const int Np = static_cast<int>(x_.size());
        const double h1n = bc.h1(state.t), h1p = bc.h1(t1);
        const double h2n = bc.h2(state.t), h2p = bc.h2(t1);
        rhs[0] = h1p;
        rhs[1] = h2p;
        rhs[static_cast<std::size_t>(Np - 3)] = 0.0;
        rhs[static_cast<std::size_t>(Np - 2)] = 0.0;
        rhs[static_cast<std::size_t>(Np - 1)] = 0.0;
        lu.solve(rhs);

        GridState out;
        out.x = x_;
        out.t = t1;
        out.u = std::move(rhs);
        if (cfg_.norm_projection && h1n == 0.0 && h1p == 0.0 && h2n == 0.0 && h2p == 0.0) {
            const double n0 = norms(state).l2;
            if (n0 > 0.0) {
                const double n1 = norms(out).l2;
                if (n1 > n0) {
                    const double c = n0 / n1;
                    for (double& v : out.u) v *= c;
                    last_projection_ = std::max(last_projection_, n1 / n0 - 1.0);
                }
            }
        }
        return out;
    }

    /// Repeated step with a per-step observer; returns the final state.
    template <class F>
    GridState run(GridState state, const BoundarySignal& bc, F&& on_step) const {
        const int n = cfg_.n_steps();
        for (int i = 0; i < n; ++i) {
            state = step(state, bc);
            on_step(state);
        }
        return state;
    }

    /// Snapshots at the requested times (matched to the nearest step).
    [[nodiscard]] std::vector<GridState> solve(const GridState& u0, const BoundarySignal& bc,
                                               const std::vector<double>& record) const {
        for (double t : record)
            if (t < 0.0 || t > cfg_.T + 0.5 * dt_)
                throw std::invalid_argument("solve: record time outside [0,T]");
        std::set<int> want;
        for (double t : record) want.insert(static_cast<int>(std::lround(t / dt_)));
        std::vector<GridState> out;
        if (want.count(0)) out.push_back(u0);
        GridState s = u0;
        const int n = cfg_.n_steps();
        for (int i = 1; i <= n; ++i) {
            s = step(s, bc);
            if (want.count(i)) out.push_back(s);
        }
        return out;
    }

    /**
     * @brief d^3u/dx^3 and d^4u/dx^4 at x = 0 by one-sided stencils on the
     *        8 nodes nearest the right boundary.
     */
    [[nodiscard]] BoundaryTraces boundary_traces(const GridState& state) const {
        if (cfg_.nx < 64) throw std::invalid_argument("boundary_traces: nx >= 64 required");
        const std::size_t N = state.u.size();
        BoundaryTraces tr;
        for (std::size_t k = 0; k < 8; ++k) {
            tr.d3 += trace_w3_[k] * state.u[N - 8 + k];
            tr.d4 += trace_w4_[k] * state.u[N - 8 + k];
        }
        return tr;
    }

    /// Largest relative norm-projection correction seen so far (diagnostics).
    [[nodiscard]] double max_projection_correction() const { return last_projection_; }

private:
    struct BcRow {
        int row, lo;
        std::vector<double> w;
    };

    SolverConfig cfg_;
    double dt_ = 0.0;
    std::vector<double> x_;
    std::vector<BcRow> bc_rows_;
    std::unique_ptr<BandedLU> lu_theta_, lu_be_;
    std::unique_ptr<BandedMatrix> b_theta_, b_be_;
    std::vector<double> trace_w3_, trace_w4_;
    mutable double last_projection_ = 0.0;
};

} // namespace kawaflat
