#pragma once

#include <array>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "kawaflat/flatness.hpp"
#include "kawaflat/genfun.hpp"
#include "kawaflat/gevrey.hpp"
#include "kawaflat/power_series.hpp"

namespace kawaflat {

/// Radius threshold 2 * 6^(1/5) * e^(1/(5e)) below which reachability of a
/// disk-holomorphic target is not guaranteed.
[[nodiscard]] inline double r0_constant() {
    return 2.0 * std::pow(6.0, 0.2) * std::exp(1.0 / (5.0 * std::exp(1.0)));
}

/**
 * @brief Candidate target: restriction to [-1,0] of a function holomorphic on
 *        D(0, radius), given by its Taylor series about 0.
 */
struct ReachTarget {
    PowerSeries u1;
    double radius = 0.0;
    int n_check = 4; // depth of boundary-condition verification
};

struct MembershipDiagnostics {
    bool radius_ok = false;
    // bc_residuals[n] = (|P^n u1(0)|, |d/dx P^n u1(0)|, |d2/dx2 P^n u1(0)|)
    std::vector<std::array<double, 3>> bc_residuals;
    double tolerance = 0.0;

    [[nodiscard]] bool pass() const {
        if (!radius_ok) return false;
        for (const auto& r : bc_residuals)
            for (double v : r)
                if (v > tolerance) return false;
        return true;
    }
};

[[nodiscard]] inline MembershipDiagnostics check_membership(const ReachTarget& t) {
    if (t.u1.order() < 5 * t.n_check + 3)
        throw std::invalid_argument("check_membership: series order must be >= 5*n_check + 3");
    MembershipDiagnostics d;
    d.radius_ok = t.radius > 2.0 * r0_constant();
    // residuals are linear functionals of double-precision coefficients
    d.tolerance = 1e-8 * std::max(1.0, ps_max_abs_coeff(t.u1));
    PowerSeries p = t.u1;
    for (int n = 0; n <= t.n_check; ++n) {
        std::array<double, 3> row{};
        double fact = 1.0;
        for (int j = 0; j < 3; ++j) {
            if (j > 0) fact *= j;
            row[static_cast<std::size_t>(j)] =
                std::fabs(p.coeffs[static_cast<std::size_t>(j)] * fact);
        }
        d.bc_residuals.push_back(row);
        if (n < t.n_check) p = ps_apply_P(p);
    }
    return d;
}

struct ReachCoefficients {
    std::vector<double> c, b;

    [[nodiscard]] int n_max() const { return static_cast<int>(std::max(c.size(), b.size())) - 1; }
};

/**
 * @brief Flat-output terminal data of the target:
 *        c_n = (-1)^n d^3/dx^3 P^n u1 (0),  b_n = (-1)^n d^4/dx^4 P^n u1 (0).
 */
[[nodiscard]] inline ReachCoefficients extract_coefficients(const ReachTarget& t, int N) {
    if (t.u1.order() < 5 * N + 4)
        throw std::invalid_argument("extract_coefficients: series order exhausted, need >= 5N + 4");
    ReachCoefficients co;
    co.c.resize(static_cast<std::size_t>(N) + 1);
    co.b.resize(static_cast<std::size_t>(N) + 1);
    PowerSeries p = t.u1;
    double sign = 1.0;
    for (int n = 0; n <= N; ++n) {
        co.c[static_cast<std::size_t>(n)] = sign * p.coeffs[3] * 6.0;  // 3! a_3
        co.b[static_cast<std::size_t>(n)] = sign * p.coeffs[4] * 24.0; // 4! a_4
        if (n < N) p = ps_apply_P(p);
        sign = -sign;
    }
    return co;
}

/// Fitted geometric factor H with |c_n| <= C * H^n * (5n)!; admissible
/// targets must stay below 1.
[[nodiscard]] inline double fit_coefficient_growth(const ReachCoefficients& co) {
    double h = 0.0;
    auto scan = [&](const std::vector<double>& v) {
        double fact = 1.0; // (5n)!
        for (std::size_t n = 0; n < v.size(); ++n) {
            if (n > 0)
                for (int k = 5 * static_cast<int>(n) - 4; k <= 5 * static_cast<int>(n); ++k) fact *= k;
            if (v[n] != 0.0 && n > 0) h = std::max(h, std::pow(std::fabs(v[n]) / fact, 1.0 / static_cast<double>(n)));
        }
    };
    scan(co.c);
    scan(co.b);
    return h;
}

/**
 * @brief Reachability plan: y = f*beta, z = g*beta with f, g the Taylor
 *        polynomials at T interpolating the extracted coefficients.
 *
 * The finite truncation achieves y^(n)(T) = c_n exactly for n <= min(N, M)
 * (beta is flat at T) and y == 0 left of tau (beta vanishes there).
 */
[[nodiscard]] inline TrajectoryPlan plan_reach(const ReachCoefficients& co, double tau, double T,
                                               const std::vector<double>& times, int j_max = -1,
                                               double K = 1.0) {
    if (!(tau > 0.0 && tau < T)) throw std::invalid_argument("plan_reach: 0 < tau < T required");
    if (j_max < 0) j_max = co.n_max();
    const int rows = j_max + 2;

    TrajectoryPlan plan;
    plan.times = times;
    plan.j_max = j_max;
    plan.s = 5.0;
    plan.tau = tau;
    plan.y_derivs.assign(static_cast<std::size_t>(rows), std::vector<double>(times.size(), 0.0));
    plan.z_derivs.assign(static_cast<std::size_t>(rows), std::vector<double>(times.size(), 0.0));

    auto poly_jet = [&](const std::vector<double>& coefs, double t) {
        // jet of sum_n coefs[n] (t-T)^n / n!
        std::vector<double> v(static_cast<std::size_t>(rows), 0.0);
        for (int m = 0; m < rows; ++m) {
            double acc = 0.0;
            for (int n = static_cast<int>(coefs.size()) - 1; n >= m; --n) {
                double term = coefs[static_cast<std::size_t>(n)];
                for (int k = 1; k <= n - m; ++k) term *= (t - T) / k;
                acc += term;
            }
            v[static_cast<std::size_t>(m)] = acc;
        }
        return Jet(t, std::move(v));
    };

    for (std::size_t i = 0; i < times.size(); ++i) {
        const double t = times[i];
        if (t < tau) continue;
        const Jet b = beta_jet(t, tau, T, rows - 1, K);
        const Jet y = jet_mul(poly_jet(co.c, t), b);
        const Jet z = jet_mul(poly_jet(co.b, t), b);
        for (int j = 0; j < rows; ++j) {
            plan.y_derivs[static_cast<std::size_t>(j)][i] = y.values[static_cast<std::size_t>(j)];
            plan.z_derivs[static_cast<std::size_t>(j)][i] = z.values[static_cast<std::size_t>(j)];
        }
    }
    return plan;
}

/// Reassemble sum_n c_n f_n + b_n g_n; round-trip partner of extraction.
[[nodiscard]] inline PowerSeries reconstruct_target(const GeneratingFamily& fam, const ReachCoefficients& co) {
    if (co.n_max() > fam.j_max) throw std::invalid_argument("reconstruct_target: co.N <= fam.j_max required");
    PowerSeries acc = PowerSeries::zero(0.0, fam.order);
    for (std::size_t n = 0; n < co.c.size(); ++n)
        if (co.c[n] != 0.0) acc = ps_add(acc, ps_scale(fam.f[n], co.c[n]));
    for (std::size_t n = 0; n < co.b.size(); ++n)
        if (co.b[n] != 0.0) acc = ps_add(acc, ps_scale(fam.g[n], co.b[n]));
    return acc;
}

class MembershipError : public std::runtime_error {
public:
    MembershipError(std::string msg, MembershipDiagnostics d)
        : std::runtime_error(std::move(msg)), diagnostics(std::move(d)) {}
    MembershipDiagnostics diagnostics;
};

struct ReachReport {
    double target_error_sup = 0.0;
    double target_error_l2 = 0.0;
    double target_l2 = 0.0, target_sup = 0.0;
    double tail_bound = 0.0;
    double coefficient_growth = 0.0;
    MembershipDiagnostics membership;
    ControlSignal controls;
};

/**
 * @brief Reachability pipeline: extract -> plan -> synthesize -> drive the
 *        solver from u0 = 0 -> compare u(.,T) with the target.
 */
[[nodiscard]] inline ReachReport run_reach_experiment(const ReachTarget& target, double tau, double T,
                                                      int j_max, const SolverConfig& cfg,
                                                      const GeneratingFamily& fam) {
    ReachReport rep;
    rep.membership = check_membership(target);
    if (!rep.membership.pass())
        throw MembershipError("run_reach_experiment: target failed reachable-set membership diagnostics",
                              rep.membership);

    const ReachCoefficients co = extract_coefficients(target, std::min(j_max, (target.u1.order() - 4) / 5));
    rep.coefficient_growth = fit_coefficient_growth(co);

    SolverConfig c = cfg;
    c.T = T;
    KawaharaSolver solver(c);
    const double dt = solver.dt();
    const int nsteps = c.n_steps();
    std::vector<double> times(static_cast<std::size_t>(nsteps) + 1);
    for (int i = 0; i <= nsteps; ++i) times[static_cast<std::size_t>(i)] = i * dt;

    const TrajectoryPlan plan = plan_reach(co, tau, T, times, j_max);
    check_tail_convergence(plan);
    rep.controls = synthesize_controls(plan, fam);
    rep.tail_bound = rep.controls.tail_bound;

    GridState st;
    st.x = solver.grid();
    st.u.assign(st.x.size(), 0.0);
    st.t = 0.0;
    const BoundarySignal bc = BoundarySignal::from_samples(rep.controls.times, rep.controls.h1, rep.controls.h2);
    const GridState fin = solver.run(st, bc, [](const GridState&) {});

    GridState diff = fin, tgt = fin;
    for (std::size_t i = 0; i < fin.x.size(); ++i) {
        tgt.u[i] = ps_eval(target.u1, fin.x[i]);
        diff.u[i] = fin.u[i] - tgt.u[i];
    }
    const auto nd = norms(diff);
    const auto nt = norms(tgt);
    rep.target_error_sup = nd.sup;
    rep.target_error_l2 = nd.l2;
    rep.target_l2 = nt.l2;
    rep.target_sup = nt.sup;
    return rep;
}

} // namespace kawaflat
