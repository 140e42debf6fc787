#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "kawaflat/chebfit.hpp"
#include "kawaflat/genfun.hpp"
#include "kawaflat/gevrey.hpp"
#include "kawaflat/jet.hpp"
#include "kawaflat/kawahara_fd.hpp"

namespace kawaflat {

/**
 * @brief Sampled flat-output derivative stacks y^(j)(t_i), z^(j)(t_i).
 *
 * Rows run to j_max + 1: the extra guard row lets consumers form the time
 * derivative of the truncated series by an index shift. Rows are identically
 * zero for t <= tau.
 */
struct TrajectoryPlan {
    std::vector<double> times;
    int j_max = 0;
    double s = 3.0;
    double tau = 0.0;
    // y_derivs[j][i] = y^(j)(times[i]), j = 0..j_max+1
    std::vector<std::vector<double>> y_derivs, z_derivs;

    [[nodiscard]] std::size_t n_times() const { return times.size(); }
};

struct ControlSignal {
    std::vector<double> times, h1, h2;
    double tail_bound = 0.0;
};

/// Extra information the planner reports alongside the plan.
struct PlanDiagnostics {
    double free_final_l2 = 0.0;
    double fit_residual_c3 = 0.0, fit_residual_c4 = 0.0;
    // m >= 1 trace derivatives come from Chebyshev-fit differentiation; the
    // spatialized P^m route is unusable at double precision beyond m = 0.
    std::string trace_derivative_route = "chebyshev-fit";
    std::vector<GridState> free_snapshots; // snapshots for the glue window
};

namespace detail {

/// Geometric-extrapolation tail of sum_{j>J} 2^j |x|^(5j+1)/(5j+1)! * Y(j).
inline double series_tail_bound(const std::vector<double>& row_max_y, const std::vector<double>& row_max_z,
                                int J, double absx = 1.0) {
    auto one = [&](const std::vector<double>& rm) {
        if (rm.empty()) return 0.0;
        const double yJ1 = (static_cast<int>(rm.size()) > J + 1) ? rm[static_cast<std::size_t>(J + 1)] : rm.back();
        double growth = 1.0;
        for (std::size_t j = 1; j < rm.size(); ++j)
            if (rm[j - 1] > 0.0) growth = std::max(growth, rm[j] / rm[j - 1]);
        double tail = 0.0, y = yJ1;
        for (int j = J + 1; j < J + 60; ++j) {
            tail += family_bound(j, absx) * y;
            y *= growth;
        }
        return tail;
    };
    return one(row_max_y) + one(row_max_z);
}

inline std::vector<double> row_maxima(const std::vector<std::vector<double>>& rows) {
    std::vector<double> m(rows.size(), 0.0);
    for (std::size_t j = 0; j < rows.size(); ++j)
        for (double v : rows[j]) m[j] = std::max(m[j], std::fabs(v));
    return m;
}

} // namespace detail

/**
 * @brief Trajectory plan for steering u0 to zero: free evolution traces at
 *        x = 0 are windowed by phi_s((t-tau)/(T-tau)).
 *
 * The order-0 trace is extracted spatially each step; its time derivatives
 * come from Chebyshev-fit differentiation of the trace series (the spatial
 * P^m route amplifies grid round-off beyond any signal for m >= 1).
 */
[[nodiscard]] inline TrajectoryPlan plan_null_control(const GridState& u0, double s, double tau, double T,
                                                      int j_max, const SolverConfig& cfg,
                                                      PlanDiagnostics* diag = nullptr) {
    if (!(s >= 2.5 && s < 5.0)) throw std::invalid_argument("plan_null_control: s in [5/2, 5) required");
    if (!(tau > 0.0 && tau < T)) throw std::invalid_argument("plan_null_control: 0 < tau < T required");
    SolverConfig c = cfg;
    c.T = T;
    KawaharaSolver solver(c);
    const int nsteps = c.n_steps();
    const int rows = j_max + 2;

    std::vector<double> ts(static_cast<std::size_t>(nsteps) + 1);
    std::vector<double> c3(ts.size()), c4(ts.size());
    GridState st = u0;
    st.x = solver.grid();
    {
        const auto tr = solver.boundary_traces(st);
        ts[0] = 0.0;
        c3[0] = tr.d3;
        c4[0] = tr.d4;
    }
    const double glue_hi = tau + 0.1 * (T - tau);
    int i = 0;
    st = solver.run(st, BoundarySignal::zero(), [&](const GridState& snew) {
        ++i;
        ts[static_cast<std::size_t>(i)] = snew.t;
        const auto tr = solver.boundary_traces(snew);
        c3[static_cast<std::size_t>(i)] = tr.d3;
        c4[static_cast<std::size_t>(i)] = tr.d4;
        if (diag && snew.t > tau && snew.t <= glue_hi) diag->free_snapshots.push_back(snew);
    });
    if (diag) diag->free_final_l2 = norms(st).l2;

    // Chebyshev fit on a window padded slightly left of tau
    const double lo = tau - 0.1 * (T - tau), hi = T;
    std::vector<double> fts, f3, f4;
    for (std::size_t k = 0; k < ts.size(); ++k)
        if (ts[k] >= lo) {
            fts.push_back(ts[k]);
            f3.push_back(c3[k]);
            f4.push_back(c4[k]);
        }
    const int deg = std::min<int>(24, static_cast<int>(fts.size()) / 4);
    const ChebSeries fit3 = cheb_fit(fts, f3, deg, lo, hi);
    const ChebSeries fit4 = cheb_fit(fts, f4, deg, lo, hi);
    if (diag) {
        for (std::size_t k = 0; k < fts.size(); ++k) {
            diag->fit_residual_c3 = std::max(diag->fit_residual_c3, std::fabs(fit3.eval(fts[k]) - f3[k]));
            diag->fit_residual_c4 = std::max(diag->fit_residual_c4, std::fabs(fit4.eval(fts[k]) - f4[k]));
        }
    }
    std::vector<ChebSeries> d3(1, fit3), d4(1, fit4);
    for (int m = 1; m < rows; ++m) {
        d3.push_back(d3.back().derivative());
        d4.push_back(d4.back().derivative());
    }

    TrajectoryPlan plan;
    plan.times = ts;
    plan.j_max = j_max;
    plan.s = s;
    plan.tau = tau;
    plan.y_derivs.assign(static_cast<std::size_t>(rows), std::vector<double>(ts.size(), 0.0));
    plan.z_derivs.assign(static_cast<std::size_t>(rows), std::vector<double>(ts.size(), 0.0));

    const BumpParams bump(s, 1.0);
    for (std::size_t k = 0; k < ts.size(); ++k) {
        const double t = ts[k];
        if (t <= tau) continue; // controls inactive before tau
        const double r = (t - tau) / (T - tau);
        Jet pj = phi_jet(r, bump, rows - 1);
        pj = jet_compose_affine(pj, 1.0 / (T - tau), -tau / (T - tau));
        std::vector<double> tj3(static_cast<std::size_t>(rows)), tj4(static_cast<std::size_t>(rows));
        tj3[0] = c3[k]; // raw spatial trace at order 0
        tj4[0] = c4[k];
        for (int m = 1; m < rows; ++m) {
            tj3[static_cast<std::size_t>(m)] = d3[static_cast<std::size_t>(m)].eval(t);
            tj4[static_cast<std::size_t>(m)] = d4[static_cast<std::size_t>(m)].eval(t);
        }
        const Jet y = jet_mul(pj, Jet(t, tj3));
        const Jet z = jet_mul(pj, Jet(t, tj4));
        for (int j = 0; j < rows; ++j) {
            plan.y_derivs[static_cast<std::size_t>(j)][k] = y.values[static_cast<std::size_t>(j)];
            plan.z_derivs[static_cast<std::size_t>(j)][k] = z.values[static_cast<std::size_t>(j)];
        }
    }
    return plan;
}

/// Value of the truncated flat series at (x, times[t_index]) plus a tail bound.
struct FlatValue {
    double value = 0.0;
    double tail_bound = 0.0;
};

[[nodiscard]] inline FlatValue evaluate_flat_solution(const TrajectoryPlan& plan, const GeneratingFamily& fam,
                                                      double x, std::size_t t_index) {
    if (fam.j_max < plan.j_max) throw std::invalid_argument("evaluate_flat_solution: family j_max too small");
    if (t_index >= plan.n_times()) throw std::invalid_argument("evaluate_flat_solution: time index out of range");
    FlatValue out;
    for (int j = 0; j <= plan.j_max; ++j) {
        out.value += ps_eval(fam.f[static_cast<std::size_t>(j)], x) * plan.y_derivs[static_cast<std::size_t>(j)][t_index] +
                     ps_eval(fam.g[static_cast<std::size_t>(j)], x) * plan.z_derivs[static_cast<std::size_t>(j)][t_index];
    }
    out.tail_bound = detail::series_tail_bound(detail::row_maxima(plan.y_derivs),
                                               detail::row_maxima(plan.z_derivs), plan.j_max, std::fabs(x));
    return out;
}

/**
 * @brief Boundary controls from the cached traces: h1 = sum f_j(-1) y^(j) +
 *        g_j(-1) z^(j); h2 with the derivative traces.
 */
[[nodiscard]] inline ControlSignal synthesize_controls(const TrajectoryPlan& plan, const GeneratingFamily& fam) {
    if (fam.j_max < plan.j_max) throw std::invalid_argument("synthesize_controls: family j_max too small");
    ControlSignal sig;
    sig.times = plan.times;
    sig.h1.assign(plan.n_times(), 0.0);
    sig.h2.assign(plan.n_times(), 0.0);
    for (std::size_t k = 0; k < plan.n_times(); ++k) {
        double a = 0.0, b = 0.0;
        for (int j = 0; j <= plan.j_max; ++j) {
            const double yj = plan.y_derivs[static_cast<std::size_t>(j)][k];
            const double zj = plan.z_derivs[static_cast<std::size_t>(j)][k];
            a += fam.traces_f[static_cast<std::size_t>(j)][0] * yj + fam.traces_g[static_cast<std::size_t>(j)][0] * zj;
            b += fam.traces_f[static_cast<std::size_t>(j)][1] * yj + fam.traces_g[static_cast<std::size_t>(j)][1] * zj;
        }
        sig.h1[k] = a;
        sig.h2[k] = b;
    }
    sig.tail_bound = detail::series_tail_bound(detail::row_maxima(plan.y_derivs),
                                               detail::row_maxima(plan.z_derivs), plan.j_max, 1.0);
    return sig;
}

/// Fails when the series terms are still growing at j_max (truncation unsafe).
inline void check_tail_convergence(const TrajectoryPlan& plan) {
    const auto my = detail::row_maxima(plan.y_derivs);
    const auto mz = detail::row_maxima(plan.z_derivs);
    const int J = plan.j_max;
    if (J < 1) return;
    auto term = [&](const std::vector<double>& m, int j) {
        return family_bound(j, 1.0) * m[static_cast<std::size_t>(j)];
    };
    const double tj = term(my, J) + term(mz, J);
    const double tj1 = term(my, J + 1) + term(mz, J + 1);
    if (tj > 0.0 && tj1 > tj)
        throw std::runtime_error(
            "flat series terms still growing at j_max; increase J_max or use a larger Gevrey order s");
}

struct NullControlReport {
    double final_l2 = 0.0;
    double free_final_l2 = 0.0;
    double glue_error = 0.0;
    double tail_bound = 0.0;
    double u0_l2 = 0.0, u0_sup = 0.0;
    double fit_residual_c3 = 0.0, fit_residual_c4 = 0.0;
    std::string trace_derivative_route;
    ControlSignal controls;
};

/**
 * @brief Full null-controllability pipeline: plan from the free evolution, synthesize
 *        h1/h2, drive the solver from the original u0, and verify.
 *
 * glue_error is the sup over the window t in (tau, tau + (T-tau)/10] of the
 * difference between the truncated flat series and the free-evolution field
 * (the discrete stand-in for the unique-continuation identity).
 */
[[nodiscard]] inline NullControlReport run_null_control_experiment(const GridState& u0, double s, double tau,
                                                                   double T, int j_max,
                                                                   const SolverConfig& cfg,
                                                                   const GeneratingFamily& fam) {
    PlanDiagnostics diag;
    const TrajectoryPlan plan = plan_null_control(u0, s, tau, T, j_max, cfg, &diag);
    check_tail_convergence(plan);
    NullControlReport rep;
    rep.free_final_l2 = diag.free_final_l2;
    rep.fit_residual_c3 = diag.fit_residual_c3;
    rep.fit_residual_c4 = diag.fit_residual_c4;
    rep.trace_derivative_route = diag.trace_derivative_route;
    rep.controls = synthesize_controls(plan, fam);
    rep.tail_bound = rep.controls.tail_bound;

    SolverConfig c = cfg;
    c.T = T;
    KawaharaSolver solver(c);
    GridState st = u0;
    st.x = solver.grid();
    {
        const auto n0 = norms(st);
        rep.u0_l2 = n0.l2;
        rep.u0_sup = n0.sup;
    }
    const BoundarySignal bc = BoundarySignal::from_samples(rep.controls.times, rep.controls.h1, rep.controls.h2);
    std::size_t snap = 0;
    const double dt = solver.dt();
    GridState fin = solver.run(st, bc, [&](const GridState& snew) {
        if (snap < diag.free_snapshots.size() &&
            std::fabs(diag.free_snapshots[snap].t - snew.t) < 0.5 * dt) {
            // glue window: flat series vs the free-evolution oracle
            const std::size_t ti = static_cast<std::size_t>(std::lround(snew.t / dt));
            for (std::size_t ix = 0; ix < snew.x.size(); ix += 8) {
                const FlatValue fv = evaluate_flat_solution(plan, fam, snew.x[ix], ti);
                rep.glue_error = std::max(rep.glue_error,
                                          std::fabs(fv.value - diag.free_snapshots[snap].u[ix]));
            }
            ++snap;
        }
    });
    rep.final_l2 = norms(fin).l2;
    return rep;
}

} // namespace kawaflat
