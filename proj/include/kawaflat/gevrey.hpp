#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "kawaflat/jet.hpp"

namespace kawaflat {

/**
 * @brief Parameters of the Gevrey step function phi_s.
 *
 * sigma is stored for clarity but must equal 1/(s-1); validate() re-derives it.
 */
struct BumpParams {
    double s = 5.0;
    double K = 1.0;
    double sigma = 0.25;

    BumpParams() = default;
    BumpParams(double s_, double K_) : s(s_), K(K_), sigma(1.0 / (s_ - 1.0)) { validate(); }

    void validate() const {
        if (!(s > 1.0)) throw std::invalid_argument("BumpParams: s > 1 required");
        if (!(K > 0.0)) throw std::invalid_argument("BumpParams: K > 0 required");
        if (std::fabs(sigma - 1.0 / (s - 1.0)) > 1e-12 * std::fabs(sigma))
            throw std::invalid_argument("BumpParams: sigma inconsistent with 1/(s-1)");
    }
};

namespace detail {

// Interval around r = 0, 1 on which the jet is clamped to its flat limit
// (the defining quotient underflows there and the limit is known exactly).
inline constexpr double kEndpointClamp = 1e-12;
// exp argument beyond which e^E over/underflows a double.
inline constexpr double kExpLimit = 700.0;
inline constexpr int kMaxJetOrder = 40;

/// E(r) = K[(1-r)^-sigma - r^-sigma]; phi = 1/(1 + e^E) avoids 0/0 underflow.
inline double bump_exponent(double r, const BumpParams& p) {
    return p.K * (std::pow(1.0 - r, -p.sigma) - std::pow(r, -p.sigma));
}

} // namespace detail

/**
 * @brief Gevrey-class step: 1 for r <= 0, 0 for r >= 1, smooth monotone
 *        transition in between.
 */
[[nodiscard]] inline double phi(double r, const BumpParams& p) {
    p.validate();
    if (r <= 0.0) return 1.0;
    if (r >= 1.0) return 0.0;
    const double E = detail::bump_exponent(r, p);
    if (E > detail::kExpLimit) return 0.0;
    if (E < -detail::kExpLimit) return 1.0;
    return 1.0 / (1.0 + std::exp(E));
}

/**
 * @brief Jet of phi_s at r (entries are derivatives with respect to r).
 *
 * Propagated in Taylor mode through pow/exp/recip; within 1e-12 of the
 * endpoints (or when the quotient over/underflows) the exact flat jet is
 * returned.
 */
[[nodiscard]] inline Jet phi_jet(double r, const BumpParams& p, int M) {
    p.validate();
    if (M < 0) throw std::invalid_argument("phi_jet: M >= 0 required");
    if (M > detail::kMaxJetOrder)
        throw std::invalid_argument("phi_jet: derivative order cap is 40 (double-precision jets degrade)");
    if (r <= detail::kEndpointClamp) return Jet::constant(r, 1.0, M);
    if (r >= 1.0 - detail::kEndpointClamp) return Jet::constant(r, 0.0, M);

    taylor::Coeffs rj(static_cast<std::size_t>(M) + 1, 0.0);
    rj[0] = r;
    if (M >= 1) rj[1] = 1.0;
    taylor::Coeffs one_minus = rj;
    for (double& c : one_minus) c = -c;
    one_minus[0] = 1.0 - r;

    taylor::Coeffs E = taylor::pow(one_minus, -p.sigma);
    const taylor::Coeffs rp = taylor::pow(rj, -p.sigma);
    for (std::size_t i = 0; i < E.size(); ++i) E[i] = p.K * (E[i] - rp[i]);

    if (E[0] > detail::kExpLimit) return Jet::constant(r, 0.0, M);
    if (E[0] < -detail::kExpLimit) return Jet::constant(r, 1.0, M);

    taylor::Coeffs den = taylor::exp(E);
    den[0] += 1.0;
    return taylor::to_jet(r, taylor::recip(den));
}

/**
 * @brief Jet of beta(t) = 1 - phi_2((t - tau)/(T - tau)) at t; beta ramps
 *        from 0 (t <= tau) to 1 with all derivatives vanishing at t = T.
 */
[[nodiscard]] inline Jet beta_jet(double t, double tau, double T, int M, double K = 1.0) {
    if (!(tau < T)) throw std::invalid_argument("beta_jet: tau < T required");
    if (!(tau > 0.0)) throw std::invalid_argument("beta_jet: tau > 0 required");
    if (t < tau) return Jet::constant(t, 0.0, M);
    const BumpParams p2(2.0, K);
    const double r = (t - tau) / (T - tau);
    Jet pj = phi_jet(r, p2, M);
    // chain rule for r(t); preimage point becomes t itself
    pj = jet_compose_affine(pj, 1.0 / (T - tau), -tau / (T - tau));
    for (double& v : pj.values) v = -v;
    pj.values[0] += 1.0;
    return pj;
}

} // namespace kawaflat
