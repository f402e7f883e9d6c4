#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include "params.hpp"

namespace hetbel {

/// Right-hand side of the filter-variance Riccati equation.
inline double riccati_rhs(double gamma, double h_total_sq, const ModelParams& p) {
    return -2.0 * p.kappa * gamma + p.sigma_mu * p.sigma_mu - h_total_sq * gamma * gamma;
}

/// Non-negative root of the Riccati right-hand side.
inline double stationary_gamma(double h_total_sq, const ModelParams& p) {
    detail::require(h_total_sq > 0.0, "stationary_gamma requires positive precision");
    const double s2 = p.sigma_mu * p.sigma_mu;
    // Rationalized form of (-k + sqrt(k^2 + s2 H)) / H; no cancellation.
    return s2 / (p.kappa + std::sqrt(p.kappa * p.kappa + s2 * h_total_sq));
}

/// Explicit Euler solution of the Riccati equation on a uniform grid, length n_steps + 1.
inline std::vector<double> riccati_curve(double h_total_sq, double gamma0, std::size_t n_steps, double dt,
                                         const ModelParams& p) {
    std::vector<double> g(n_steps + 1);
    g[0] = gamma0;
    for (std::size_t k = 0; k < n_steps; ++k) g[k + 1] = g[k] + riccati_rhs(g[k], h_total_sq, p) * dt;
    return g;
}

/// gamma(t) from gamma0, integrating on steps of `dt` (last step shortened to land on t).
/// t = +inf returns the stationary root.
inline double riccati_gamma(double h_total_sq, double gamma0, double t, const ModelParams& p, double dt = 0.01) {
    detail::require(gamma0 >= 0.0, "gamma0 must be non-negative");
    detail::require(t >= 0.0, "t must be non-negative");
    if (std::isinf(t)) return stationary_gamma(h_total_sq, p);
    double g = gamma0;
    double s = 0.0;
    while (s < t) {
        const double h = std::min(dt, t - s);
        g += riccati_rhs(g, h_total_sq, p) * h;
        s += h;
        if (t - s < 1e-12 * dt) break;
    }
    return g;
}

/// Initial filter variances implied by the initialization mode.
inline double initial_gammaR(const ModelParams& p) {
    return p.init == InitMode::Stationary ? stationary_gamma(p.hR_sq(), p) : p.gammaR0;
}
inline double initial_gammaI(const ModelParams& p) {
    return p.init == InitMode::Stationary ? stationary_gamma(p.hI_sq(), p) : p.gammaI0;
}

/// Throws StabilityError when the explicit scheme is too stiff for `dt`.
inline void check_stability(const ModelParams& p, double dt) {
    const double gmax = std::max({initial_gammaR(p), initial_gammaI(p), stationary_gamma(p.hR_sq(), p),
                                  stationary_gamma(p.hI_sq(), p)});
    const double bound = dt * (p.kappa + p.hI_sq() * gmax);
    if (!(bound <= 0.5))
        throw StabilityError("dt*(kappa + (h_D^2+h_e^2)*gamma_max) = " + std::to_string(bound) + " exceeds 0.5");
}

struct FilterState {
    double muR = 0.0;
    double muI = 0.0;
    double gammaR = 0.0;
    double gammaI = 0.0;
    double t = 0.0;
};

/// One Euler step of both filters under the objective measure.
/// dW and dB are Brownian increments (variance dt), shared with the truth path.
inline FilterState step_filters_objective(const FilterState& s, double mu_true, double dW, double dB, double dt,
                                          const ModelParams& p) {
    const double hD = p.h_D();
    const double he = p.h_e();
    FilterState n;
    n.muR = s.muR + p.kappa * (p.mu_bar - s.muR) * dt + s.gammaR * p.hR_sq() * (mu_true - s.muR) * dt +
            s.gammaR * hD * dW;
    n.muI = s.muI + p.kappa * (p.mu_bar - s.muI) * dt + s.gammaI * p.hI_sq() * (mu_true - s.muI) * dt +
            s.gammaI * he * p.zeta * dt + s.gammaI * (hD * dW + he * dB);
    n.gammaR = s.gammaR + riccati_rhs(s.gammaR, p.hR_sq(), p) * dt;
    n.gammaI = s.gammaI + riccati_rhs(s.gammaI, p.hI_sq(), p) * dt;
    n.t = s.t + dt;
    return n;
}

/// Stationary value of the deterministic gap between the biased and unbiased Class-I filters.
inline double stationary_bias_gap(double zeta, const ModelParams& p) {
    const double gI = stationary_gamma(p.hI_sq(), p);
    return gI * p.h_e() * zeta / (p.kappa + gI * p.hI_sq());
}

/// Deterministic offset mu^I(zeta) - mu^I(0) on the simulation grid.
struct BiasGapCurve {
    double zeta = 0.0;
    double dt = 0.0;
    double Delta_star = 0.0;
    std::vector<double> Delta;   ///< Delta(t_k; zeta), length n_steps + 1
    std::vector<double> unit;    ///< Delta(t_k; 1)
    double h_D_sq = 0.0;

    double at(std::size_t k) const { return Delta[k]; }

    /// -h_D^2 int_0^{t_k} Delta(s; zeta) dDelta/dzeta ds  (left-point rule).
    double a(std::size_t k) const { return zeta * b(k); }

    /// -h_D^2 int_0^{t_k} (dDelta/dzeta)^2 ds.
    double b(std::size_t k) const {
        double s = 0.0;
        for (std::size_t j = 0; j < k; ++j) s += unit[j] * unit[j];
        return -h_D_sq * s * dt;
    }
};

/// Integrates the gap ODE with a time-varying bias zeta(t) against a given gamma^I curve.
inline std::vector<double> bias_gap_forced(const std::function<double(double)>& zeta_of_t,
                                           const std::vector<double>& gammaI, double Delta0, double dt,
                                           const ModelParams& p) {
    std::vector<double> d(gammaI.size());
    if (d.empty()) return d;
    d[0] = Delta0;
    const double H = p.hI_sq();
    const double he = p.h_e();
    for (std::size_t k = 0; k + 1 < d.size(); ++k) {
        const double t = static_cast<double>(k) * dt;
        d[k + 1] = d[k] + (-p.kappa * d[k] - gammaI[k] * H * d[k] + gammaI[k] * he * zeta_of_t(t)) * dt;
    }
    return d;
}

inline BiasGapCurve bias_gap(double zeta, const SimGrid& grid, const ModelParams& p) {
    grid.validate();
    const auto gI = riccati_curve(p.hI_sq(), initial_gammaI(p), grid.n_steps(), grid.dt, p);
    const double d0 = p.init == InitMode::Stationary ? stationary_bias_gap(1.0, p) : 0.0;
    BiasGapCurve c;
    c.zeta = zeta;
    c.dt = grid.dt;
    c.h_D_sq = p.hR_sq();
    c.Delta_star = stationary_bias_gap(zeta, p);
    c.unit = bias_gap_forced([](double) { return 1.0; }, gI, d0, grid.dt, p);
    c.Delta.resize(c.unit.size());
    for (std::size_t k = 0; k < c.unit.size(); ++k) c.Delta[k] = zeta * c.unit[k];
    return c;
}

/// Deterministic curves shared by every path of a mean-reverting ensemble.
struct FilterCurves {
    std::vector<double> gammaR;
    std::vector<double> gammaI;
    std::vector<double> Delta_unit;  ///< gap curve per unit of zeta

    static FilterCurves build(const ModelParams& p, const SimGrid& grid) {
        FilterCurves c;
        const std::size_t n = grid.n_steps();
        c.gammaR = riccati_curve(p.hR_sq(), initial_gammaR(p), n, grid.dt, p);
        c.gammaI = riccati_curve(p.hI_sq(), initial_gammaI(p), n, grid.dt, p);
        const double d0 = p.init == InitMode::Stationary ? stationary_bias_gap(1.0, p) : 0.0;
        c.Delta_unit = bias_gap_forced([](double) { return 1.0; }, c.gammaI, d0, grid.dt, p);
        return c;
    }
};

/// Exact-filter mean-square errors E[(mu^R - mu)^2](t) and E[(mu^I(zeta) - mu)^2](t).
struct MseCurves {
    std::vector<double> R;
    std::vector<double> I;
};

inline MseCurves mse_curves(const ModelParams& p, const SimGrid& grid) {
    p.validate();
    if (!p.unbiased_initialization())
        throw UnsupportedModel("mse_curves requires muR0 = muI0 = mu0 and gamma0 = 0, or stationary initialization");
    const auto c = FilterCurves::build(p, grid);
    MseCurves m;
    m.R = c.gammaR;
    m.I.resize(c.gammaI.size());
    for (std::size_t k = 0; k < m.I.size(); ++k) {
        const double d = p.zeta * c.Delta_unit[k];
        m.I[k] = c.gammaI[k] + d * d;
    }
    return m;
}

inline MseCurves mse_curves(const TwoStateParams&, const SimGrid&) {
    throw UnsupportedModel("mse_curves has no closed form for the two-state model; use Monte Carlo");
}

// ---------------------------------------------------------------- Wonham filter

struct WonhamState {
    double muR = 0.0;
    double muI = 0.0;
    double t = 0.0;
    std::size_t clamps = 0;  ///< number of estimate clamps so far on this path
};

namespace detail {

inline double wonham_clamp(double x, const TwoStateParams& p, std::size_t& clamps) {
    const double lo = p.mu_l + p.clamp_eps();
    const double hi = p.mu_h - p.clamp_eps();
    if (x < lo) {
        ++clamps;
        return lo;
    }
    if (x > hi) {
        ++clamps;
        return hi;
    }
    return x;
}

}  // namespace detail

/// One Euler step of both two-state filters under the objective measure.
inline WonhamState wonham_step(const WonhamState& s, double mu_true, double dW, double dB, double dt,
                               const TwoStateParams& p) {
    const double hD = p.h_D();
    const double he = p.h_e();
    const double rate = p.lambda_hl + p.psi_lh;
    const double minf = p.mu_inf();
    const double nR = p.nu(s.muR);
    const double nI = p.nu(s.muI);
    WonhamState n = s;
    double r = s.muR + rate * (minf - s.muR) * dt + p.hR_sq() * nR * (mu_true - s.muR) * dt + nR * hD * dW;
    double i = s.muI + rate * (minf - s.muI) * dt + p.hI_sq() * nI * (mu_true - s.muI) * dt +
               nI * he * p.zeta * dt + nI * (hD * dW + he * dB);
    n.muR = detail::wonham_clamp(r, p, n.clamps);
    n.muI = detail::wonham_clamp(i, p, n.clamps);
    n.t = s.t + dt;
    return n;
}

}  // namespace hetbel
