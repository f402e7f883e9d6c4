#pragma once

#include <algorithm>
#include <cmath>
#include <utility>
#include <vector>

#include "model_core.hpp"
#include "params.hpp"

namespace hetbel {

/// Increment of log eta^m over one step (left-point Ito rule).
inline double log_eta_increment(double mu_m, double mu, double h_D, double dt, double dW) {
    const double e = mu_m - mu;
    return -0.5 * e * e * h_D * h_D * dt + e * h_D * dW;
}

inline std::pair<std::vector<double>, std::vector<double>> accumulate_log_eta(const PathBundle& b,
                                                                                const ModelParams& p) {
    const std::size_t n = b.size();
    std::vector<double> lr(n, 0.0), li(n, 0.0);
    const double h = p.h_D();
    for (std::size_t k = 0; k + 1 < n; ++k) {
        lr[k + 1] = lr[k] + log_eta_increment(b.muR[k], b.mu[k], h, b.dt, b.dW[k]);
        li[k + 1] = li[k] + log_eta_increment(b.muI[k], b.mu[k], h, b.dt, b.dW[k]);
    }
    return {std::move(lr), std::move(li)};
}

/// log e_R - log e_I + log eta^R - log eta^I; the logit of the Class-R share.
inline double share_logit(double e_R, double log_etaR, double log_etaI) {
    return std::log(e_R) - std::log1p(-e_R) + (log_etaR - log_etaI);
}

/// Class-R consumption share k*eta / (1 + k*eta), k = e_R / e_I.
inline double consumption_share(double e_R, double log_etaR, double log_etaI) {
    detail::require(e_R >= 0.0 && e_R <= 1.0, "e_R must lie in [0,1]");
    if (e_R == 0.0) return 0.0;
    if (e_R == 1.0) return 1.0;
    const double z = share_logit(e_R, log_etaR, log_etaI);
    const double e = std::exp(-std::abs(z));
    return z >= 0.0 ? 1.0 / (1.0 + e) : e / (1.0 + e);
}

struct RatesAndRisk {
    double r;
    double phiR;
    double phiI;
    double phi;
};

inline RatesAndRisk rates_and_prices_of_risk(double lambda, double muR, double muI, double mu,
                                             const ModelParams& p) {
    const double h = p.h_D();
    const double sD = p.sigma_D;
    RatesAndRisk out{};
    out.r = p.rho + (lambda * muR + (1.0 - lambda) * muI) - sD * sD;
    out.phiR = sD + h * (1.0 - lambda) * (muR - muI);
    out.phiI = sD - h * lambda * (muR - muI);
    out.phi = sD + h * (lambda * (mu - muR) + (1.0 - lambda) * (mu - muI));
    return out;
}

/// Objective log-SPD from the share series: dlog xi = -(r + phi^2/2) dt - phi dW.
inline std::vector<double> accumulate_log_xi(const PathBundle& b, const std::vector<double>& lambda,
                                             const ModelParams& p) {
    const std::size_t n = b.size();
    detail::require(lambda.size() == n, "lambda series must match the path length");
    std::vector<double> lx(n, 0.0);
    for (std::size_t k = 0; k + 1 < n; ++k) {
        const auto q = rates_and_prices_of_risk(lambda[k], b.muR[k], b.muI[k], b.mu[k], p);
        lx[k + 1] = lx[k] - (q.r + 0.5 * q.phi * q.phi) * b.dt - q.phi * b.dW[k];
    }
    return lx;
}

/// log(e_R eta^R + e_I eta^I) evaluated without overflow.
inline double benchmark_log_eta(double e_R, double log_etaR, double log_etaI) {
    detail::require(e_R >= 0.0 && e_R <= 1.0, "e_R must lie in [0,1]");
    if (e_R == 0.0) return log_etaI;
    if (e_R == 1.0) return log_etaR;
    const double a = std::log(e_R) + log_etaR;
    const double c = std::log1p(-e_R) + log_etaI;
    return std::max(a, c) + std::log1p(std::exp(-std::abs(a - c)));
}

/// Price of the dividend claim; constant price-dividend ratio 1/rho.
inline double price(double D, const ModelParams& p) {
    if (!(p.rho > 0.0)) throw ModelError("price is undefined for rho = 0");
    return D / p.rho;
}

struct EquilibriumPath {
    std::vector<double> log_etaR, log_etaI, eta, lambda, r, phiR, phiI, phi, log_xi, cR, cI;
};

inline EquilibriumPath solve_equilibrium(const PathBundle& b, const ModelParams& p) {
    EquilibriumPath e;
    std::tie(e.log_etaR, e.log_etaI) = accumulate_log_eta(b, p);
    const std::size_t n = b.size();
    e.eta.resize(n);
    e.lambda.resize(n);
    e.r.resize(n);
    e.phiR.resize(n);
    e.phiI.resize(n);
    e.phi.resize(n);
    e.cR.resize(n);
    e.cI.resize(n);
    for (std::size_t k = 0; k < n; ++k) {
        e.eta[k] = std::exp(e.log_etaR[k] - e.log_etaI[k]);
        e.lambda[k] = consumption_share(p.e_R, e.log_etaR[k], e.log_etaI[k]);
        const auto q = rates_and_prices_of_risk(e.lambda[k], b.muR[k], b.muI[k], b.mu[k], p);
        e.r[k] = q.r;
        e.phiR[k] = q.phiR;
        e.phiI[k] = q.phiI;
        e.phi[k] = q.phi;
        const double D = std::exp(b.log_D[k]);
        e.cR[k] = e.lambda[k] * D;
        e.cI[k] = D - e.cR[k];
    }
    e.log_xi = accumulate_log_xi(b, e.lambda, p);
    return e;
}

/// Truth, filters, likelihood ratios and SPD for one path.
inline PathBundle simulate_path(const ModelParams& p, const SimGrid& grid, std::uint64_t path_index) {
    PathBundle b = simulate_truth(p, grid, path_index);
    run_filters(p, grid, b);
    const auto eq = solve_equilibrium(b, p);
    b.log_etaR = eq.log_etaR;
    b.log_etaI = eq.log_etaI;
    b.log_xi = eq.log_xi;
    return b;
}

}  // namespace hetbel
