#pragma once

#include <cmath>
#include <cstdint>
#include <utility>
#include <vector>

#include "filters.hpp"
#include "params.hpp"
#include "rng.hpp"

namespace hetbel {

/// Closed-form mean and variance of the OU drift at time t.
inline std::pair<double, double> ou_moments(const ModelParams& p, double t) {
    p.validate();
    detail::require(t >= 0.0, "ou_moments requires t >= 0");
    const double decay = std::exp(-p.kappa * t);
    const double mean = p.mu_bar + (p.mu0 - p.mu_bar) * decay;
    const double var = p.sigma_mu * p.sigma_mu * (-std::expm1(-2.0 * p.kappa * t)) / (2.0 * p.kappa);
    return {mean, var};
}

/// Per-path time series. Every vector has n_steps + 1 entries; increments
/// dW[k], dB[k], dW_mu[k] drive the step k -> k+1 and the last entry is 0.
struct PathBundle {
    std::uint64_t path_index = 0;
    double dt = 0.0;
    std::vector<double> mu, log_D, dW, dB, dW_mu;
    std::vector<double> muR, muI, log_etaR, log_etaI, log_xi;
    std::vector<double> gammaR, gammaI, Delta;

    std::size_t size() const { return mu.size(); }
};

/// Initial (mu, muR, muI) for one path; muI is the unbiased (zeta = 0) estimate.
struct InitialDraw {
    double mu;
    double muR;
    double muI;
};

inline InitialDraw initial_draw(const ModelParams& p, const PathStream& stream, std::uint64_t path) {
    if (p.init == InitMode::Fixed) return {p.mu0, p.muR0, p.muI0};
    const double gR = stationary_gamma(p.hR_sq(), p);
    const double gI = stationary_gamma(p.hI_sq(), p);
    const double v = p.sigma_mu * p.sigma_mu / (2.0 * p.kappa);
    const auto z = stream.normals(path, 0, StreamBlock::Initial);
    InitialDraw d{};
    d.muR = p.mu_bar + std::sqrt(std::max(v - gR, 0.0)) * z[0];
    d.muI = d.muR + std::sqrt(std::max(gR - gI, 0.0)) * z[1];
    d.mu = d.muI + std::sqrt(gI) * z[2];
    return d;
}

/// Euler-Maruyama truth path: drift, log-dividend and the three Brownian increments.
inline PathBundle simulate_truth(const ModelParams& p, const SimGrid& grid, std::uint64_t path_index) {
    p.validate();
    grid.validate();
    check_stability(p, grid.dt);
    const std::size_t n = grid.n_steps();
    const double sdt = std::sqrt(grid.dt);
    const PathStream stream(grid.seed);

    PathBundle b;
    b.path_index = path_index;
    b.dt = grid.dt;
    b.mu.assign(n + 1, 0.0);
    b.log_D.assign(n + 1, 0.0);
    b.dW.assign(n + 1, 0.0);
    b.dB.assign(n + 1, 0.0);
    b.dW_mu.assign(n + 1, 0.0);
    b.mu[0] = initial_draw(p, stream, path_index).mu;
    for (std::size_t k = 0; k < n; ++k) {
        const auto z = stream.normals(path_index, k);
        b.dW[k] = sdt * z[0];
        b.dB[k] = sdt * z[1];
        b.dW_mu[k] = sdt * z[2];
        b.mu[k + 1] = b.mu[k] + p.kappa * (p.mu_bar - b.mu[k]) * grid.dt + p.sigma_mu * b.dW_mu[k];
        b.log_D[k + 1] = b.log_D[k] + (b.mu[k] - 0.5 * p.sigma_D * p.sigma_D) * grid.dt + p.sigma_D * b.dW[k];
    }
    return b;
}

/// Runs both filters along a truth path (fills muR, muI and the shared curves).
inline void run_filters(const ModelParams& p, const SimGrid& grid, PathBundle& b) {
    const std::size_t n = grid.n_steps();
    const auto curves = FilterCurves::build(p, grid);
    const InitialDraw init = initial_draw(p, PathStream(grid.seed), b.path_index);
    b.gammaR = curves.gammaR;
    b.gammaI = curves.gammaI;
    b.Delta.resize(n + 1);
    for (std::size_t k = 0; k <= n; ++k) b.Delta[k] = p.zeta * curves.Delta_unit[k];
    b.muR.assign(n + 1, 0.0);
    b.muI.assign(n + 1, 0.0);
    FilterState s{init.muR, init.muI + b.Delta[0], curves.gammaR[0], curves.gammaI[0], 0.0};
    for (std::size_t k = 0; k <= n; ++k) {
        b.muR[k] = s.muR;
        b.muI[k] = s.muI;
        if (k == n) break;
        s = step_filters_objective(s, b.mu[k], b.dW[k], b.dB[k], grid.dt, p);
        // The shared curves are the reference; stepping reproduces them exactly.
        s.gammaR = curves.gammaR[k + 1];
        s.gammaI = curves.gammaI[k + 1];
    }
}

// ---------------------------------------------------------------- two-state chain

struct TwoStatePath {
    std::uint64_t path_index = 0;
    std::vector<double> mu, log_D, dW, dB;
    std::vector<unsigned char> high;  ///< 1 while the chain sits in the high state
};

/// Initial chain state for one path.
inline bool two_state_initial_high(const TwoStateParams& p, const PathStream& stream, std::uint64_t path) {
    if (!p.stationary_start) return p.mu0 == p.mu_h;
    return to_unit_open(stream.raw(path, 1, StreamBlock::Initial)[0]) < p.p_high();
}

/// Advances the chain over one step using the path's uniform for that step.
inline bool two_state_next(bool high, double u, double dt, const TwoStateParams& p) {
    const double flip = high ? -std::expm1(-p.lambda_hl * dt) : -std::expm1(-p.psi_lh * dt);
    return u < flip ? !high : high;
}

inline TwoStatePath simulate_two_state(const TwoStateParams& p, const SimGrid& grid, std::uint64_t path_index) {
    p.validate();
    grid.validate();
    const std::size_t n = grid.n_steps();
    const double sdt = std::sqrt(grid.dt);
    const PathStream stream(grid.seed);

    TwoStatePath t;
    t.path_index = path_index;
    t.mu.assign(n + 1, 0.0);
    t.log_D.assign(n + 1, 0.0);
    t.dW.assign(n + 1, 0.0);
    t.dB.assign(n + 1, 0.0);
    t.high.assign(n + 1, 0);
    bool high = two_state_initial_high(p, stream, path_index);
    for (std::size_t k = 0; k <= n; ++k) {
        t.high[k] = high ? 1 : 0;
        t.mu[k] = high ? p.mu_h : p.mu_l;
        if (k == n) break;
        const auto z = stream.normals(path_index, k);
        t.dW[k] = sdt * z[0];
        t.dB[k] = sdt * z[1];
        t.log_D[k + 1] = t.log_D[k] + (t.mu[k] - 0.5 * p.sigma_D * p.sigma_D) * grid.dt + p.sigma_D * t.dW[k];
        high = two_state_next(high, stream.uniform(path_index, k), grid.dt, p);
    }
    return t;
}

}  // namespace hetbel
