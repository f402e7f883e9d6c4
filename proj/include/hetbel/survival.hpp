#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "ensemble.hpp"
#include "filters.hpp"
#include "params.hpp"
#include "stats.hpp"
#include "welfare.hpp"

namespace hetbel {

struct StationaryStats {
    double gammaR_star = 0.0;
    double gammaI_star = 0.0;
    double Delta_star = 0.0;     ///< at params.zeta
    double drift_log_eta = 0.0;  ///< d/dt E[log eta^R - log eta^I] in the stationary regime
    double zeta3 = 0.0;
    double zeta4 = 0.0;
};

/// Asymptotic drift of E[log eta] at bias zeta.
inline double stationary_log_eta_drift(const ModelParams& p, double zeta) {
    const double gR = stationary_gamma(p.hR_sq(), p);
    const double gI = stationary_gamma(p.hI_sq(), p);
    const double d = stationary_bias_gap(zeta, p);
    return 0.5 * p.hR_sq() * (gI + d * d - gR);
}

inline StationaryStats stationary_stats(const ModelParams& p) {
    p.validate();
    if (!(p.h_e() > 0.0)) throw ModelError("no external signal: both classes are identical and thresholds are undefined");
    StationaryStats s;
    s.gammaR_star = stationary_gamma(p.hR_sq(), p);
    s.gammaI_star = stationary_gamma(p.hI_sq(), p);
    s.Delta_star = stationary_bias_gap(p.zeta, p);
    s.drift_log_eta = stationary_log_eta_drift(p, p.zeta);
    if (s.gammaI_star > 0.0) {
        s.zeta4 = std::sqrt(std::max(s.gammaR_star - s.gammaI_star, 0.0)) * (p.kappa + s.gammaI_star * p.hI_sq()) /
                  (s.gammaI_star * p.h_e());
    }
    s.zeta3 = -s.zeta4;
    return s;
}

/// zeta4 found by bisection on the stationary MSE gap gamma^R* - gamma^I* - Delta*(zeta)^2.
inline double zeta4_bisection(const ModelParams& p, double tol = 1e-12) {
    const double gR = stationary_gamma(p.hR_sq(), p);
    const double gI = stationary_gamma(p.hI_sq(), p);
    if (!(gR - gI > 0.0)) return 0.0;
    auto g = [&](double z) {
        const double d = stationary_bias_gap(z, p);
        return gR - gI - d * d;
    };
    return bisect_critical_zeta(g, tol).zeta2;
}

struct SurvivalOptions {
    std::size_t n_probes = 100;       ///< cross-sections of log eta over the horizon
    double late_fraction = 0.5;       ///< trailing share of the horizon used for the slope
    bool record_paths = false;        ///< keep per-path log eta at each probe
    bool mirrored = false;
    unsigned threads = 1;
};

struct SurvivalResult {
    double zeta = 0.0;
    double e_R = 0.0;
    std::vector<double> times;
    std::vector<Estimate> mean_log_eta;  ///< E[log eta^R - log eta^I] at each probe time
    Estimate late_slope;                 ///< OLS slope of E[log eta_t] on the late window
    double predicted_slope = 0.0;        ///< stationary drift formula
    double fraction_declining = 0.0;     ///< share of paths with c^I/c^R at T below its initial value
    bool class_I_survives = false;       ///< slope negative by more than 3 SE
    bool class_R_survives = false;       ///< slope positive by more than 3 SE
    std::vector<std::vector<double>> log_eta_paths;  ///< [probe][path] when recorded
    std::vector<std::string> warnings;

    /// Class-I to Class-R consumption ratio on one path at probe j.
    double consumption_ratio(std::size_t j, std::size_t path) const {
        return (1.0 - e_R) / e_R * std::exp(-log_eta_paths[j][path]);
    }
};

/// Long-horizon consumption-ratio dynamics for each bias in `zetas`, on one ensemble.
/// c^I/c^R = (e_I/e_R) exp(log eta^I - log eta^R).
inline std::vector<SurvivalResult> simulate_consumption_ratio(const ModelParams& p, const SimGrid& g,
                                                              const std::vector<double>& zetas,
                                                              const SurvivalOptions& o = {}) {
    p.validate();
    g.validate();
    detail::require(p.e_R > 0.0 && p.e_R < 1.0, "consumption ratio is undefined for e_R in {0, 1}");
    detail::require(!zetas.empty(), "need at least one bias");
    detail::require(o.late_fraction > 0.0 && o.late_fraction <= 1.0, "late_fraction must lie in (0,1]");
    const std::size_t n = g.n_steps();
    EnsembleSpec spec;
    spec.grid = g;
    spec.zetas = zetas;
    spec.welfare = false;
    spec.threads = o.threads;
    spec.mirrored = o.mirrored;
    spec.record_log_eta = o.record_paths;
    const std::size_t np = std::max<std::size_t>(2, std::min(o.n_probes, n));
    for (std::size_t j = 0; j <= np; ++j) {
        const std::size_t k = (j * n) / np;
        if (spec.probe_steps.empty() || spec.probe_steps.back() != k) spec.probe_steps.push_back(k);
    }
    // Late-window OLS slope, sampled on every step, as a per-path linear functional.
    const auto k0 = static_cast<std::size_t>(std::floor((1.0 - o.late_fraction) * static_cast<double>(n)));
    std::vector<double> t_late;
    for (std::size_t k = k0; k <= n; ++k) t_late.push_back(g.time(k));
    const auto c = ols_slope_weights(t_late);
    spec.eta_weights.assign(n + 1, 0.0);
    for (std::size_t k = k0; k <= n; ++k) spec.eta_weights[k] = c[k - k0];

    const auto r = run_ensemble(MeanRevertingModel(p, g, zetas), spec);
    std::vector<SurvivalResult> out;
    for (std::size_t z = 0; z < zetas.size(); ++z) {
        SurvivalResult s;
        s.zeta = zetas[z];
        s.e_R = p.e_R;
        for (std::size_t j = 0; j < spec.probe_steps.size(); ++j) {
            s.times.push_back(g.time(spec.probe_steps[j]));
            s.mean_log_eta.push_back(r.probes[j][z][kProbeLogEta].estimate());
        }
        s.late_slope = mean_se(r.eta_functional[z]);
        s.predicted_slope = stationary_log_eta_drift(p, zetas[z]);
        std::size_t declining = 0;
        double worst = 0.0;
        for (std::size_t i = 0; i < r.n_paths; ++i) {
            const double le = r.logR_T[i] - r.logI_T[z][i];
            if (le > 0.0) ++declining;
            worst = std::max(worst, std::abs(le));
        }
        s.fraction_declining = static_cast<double>(declining) / static_cast<double>(r.n_paths);
        s.class_I_survives = s.late_slope.value < -3.0 * s.late_slope.se;
        s.class_R_survives = s.late_slope.value > 3.0 * s.late_slope.se;
        if (worst + std::abs(std::log(p.e_R / (1.0 - p.e_R))) > 700.0)
            s.warnings.push_back("consumption share saturates in double precision on some paths");
        if (o.record_paths) {
            for (std::size_t j = 0; j < spec.probe_steps.size(); ++j) s.log_eta_paths.push_back(r.log_eta_paths[j][z]);
        }
        out.push_back(std::move(s));
    }
    return out;
}

struct RhoEquivalenceRow {
    double rho = 0.0;
    double zeta2 = 0.0;
    double zeta4 = 0.0;
    double distance = 0.0;  ///< |zeta2 - zeta4|
};

struct RhoEquivalence {
    std::vector<RhoEquivalenceRow> rows;
    bool strictly_decreasing = true;  ///< distance decreases along the (decreasing) rho list
};

/// Critical welfare bias zeta2(rho) against the survival threshold zeta4.
inline RhoEquivalence rho_zero_equivalence(const ModelParams& p, const std::vector<double>& rho_list) {
    for (std::size_t i = 0; i < rho_list.size(); ++i) {
        detail::require(rho_list[i] > 0.0, "rho values must be positive");
        if (i > 0) detail::require(rho_list[i] < rho_list[i - 1], "rho list must decrease");
    }
    const double z4 = stationary_stats(p).zeta4;
    RhoEquivalence e;
    for (double rho : rho_list) {
        ModelParams q = p;
        q.rho = rho;
        const double z2 = critical_zeta_welfare(q).zeta2;
        e.rows.push_back({rho, z2, z4, std::abs(z2 - z4)});
    }
    for (std::size_t i = 1; i < e.rows.size(); ++i)
        if (!(e.rows[i].distance < e.rows[i - 1].distance)) e.strictly_decreasing = false;
    return e;
}

}  // namespace hetbel
