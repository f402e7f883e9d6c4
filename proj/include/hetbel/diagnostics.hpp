#pragma once

#include <cmath>
#include <vector>

#include "ensemble.hpp"
#include "filters.hpp"
#include "params.hpp"
#include "stats.hpp"

namespace hetbel {

struct ProjectionRow {
    double t = 0.0;
    Estimate projection;   ///< E[(mu^R-mu^I)^2 + (mu^I-mu)^2 - (mu^R-mu)^2]
    double expected = 0.0; ///< 2 Delta(t)^2
    Estimate excess() const { return {projection.value - expected, projection.se}; }
};

/// Cross-sectional check of the orthogonality between the two filter errors.
inline std::vector<ProjectionRow> projection_identity(const ModelParams& p, const SimGrid& g,
                                                      const std::vector<double>& times, unsigned threads = 1) {
    p.validate();
    g.validate();
    EnsembleSpec spec;
    spec.grid = g;
    spec.zetas = {p.zeta};
    spec.welfare = false;
    spec.threads = threads;
    for (double t : times) {
        const auto k = static_cast<std::size_t>(std::llround(t / g.dt));
        detail::require(k <= g.n_steps(), "probe time beyond horizon");
        spec.probe_steps.push_back(k);
    }
    for (std::size_t j = 1; j < spec.probe_steps.size(); ++j)
        detail::require(spec.probe_steps[j] > spec.probe_steps[j - 1], "probe times must increase");
    const auto r = run_ensemble(MeanRevertingModel(p, g, spec.zetas), spec);
    const auto curves = FilterCurves::build(p, g);
    std::vector<ProjectionRow> out;
    for (std::size_t j = 0; j < times.size(); ++j) {
        const double d = p.zeta * curves.Delta_unit[spec.probe_steps[j]];
        out.push_back({g.time(spec.probe_steps[j]), r.probes[j][0][kProbeProjection].estimate(), 2.0 * d * d});
    }
    return out;
}

struct MartingaleCheck {
    Estimate eta_R;      ///< E[eta^R_T]
    Estimate eta_I;      ///< E[eta^I_T]
    Estimate eta_bench;  ///< E[eta^bench_T]
};

/// Terminal means of the three density processes; each should be 1.
inline MartingaleCheck martingale_check(const ModelParams& p, const SimGrid& g, unsigned threads = 1) {
    p.validate();
    EnsembleSpec spec;
    spec.grid = g;
    spec.zetas = {p.zeta};
    spec.economies = {{0, p.e_R}};
    spec.welfare = false;
    spec.threads = threads;
    const auto r = run_ensemble(MeanRevertingModel(p, g, spec.zetas), spec);
    auto mean_exp = [](const std::vector<double>& v) {
        std::vector<double> e(v.size());
        for (std::size_t i = 0; i < v.size(); ++i) e[i] = std::exp(v[i]);
        return mean_se(e);
    };
    return {mean_exp(r.logR_T), mean_exp(r.logI_T[0]), mean_exp(r.logbench_T[0])};
}

}  // namespace hetbel
