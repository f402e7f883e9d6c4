#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "params.hpp"
#include "stats.hpp"
#include "welfare.hpp"

namespace hetbel {

/// Class-R wealth share as a function of the signal bias: e_R(zeta) = 1 - a exp(-b zeta^2).
struct ParticipationCurve {
    double a = 0.5;
    double b = 0.1;

    void validate() const {
        detail::require(std::isfinite(a) && a > 0.0 && a <= 1.0, "participation a must lie in (0,1]");
        detail::require(std::isfinite(b) && b > 0.0, "participation b must be positive");
    }
    double e_R(double zeta) const { return 1.0 - a * std::exp(-b * zeta * zeta); }

    /// Six reference calibrations used by the strategist experiment.
    static std::vector<ParticipationCurve> presets() {
        return {{0.3, 0.1}, {0.7, 0.1}, {0.5, 0.1}, {0.5, 0.2}, {0.5, 0.07}, {0.5, 0.05}};
    }
};

enum class Role { R, I, Bench };

inline const char* role_name(Role r) {
    switch (r) {
        case Role::R: return "R";
        case Role::I: return "I";
        case Role::Bench: return "bench";
    }
    return "?";
}

struct RoleUtilities {
    double zeta = 0.0;
    double e_R = 0.0;
    Estimate U_R, U_I, U_bench;
};

/// Utilities of the three roles open to an infinitesimal investor at (zeta, e_R(zeta)).
inline RoleUtilities evaluate_roles(const ModelParams& p, const ParticipationCurve& curve, double zeta,
                                    const SimGrid& g, unsigned threads = 1) {
    curve.validate();
    ModelParams q = p;
    q.zeta = zeta;
    q.e_R = curve.e_R(zeta);
    const auto w = welfare_report(q, g, threads);
    return {zeta, q.e_R, {w.U_R, w.se_R}, {w.U_I, w.se_I}, {w.U_bench, w.se_bench}};
}

struct SurfaceRow {
    double zeta = 0.0;
    double e_R = 0.0;
    double U_R = 0.0, se_R = 0.0, U_I = 0.0, se_I = 0.0, U_bench = 0.0, se_bench = 0.0;
    Role best_role = Role::Bench;
};

struct StrategyOutcome {
    Role best_role = Role::Bench;
    double best_zeta = 0.0;
    Estimate best_utility;
    Estimate gain_vs_honest;  ///< best utility minus U^I at zeta = 0, paired
    std::vector<SurfaceRow> surface;
};

/// Symmetric grid of n points on [-half_width, half_width].
inline std::vector<double> symmetric_grid(std::size_t n, double half_width) {
    detail::require(n >= 2, "grid needs at least two points");
    std::vector<double> g(n);
    for (std::size_t i = 0; i < n; ++i)
        g[i] = -half_width + 2.0 * half_width * static_cast<double>(i) / static_cast<double>(n - 1);
    if (n % 2 == 1) g[n / 2] = 0.0;
    return g;
}

inline std::vector<double> default_zeta_grid() { return symmetric_grid(41, 5.0); }

/// Exhaustive search over (zeta, role) on one ensemble.
/// Candidates within 3 paired SE of the best point estimate count as ties; ties
/// go to the smallest |zeta|, then to the least active role (bench, I, R).
inline StrategyOutcome best_manipulation(const ModelParams& p, const ParticipationCurve& curve,
                                         const std::vector<double>& zeta_grid, const SimGrid& g,
                                         unsigned threads = 1) {
    p.validate();
    curve.validate();
    detail::require(!zeta_grid.empty(), "zeta grid is empty");
    std::vector<WelfarePoint> pts;
    for (double z : zeta_grid) pts.push_back({z, curve.e_R(z)});
    const bool has_zero = std::find(zeta_grid.begin(), zeta_grid.end(), 0.0) != zeta_grid.end();
    if (!has_zero) pts.push_back({0.0, curve.e_R(0.0)});
    WelfareOptions o;
    o.bench_eta = false;
    o.threads = threads;
    const WelfareBatch batch(p, g, pts, o);

    struct Candidate {
        std::size_t point;
        Role role;
        std::vector<double> col;
        double mean;
    };
    std::vector<Candidate> cands;
    StrategyOutcome out;
    const auto& bench = batch.U_bench();
    const auto eb = mean_se(bench);
    for (std::size_t i = 0; i < zeta_grid.size(); ++i) {
        const auto r = batch.report(i);
        SurfaceRow row{r.zeta, r.e_R, r.U_R, r.se_R, r.U_I, r.se_I, r.U_bench, r.se_bench, Role::Bench};
        double top = r.U_bench;
        if (r.U_I > top) {
            top = r.U_I;
            row.best_role = Role::I;
        }
        if (r.U_R > top) row.best_role = Role::R;
        out.surface.push_back(row);
        cands.push_back({i, Role::R, batch.U_R(i), r.U_R});
        cands.push_back({i, Role::I, batch.U_I(i), r.U_I});
        cands.push_back({i, Role::Bench, bench, eb.value});
    }
    std::size_t best = 0;
    for (std::size_t c = 1; c < cands.size(); ++c)
        if (cands[c].mean > cands[best].mean) best = c;

    auto rank = [](Role r) { return r == Role::Bench ? 0 : (r == Role::I ? 1 : 2); };
    std::size_t pick = best;
    for (std::size_t c = 0; c < cands.size(); ++c) {
        const auto d = paired_se(cands[c].col, cands[best].col);
        if (d.value < -3.0 * d.se) continue;
        const double zc = std::abs(pts[cands[c].point].zeta);
        const double zp = std::abs(pts[cands[pick].point].zeta);
        if (zc < zp || (zc == zp && rank(cands[c].role) < rank(cands[pick].role)) ||
            (zc == zp && cands[c].role == cands[pick].role && pts[cands[c].point].zeta < pts[cands[pick].point].zeta))
            pick = c;
    }
    out.best_role = cands[pick].role;
    out.best_zeta = pts[cands[pick].point].zeta;
    out.best_utility = mean_se(cands[pick].col);
    const std::size_t honest =
        has_zero ? static_cast<std::size_t>(std::find(zeta_grid.begin(), zeta_grid.end(), 0.0) - zeta_grid.begin())
                 : pts.size() - 1;
    out.gain_vs_honest = paired_se(cands[pick].col, batch.U_I(honest));
    return out;
}

}  // namespace hetbel
