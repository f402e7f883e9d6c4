#pragma once

#include <cmath>
#include <cstdio>
#include <string>
#include <utility>
#include <vector>

#include "config.hpp"
#include "csv.hpp"
#include "model_core.hpp"
#include "strategist.hpp"
#include "survival.hpp"
#include "svg.hpp"
#include "welfare.hpp"

namespace hetbel {

/// Files produced by one experiment, in write order, plus a human summary for stdout.
struct ExperimentOutput {
    std::vector<std::pair<std::string, std::string>> files;
    std::string summary;

    void add(std::string name, std::string content) { files.emplace_back(std::move(name), std::move(content)); }
};

namespace detail {

inline std::string fmt(const char* f, double v) {
    char b[64];
    std::snprintf(b, sizeof b, f, v);
    return b;
}

inline std::string tag(double v) { return fmt("%g", v); }

inline std::vector<double> or_default(const std::vector<double>& v, std::vector<double> d) { return v.empty() ? d : v; }

inline std::vector<double> unit_grid(std::size_t n) {
    std::vector<double> g(n);
    for (std::size_t i = 0; i < n; ++i) g[i] = static_cast<double>(i) / static_cast<double>(n - 1);
    return g;
}

inline std::size_t stride_for(const SimGrid& g, double every) {
    return std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(every / g.dt)));
}

inline ExperimentOutput run_paths(const ExperimentConfig& c) {
    const std::vector<double> zetas = or_default(c.zetas, {0.0, 1.0, -1.0});
    ModelParams p = c.model;
    const PathBundle truth = simulate_truth(p, c.grid, 0);
    std::vector<PathBundle> runs;
    for (double z : zetas) {
        p.zeta = z;
        PathBundle b = truth;
        run_filters(p, c.grid, b);
        runs.push_back(std::move(b));
    }
    std::vector<std::string> head{"t", "mu", "mu_R"};
    for (double z : zetas) head.push_back("mu_I_zeta_" + tag(z));
    CsvTable t(head);
    std::vector<SvgSeries> s(2 + zetas.size());
    s[0].name = "mu";
    s[1].name = "mu^R";
    for (std::size_t j = 0; j < zetas.size(); ++j) s[2 + j].name = "mu^I, zeta=" + tag(zetas[j]);
    const std::size_t stride = stride_for(c.grid, 1.0);
    for (std::size_t k = 0; k < truth.size(); k += stride) {
        const double tk = c.grid.time(k);
        std::vector<CsvTable::Cell> row{tk, truth.mu[k], runs[0].muR[k]};
        s[0].x.push_back(tk);
        s[0].y.push_back(truth.mu[k]);
        s[1].x.push_back(tk);
        s[1].y.push_back(runs[0].muR[k]);
        for (std::size_t j = 0; j < zetas.size(); ++j) {
            row.push_back(runs[j].muI[k]);
            s[2 + j].x.push_back(tk);
            s[2 + j].y.push_back(runs[j].muI[k]);
        }
        t.add(std::move(row));
    }
    ExperimentOutput o;
    o.add("fig1_paths.csv", t.str());
    o.add("fig1_paths.svg", svg_line_chart("Drift and filter estimates, path 0", "t", "drift", s));
    o.summary = "paths: " + std::to_string(t.rows()) + " rows on path 0\n";
    return o;
}

inline std::vector<std::string> welfare_header() {
    return {"zeta",          "e_R",           "U_R",           "se_R",
            "U_I",           "se_I",          "U_bench",       "se_bench",
            "U_total",       "se_total",      "U_autarky",     "gap_IR",
            "se_gap_IR",     "I_minus_bench", "se_I_minus_bench", "R_minus_bench",
            "se_R_minus_bench", "total_minus_autarky", "se_total_minus_autarky", "double_loss"};
}

inline std::vector<CsvTable::Cell> welfare_row(const WelfareReport& r) {
    const bool interior = r.e_R > 0.0 && r.e_R < 1.0;
    return {r.zeta,
            r.e_R,
            r.U_R,
            r.se_R,
            r.U_I,
            r.se_I,
            r.U_bench,
            r.se_bench,
            r.U_total,
            r.se_total,
            r.U_autarky,
            r.gap_IR.value,
            r.gap_IR.se,
            r.I_minus_bench.value,
            r.I_minus_bench.se,
            r.R_minus_bench.value,
            r.R_minus_bench.se,
            r.total_minus_autarky.value,
            r.total_minus_autarky.se,
            std::string(interior && r.double_loss() ? "1" : "0")};
}

template <class Params>
WelfareBatch welfare_grid(const Params& p, const SimGrid& g, const std::vector<double>& zetas,
                          const std::vector<double>& eR, unsigned threads) {
    std::vector<WelfarePoint> pts;
    for (double z : zetas)
        for (double e : eR) pts.push_back({z, e});
    WelfareOptions wo;
    wo.bench_eta = false;
    wo.threads = threads;
    return WelfareBatch(p, g, pts, wo);
}

inline std::string welfare_svg(const WelfareBatch& b, const std::vector<double>& zetas, std::size_t n_e,
                               const std::string& title) {
    std::vector<SvgSeries> s;
    for (std::size_t z = 0; z < zetas.size(); ++z) {
        SvgSeries a{"U^I, zeta=" + tag(zetas[z]), {}, {}};
        SvgSeries r{"U^R, zeta=" + tag(zetas[z]), {}, {}};
        for (std::size_t j = 0; j < n_e; ++j) {
            const auto rep = b.report(z * n_e + j);
            a.x.push_back(rep.e_R);
            a.y.push_back(rep.U_I);
            r.x.push_back(rep.e_R);
            r.y.push_back(rep.U_R);
        }
        s.push_back(std::move(a));
        if (z == 0) s.push_back(std::move(r));
    }
    return svg_line_chart(title, "e_R", "welfare", s);
}

inline ExperimentOutput run_welfare_sweep(const ExperimentConfig& c, unsigned threads) {
    const auto zetas = or_default(c.zetas, {0.0, 0.5, -0.5, 1.5, -1.5, 3.0, -3.0});
    const auto eR = or_default(c.e_R, unit_grid(11));
    const auto b = welfare_grid(c.model, c.grid, zetas, eR, threads);
    CsvTable t(welfare_header());
    for (std::size_t i = 0; i < b.size(); ++i) t.add(welfare_row(b.report(i)));

    CsvTable oracle({"zeta", "gap_IR_mc", "se_gap_IR", "gap_IR_ode", "z_score"});
    std::string sum = "welfare-sweep: U_I - U_R per zeta (Monte Carlo vs ODE)\n";
    const auto gap = WelfareGapOracle::build(c.model);
    for (std::size_t z = 0; z < zetas.size(); ++z) {
        const auto r = b.report(z * eR.size());
        const double ode = gap(zetas[z]);
        const double zs = r.gap_IR.se > 0.0 ? (r.gap_IR.value - ode) / r.gap_IR.se : 0.0;
        oracle.add({zetas[z], r.gap_IR.value, r.gap_IR.se, ode, zs});
        sum += "  zeta " + fmt("%+.3f", zetas[z]) + "  mc " + fmt("%.6g", r.gap_IR.value) + " (se " +
               fmt("%.3g", r.gap_IR.se) + ")  ode " + fmt("%.6g", ode) + "\n";
    }
    ExperimentOutput o;
    o.add("fig2_welfare.csv", t.str());
    o.add("fig2_gap_oracle.csv", oracle.str());
    o.add("fig2_welfare.svg", welfare_svg(b, zetas, eR.size(), "Objective welfare against e_R"));
    o.summary = sum;
    return o;
}

inline ExperimentOutput run_double_loss(const ExperimentConfig& c, unsigned threads) {
    const auto zetas = or_default(c.zetas, {0.0, 3.0});
    const auto eR = or_default(c.e_R, {0.01, 0.02, 0.05, 0.1, 0.25, 0.5, 0.75, 0.9, 0.95, 0.98, 0.99});
    CsvTable t(welfare_header());
    std::string sum = "double-loss:\n";
    for (double z : zetas) {
        const auto s = double_loss_scan(c.model, z, eR, c.grid, threads);
        std::size_t hits = 0;
        for (std::size_t i = 0; i < s.reports.size(); ++i) {
            t.add(welfare_row(s.reports[i]));
            if (s.double_loss[i]) ++hits;
        }
        sum += "  zeta " + fmt("%+.3f", z) + ": " + std::to_string(hits) + " of " + std::to_string(eR.size()) +
               " e_R points flagged\n";
    }
    ExperimentOutput o;
    o.add("double_loss.csv", t.str());
    o.summary = sum;
    return o;
}

inline ExperimentOutput run_strategist(const ExperimentConfig& c, unsigned threads) {
    const auto grid = symmetric_grid(c.strategist_points, c.strategist_half_width);
    ExperimentOutput o;
    CsvTable summary({"a", "b", "best_role", "best_zeta", "best_utility", "se_best_utility", "gain_vs_honest",
                      "se_gain_vs_honest"});
    std::string sum = "strategist:\n";
    for (const auto& curve : ParticipationCurve::presets()) {
        const auto r = best_manipulation(c.model, curve, grid, c.grid, threads);
        CsvTable t({"zeta", "e_R", "U_R", "se_R", "U_I", "se_I", "U_bench", "se_bench", "best_role"});
        std::vector<SvgSeries> s{{"U^R", {}, {}}, {"U^I", {}, {}}, {"U^bench", {}, {}}};
        for (const auto& row : r.surface) {
            t.add({row.zeta, row.e_R, row.U_R, row.se_R, row.U_I, row.se_I, row.U_bench, row.se_bench,
                   std::string(role_name(row.best_role))});
            for (auto& q : s) q.x.push_back(row.zeta);
            s[0].y.push_back(row.U_R);
            s[1].y.push_back(row.U_I);
            s[2].y.push_back(row.U_bench);
        }
        const std::string stem = "fig4_strategist_a" + tag(curve.a) + "_b" + tag(curve.b);
        o.add(stem + ".csv", t.str());
        o.add(stem + ".svg", svg_line_chart("Role utilities, a=" + tag(curve.a) + " b=" + tag(curve.b), "zeta",
                                            "welfare", s));
        summary.add({curve.a, curve.b, std::string(role_name(r.best_role)), r.best_zeta, r.best_utility.value,
                     r.best_utility.se, r.gain_vs_honest.value, r.gain_vs_honest.se});
        sum += "  a=" + tag(curve.a) + " b=" + tag(curve.b) + ": " + role_name(r.best_role) + " at zeta " +
               fmt("%+.3f", r.best_zeta) + ", gain " + fmt("%.4g", r.gain_vs_honest.value) + " (se " +
               fmt("%.3g", r.gain_vs_honest.se) + ")\n";
    }
    o.add("fig4_strategist_summary.csv", summary.str());
    o.summary = sum;
    return o;
}

inline ExperimentOutput run_survival(const ExperimentConfig& c, unsigned threads) {
    const auto zetas = or_default(c.zetas, {0.0, 1.0, 2.0, 3.0});
    SimGrid g = c.grid;
    g.T = c.survival_T;
    SurvivalOptions so;
    so.n_probes = c.survival_probes;
    so.threads = threads;
    const auto res = simulate_consumption_ratio(c.model, g, zetas, so);
    std::vector<std::string> head{"t"};
    for (double z : zetas) {
        head.push_back("mean_log_eta_zeta_" + tag(z));
        head.push_back("se_zeta_" + tag(z));
        head.push_back("cI_over_cR_zeta_" + tag(z));
    }
    CsvTable t(head);
    std::vector<SvgSeries> s;
    for (double z : zetas) s.push_back({"zeta=" + tag(z), {}, {}});
    const double ratio0 = (1.0 - c.model.e_R) / c.model.e_R;
    for (std::size_t j = 0; j < res[0].times.size(); ++j) {
        std::vector<CsvTable::Cell> row{res[0].times[j]};
        for (std::size_t z = 0; z < zetas.size(); ++z) {
            const auto& e = res[z].mean_log_eta[j];
            row.push_back(e.value);
            row.push_back(e.se);
            // Ratio implied by the cross-sectional mean of log eta.
            row.push_back(ratio0 * std::exp(-e.value));
            s[z].x.push_back(res[0].times[j]);
            s[z].y.push_back(ratio0 * std::exp(-e.value));
        }
        t.add(std::move(row));
    }
    CsvTable summary({"zeta", "late_slope", "se_late_slope", "predicted_slope", "relative_error",
                      "fraction_declining", "class_I_survives", "class_R_survives"});
    const auto st = stationary_stats(c.model);
    std::string sum = "survival: zeta4 = " + fmt("%.12g", st.zeta4) + "\n";
    for (const auto& r : res) {
        const double rel = r.predicted_slope != 0.0 ? r.late_slope.value / r.predicted_slope - 1.0 : 0.0;
        summary.add({r.zeta, r.late_slope.value, r.late_slope.se, r.predicted_slope, rel, r.fraction_declining,
                     std::string(r.class_I_survives ? "1" : "0"), std::string(r.class_R_survives ? "1" : "0")});
        sum += "  zeta " + fmt("%+.3f", r.zeta) + ": slope " + fmt("%.5g", r.late_slope.value) + " (se " +
               fmt("%.3g", r.late_slope.se) + "), predicted " + fmt("%.5g", r.predicted_slope) + "\n";
    }
    ExperimentOutput o;
    o.add("fig5_consumption_ratio.csv", t.str());
    o.add("fig5_survival_summary.csv", summary.str());
    o.add("fig5_consumption_ratio.svg", svg_line_chart("Class-I to Class-R consumption ratio", "t", "cI/cR", s));
    o.summary = sum;
    return o;
}

inline ExperimentOutput run_two_state(const ExperimentConfig& c, unsigned threads) {
    const TwoStateParams& p = c.two_state;
    p.validate();
    ExperimentOutput o;

    const auto path = simulate_two_state(p, c.grid, 0);
    CsvTable tp({"t", "mu", "mu_R", "mu_I"});
    std::vector<SvgSeries> s{{"mu", {}, {}}, {"mu^R", {}, {}}, {"mu^I", {}, {}}};
    WonhamState ws{p.muR0, p.muI0, 0.0, 0};
    const std::size_t stride = stride_for(c.grid, 0.5);
    for (std::size_t k = 0; k < path.mu.size(); ++k) {
        if (k % stride == 0) {
            const double tk = c.grid.time(k);
            tp.add({tk, path.mu[k], ws.muR, ws.muI});
            for (auto& q : s) q.x.push_back(tk);
            s[0].y.push_back(path.mu[k]);
            s[1].y.push_back(ws.muR);
            s[2].y.push_back(ws.muI);
        }
        if (k + 1 < path.mu.size()) ws = wonham_step(ws, path.mu[k], path.dW[k], path.dB[k], c.grid.dt, p);
    }
    o.add("fig3_two_state_paths.csv", tp.str());
    o.add("fig3_two_state_paths.svg", svg_line_chart("Two-state drift and Wonham estimates", "t", "drift", s));

    const auto zetas = or_default(c.zetas, {0.0, 0.5, 1.5, 3.0});
    const auto eR = or_default(c.e_R, unit_grid(11));
    const auto b = welfare_grid(p, c.grid, zetas, eR, threads);
    CsvTable tw(welfare_header());
    for (std::size_t i = 0; i < b.size(); ++i) tw.add(welfare_row(b.report(i)));
    o.add("fig3_two_state_welfare.csv", tw.str());
    o.add("fig3_two_state_welfare.svg", welfare_svg(b, zetas, eR.size(), "Two-state welfare against e_R"));

    SimGrid gc = c.grid;
    gc.T = c.counterexample_T;
    gc.dt = c.counterexample_dt;
    const auto cx = two_state_counterexample(TwoStateParams::counterexample(), gc);
    CsvTable tc({"slope_at_e_R_0", "se", "n_paths", "clamps", "conclusive"});
    tc.add({cx.slope.value, cx.slope.se, static_cast<double>(cx.n_paths), static_cast<double>(cx.clamps),
            std::string(cx.conclusive ? "1" : "0")});
    o.add("fig3_counterexample.csv", tc.str());
    o.summary = "two-state: counterexample slope at e_R = 0 is " + fmt("%.6g", cx.slope.value) + " (se " +
                fmt("%.3g", cx.slope.se) + ")\n";
    return o;
}

inline ExperimentOutput run_critical_zeta(const ExperimentConfig& c) {
    const ModelParams& p = c.model;
    const auto w = critical_zeta_welfare(p);
    const auto st = stationary_stats(p);
    const double z4b = zeta4_bisection(p);
    ModelParams ps = p;
    ps.init = InitMode::Stationary;
    const double z2s = critical_zeta_welfare(ps).zeta2;
    const auto eq = rho_zero_equivalence(p, c.rho_list);

    CsvTable t({"quantity", "value"});
    t.add({std::string("zeta1"), w.zeta1});
    t.add({std::string("zeta2"), w.zeta2});
    t.add({std::string("zeta3"), st.zeta3});
    t.add({std::string("zeta4"), st.zeta4});
    t.add({std::string("zeta4_bisection"), z4b});
    t.add({std::string("zeta4_closed_minus_bisection"), st.zeta4 - z4b});
    t.add({std::string("zeta2_stationary_init"), z2s});
    t.add({std::string("zeta2_stationary_minus_zeta4"), z2s - st.zeta4});
    CsvTable r({"rho", "zeta2", "zeta4", "distance"});
    for (const auto& row : eq.rows) r.add({row.rho, row.zeta2, row.zeta4, row.distance});

    std::string sum;
    sum += "zeta1 = " + fmt("%.12g", w.zeta1) + "\n";
    sum += "zeta2 = " + fmt("%.12g", w.zeta2) + "\n";
    sum += "zeta3 = " + fmt("%.12g", st.zeta3) + "\n";
    sum += "zeta4 = " + fmt("%.12g", st.zeta4) + "  (bisection " + fmt("%.12g", z4b) + ", diff " +
           fmt("%.3g", st.zeta4 - z4b) + ")\n";
    sum += "zeta2 with stationary start = " + fmt("%.12g", z2s) + "  (minus zeta4: " + fmt("%.3g", z2s - st.zeta4) +
           ")\n";
    for (const auto& row : eq.rows)
        sum += "  rho " + fmt("%-8g", row.rho) + " zeta2 " + fmt("%.10f", row.zeta2) + "  |zeta2 - zeta4| " +
               fmt("%.3g", row.distance) + "\n";
    sum += std::string("  distance strictly decreasing: ") + (eq.strictly_decreasing ? "yes" : "no") + "\n";

    ExperimentOutput o;
    o.add("critical_zeta.csv", t.str());
    o.add("critical_zeta_rho.csv", r.str());
    o.summary = sum;
    return o;
}

}  // namespace detail

/// Runs the configured experiment. `threads` changes speed only.
inline ExperimentOutput run_experiment(const ExperimentConfig& c, unsigned threads = 1) {
    c.model.validate();
    c.grid.validate();
    switch (c.experiment) {
        case Experiment::Paths: return detail::run_paths(c);
        case Experiment::WelfareSweep: return detail::run_welfare_sweep(c, threads);
        case Experiment::DoubleLoss: return detail::run_double_loss(c, threads);
        case Experiment::Strategist: return detail::run_strategist(c, threads);
        case Experiment::Survival: return detail::run_survival(c, threads);
        case Experiment::TwoState: return detail::run_two_state(c, threads);
        case Experiment::CriticalZeta: return detail::run_critical_zeta(c);
    }
    throw ConfigError("unknown experiment");
}

}  // namespace hetbel
