#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <type_traits>
#include <vector>

#include "ensemble.hpp"
#include "equilibrium.hpp"
#include "filters.hpp"
#include "params.hpp"
#include "stats.hpp"

namespace hetbel {

/// Objective-measure welfare of one (zeta, e_R) economy on a path ensemble.
/// Paired quantities use per-path differences on shared paths.
struct WelfareReport {
    double zeta = 0.0;
    double e_R = 0.0;
    double U_R = 0.0, U_I = 0.0, U_bench = 0.0, U_total = 0.0, U_autarky = 0.0;
    double se_R = 0.0, se_I = 0.0, se_bench = 0.0, se_total = 0.0;
    double U_bench_eta = std::numeric_limits<double>::quiet_NaN();  ///< benchmark via eta^bench
    double se_bench_eta = std::numeric_limits<double>::quiet_NaN();
    Estimate gap_IR;               ///< U_I - U_R
    Estimate I_minus_bench;        ///< U_I - U_bench
    Estimate R_minus_bench;        ///< U_R - U_bench
    Estimate total_minus_autarky;  ///< U_total - U_total at autarky
    Estimate bench_eta_minus_D;    ///< eta^bench estimator minus dividend estimator
    std::size_t n_paths = 0;
    double T = 0.0;
    double dt = 0.0;
    std::uint64_t seed = 0;
    double tail_bound = 0.0;
    std::vector<std::string> warnings;

    /// Both active classes below the benchmark by more than three paired SEs.
    bool double_loss() const {
        return I_minus_bench.value + 3.0 * I_minus_bench.se < 0.0 && R_minus_bench.value + 3.0 * R_minus_bench.se < 0.0;
    }
};

struct WelfarePoint {
    double zeta = 0.0;
    double e_R = 0.5;
};

struct WelfareOptions {
    bool bench_eta = true;
    bool ratio_integrals = false;
    bool share_slopes = false;
    unsigned threads = 1;
};

/// Bound on the discounted integral beyond T, assuming |E integrand(t)| <= A + B t.
inline double truncation_tail_bound(double rho, double T, double A, double B) {
    const double d = std::exp(-rho * T);
    return d * ((A + B * T) / rho + B / (rho * rho));
}

namespace detail {

inline double welfare_tail(const ModelParams& p, const SimGrid& g, double zeta) {
    const double v = p.sigma_mu * p.sigma_mu / (2.0 * p.kappa);
    const double gmax = std::max({v, initial_gammaR(p), initial_gammaI(p)});
    const double d = stationary_bias_gap(zeta, p);
    const double A = std::abs(std::log(p.rho));
    const double B = std::max(std::abs(p.mu_bar), std::abs(p.mu0)) + 0.5 * p.sigma_D * p.sigma_D +
                     0.5 * p.hR_sq() * (2.0 * gmax + d * d);
    return truncation_tail_bound(p.rho, g.T, A, B);
}

inline double welfare_tail(const TwoStateParams& p, const SimGrid& g, double) {
    const double span = p.mu_h - p.mu_l;
    const double A = std::abs(std::log(p.rho));
    const double B = std::max(std::abs(p.mu_h), std::abs(p.mu_l)) + 0.5 * p.sigma_D * p.sigma_D +
                     0.5 * p.hR_sq() * span * span;
    return truncation_tail_bound(p.rho, g.T, A, B);
}

}  // namespace detail

/// A set of welfare points priced on one common-random-number ensemble.
class WelfareBatch {
public:
    WelfareBatch() = default;

    template <class Params>
    WelfareBatch(const Params& p, const SimGrid& g, const std::vector<WelfarePoint>& pts, const WelfareOptions& o)
        : points_(pts), grid_(g), rho_(p.rho) {
        detail::require(p.rho > 0.0, "welfare requires rho > 0");
        detail::require(!pts.empty(), "welfare batch needs at least one point");
        EnsembleSpec spec;
        spec.grid = g;
        spec.zetas.clear();
        spec.welfare = true;
        spec.bench_eta = o.bench_eta;
        spec.ratio_integrals = o.ratio_integrals;
        spec.share_slopes = o.share_slopes;
        spec.threads = o.threads;
        for (const auto& q : pts) {
            auto it = std::find(spec.zetas.begin(), spec.zetas.end(), q.zeta);
            std::size_t z = static_cast<std::size_t>(it - spec.zetas.begin());
            if (it == spec.zetas.end()) spec.zetas.push_back(q.zeta);
            spec.economies.push_back({z, q.e_R});
            twin_of_.push_back(z);
        }
        zetas_ = spec.zetas;
        bench_eta_ = o.bench_eta;
        for (double z : zetas_) tails_.push_back(detail::welfare_tail(p, g, z));
        if constexpr (std::is_same_v<Params, ModelParams>) {
            const MeanRevertingModel model(p, g, spec.zetas);
            r_ = run_ensemble(model, spec);
        } else {
            const TwoStateModel model(p, g, spec.zetas);
            r_ = run_ensemble(model, spec);
        }
    }

    std::size_t size() const { return points_.size(); }
    const WelfarePoint& point(std::size_t i) const { return points_[i]; }
    const EnsembleResult& raw() const { return r_; }
    const std::vector<double>& zetas() const { return zetas_; }
    std::size_t twin(std::size_t i) const { return twin_of_[i]; }

    std::vector<double> U_R(std::size_t i) const { return column(i, r_.A_R); }
    std::vector<double> U_I(std::size_t i) const { return column(i, r_.A_I[twin_of_[i]]); }
    const std::vector<double>& U_bench() const { return r_.bench_D; }

    std::vector<double> U_bench_eta(std::size_t i) const {
        detail::require(bench_eta_, "batch was built without the eta^bench estimator");
        return column(i, r_.A_bench[i]);
    }

    /// Per-path U_total, with c^m / e^m as the per-unit-wealth consumption of class m.
    std::vector<double> U_total(std::size_t i) const {
        const double e = points_[i].e_R;
        const auto ur = U_R(i);
        const auto ui = U_I(i);
        const double c = std::log(rho_) * r_.sum_w;
        std::vector<double> v(ur.size());
        for (std::size_t k = 0; k < v.size(); ++k) v[k] = e * ur[k] + (1.0 - e) * ui[k] - c;
        return v;
    }

    std::vector<double> U_autarky() const {
        const double c = std::log(rho_) * r_.sum_w;
        std::vector<double> v(r_.bench_D.size());
        for (std::size_t k = 0; k < v.size(); ++k) v[k] = r_.bench_D[k] - c;
        return v;
    }

    WelfareReport report(std::size_t i) const {
        WelfareReport w;
        w.zeta = points_[i].zeta;
        w.e_R = points_[i].e_R;
        const auto ur = U_R(i);
        const auto ui = U_I(i);
        const auto ut = U_total(i);
        const auto ua = U_autarky();
        const auto& ub = r_.bench_D;
        const auto eR = mean_se(ur), eI = mean_se(ui), eB = mean_se(ub), eT = mean_se(ut);
        w.U_R = eR.value;
        w.se_R = eR.se;
        w.U_I = eI.value;
        w.se_I = eI.se;
        w.U_bench = eB.value;
        w.se_bench = eB.se;
        w.U_total = eT.value;
        w.se_total = eT.se;
        w.U_autarky = mean(ua);
        w.gap_IR = paired_se(ui, ur);
        w.I_minus_bench = paired_se(ui, ub);
        w.R_minus_bench = paired_se(ur, ub);
        w.total_minus_autarky = paired_se(ut, ua);
        if (bench_eta_) {
            const auto be = U_bench_eta(i);
            const auto eE = mean_se(be);
            w.U_bench_eta = eE.value;
            w.se_bench_eta = eE.se;
            w.bench_eta_minus_D = paired_se(be, ub);
        }
        w.n_paths = grid_.n_paths;
        w.T = grid_.T;
        w.dt = grid_.dt;
        w.seed = grid_.seed;
        w.tail_bound = tails_[twin_of_[i]];
        if (w.tail_bound > 0.1 * std::min(w.se_R, w.se_I))
            w.warnings.push_back("truncation tail bound " + std::to_string(w.tail_bound) +
                                 " exceeds 0.1 SE; increase T");
        return w;
    }

private:
    std::vector<double> column(std::size_t i, const std::vector<double>& a) const {
        const auto& xi = r_.A_xi[i];
        std::vector<double> v(a.size());
        for (std::size_t k = 0; k < v.size(); ++k) v[k] = (r_.C0 + a[k]) - xi[k];
        return v;
    }

    std::vector<WelfarePoint> points_;
    std::vector<std::size_t> twin_of_;
    std::vector<double> zetas_;
    std::vector<double> tails_;
    SimGrid grid_;
    double rho_ = 0.0;
    bool bench_eta_ = false;
    EnsembleResult r_;
};

inline WelfareReport welfare_report(const ModelParams& p, const SimGrid& g, unsigned threads = 1) {
    p.validate();
    detail::require(p.rho > 0.0, "welfare_report requires rho > 0");
    WelfareOptions o;
    o.threads = threads;
    return WelfareBatch(p, g, {{p.zeta, p.e_R}}, o).report(0);
}

// ---------------------------------------------------------------- deterministic oracle

/// gap(zeta) = (h_D^2/2) int_0^inf e^{-rho s}/rho (gamma^R - gamma^I - Delta(s; zeta)^2) ds
///           = c0 - zeta^2 c1.
struct WelfareGapOracle {
    double c0 = 0.0;
    double c1 = 0.0;

    double operator()(double zeta) const { return c0 - zeta * zeta * c1; }

    static WelfareGapOracle build(const ModelParams& p) {
        p.validate();
        if (!p.unbiased_initialization())
            throw UnsupportedModel("the welfare-gap oracle needs unbiased initial estimates; use Monte Carlo");
        detail::require(p.rho > 0.0, "welfare-gap oracle requires rho > 0");
        const double HR = p.hR_sq();
        const double HI = p.hI_sq();
        const double he = p.h_e();
        const double rho = p.rho;
        const double horizon = 200.0 + 40.0 / p.kappa;
        const double h = std::min(0.01, 0.02 / rho);
        const auto n = static_cast<std::size_t>(std::ceil(horizon / h));
        struct Y {
            double gR, gI, d, a0, a1;
        };
        auto f = [&](double s, const Y& y) {
            const double disc = std::exp(-rho * s) / rho;
            return Y{riccati_rhs(y.gR, HR, p), riccati_rhs(y.gI, HI, p),
                     -p.kappa * y.d - y.gI * HI * y.d + y.gI * he, disc * (y.gR - y.gI), disc * y.d * y.d};
        };
        auto axpy = [](const Y& y, double a, const Y& k) {
            return Y{y.gR + a * k.gR, y.gI + a * k.gI, y.d + a * k.d, y.a0 + a * k.a0, y.a1 + a * k.a1};
        };
        Y y{initial_gammaR(p), initial_gammaI(p),
            p.init == InitMode::Stationary ? stationary_bias_gap(1.0, p) : 0.0, 0.0, 0.0};
        for (std::size_t i = 0; i < n; ++i) {
            const double s = static_cast<double>(i) * h;
            const Y k1 = f(s, y);
            const Y k2 = f(s + 0.5 * h, axpy(y, 0.5 * h, k1));
            const Y k3 = f(s + 0.5 * h, axpy(y, 0.5 * h, k2));
            const Y k4 = f(s + h, axpy(y, h, k3));
            y = Y{y.gR + h / 6.0 * (k1.gR + 2.0 * k2.gR + 2.0 * k3.gR + k4.gR),
                  y.gI + h / 6.0 * (k1.gI + 2.0 * k2.gI + 2.0 * k3.gI + k4.gI),
                  y.d + h / 6.0 * (k1.d + 2.0 * k2.d + 2.0 * k3.d + k4.d),
                  y.a0 + h / 6.0 * (k1.a0 + 2.0 * k2.a0 + 2.0 * k3.a0 + k4.a0),
                  y.a1 + h / 6.0 * (k1.a1 + 2.0 * k2.a1 + 2.0 * k3.a1 + k4.a1)};
        }
        // Beyond the horizon the curves sit at their stationary values.
        const double end = static_cast<double>(n) * h;
        const double tail = std::exp(-rho * end) / (rho * rho);
        const double gR = stationary_gamma(HR, p);
        const double gI = stationary_gamma(HI, p);
        const double d1 = stationary_bias_gap(1.0, p);
        WelfareGapOracle o;
        o.c0 = 0.5 * HR * (y.a0 + tail * (gR - gI));
        o.c1 = 0.5 * HR * (y.a1 + tail * d1 * d1);
        return o;
    }
};

inline double welfare_gap_ode(const ModelParams& p, double zeta) {
    return WelfareGapOracle::build(p)(zeta);
}

inline double welfare_gap_ode(const TwoStateParams&, double) {
    throw UnsupportedModel("the welfare-gap oracle exists only for the mean-reverting model");
}

struct CriticalZetas {
    double zeta1 = 0.0;
    double zeta2 = 0.0;
    int iterations = 0;
};

/// Generic bracketing root search on a function positive at 0 and negative for large |zeta|.
template <class F>
CriticalZetas bisect_critical_zeta(const F& gap, double tol = 1e-10, double limit = 1e3) {
    if (!(gap(0.0) > 0.0)) throw ModelError("gap at zeta = 0 is not positive; no critical bias");
    double lo = 0.0;
    double hi = 1.0;
    while (gap(hi) > 0.0) {
        lo = hi;
        hi *= 2.0;
        if (hi > limit) throw ModelError("no sign change of the welfare gap within (0, 1e3]");
    }
    CriticalZetas c;
    while (hi - lo > tol) {
        const double mid = 0.5 * (lo + hi);
        (gap(mid) > 0.0 ? lo : hi) = mid;
        ++c.iterations;
    }
    c.zeta2 = 0.5 * (lo + hi);
    c.zeta1 = -c.zeta2;
    return c;
}

inline CriticalZetas critical_zeta_welfare(const ModelParams& p) {
    const auto o = WelfareGapOracle::build(p);
    return bisect_critical_zeta(o);
}

// ---------------------------------------------------------------- e_R structure

struct EndpointSlopes {
    Estimate at0;  ///< d(U^I - U^bench)/de_R at e_R = 0
    Estimate at1;  ///< same at e_R = 1
    double kurtosis0 = 0.0;
    double kurtosis1 = 0.0;
    std::vector<std::string> warnings;
};

/// Slopes from E[eta^R/eta^I] and E[eta^I/eta^R] integrated with the discount weight.
inline EndpointSlopes endpoint_slopes(const ModelParams& p, const SimGrid& g, unsigned threads = 1) {
    p.validate();
    detail::require(p.rho > 0.0, "endpoint_slopes requires rho > 0");
    EnsembleSpec spec;
    spec.grid = g;
    spec.zetas = {p.zeta};
    spec.ratio_integrals = true;
    spec.threads = threads;
    const auto r = run_ensemble(MeanRevertingModel(p, g, spec.zetas), spec);
    std::vector<double> s0(r.S0[0].size());
    for (std::size_t k = 0; k < s0.size(); ++k) s0[k] = -r.S0[0][k];
    EndpointSlopes e;
    e.at0 = mean_se(s0);
    e.at1 = mean_se(r.S1[0]);
    e.kurtosis0 = excess_kurtosis(s0);
    e.kurtosis1 = excess_kurtosis(r.S1[0]);
    for (double k : {e.kurtosis0, e.kurtosis1})
        if (k > 20.0) {
            e.warnings.push_back("likelihood-ratio estimator is heavy tailed (excess kurtosis " + std::to_string(k) +
                                 "); use a shorter T for this diagnostic");
            break;
        }
    return e;
}

struct SweepResult {
    std::string axis;
    std::vector<double> values;
    std::vector<WelfareReport> reports;
    std::vector<bool> double_loss;
    std::vector<std::vector<double>> U_I_paths;  ///< per point, kept for paired second differences
    std::vector<std::vector<double>> U_total_paths;
    std::vector<double> U_autarky_paths;
};

/// Prices every e_R of the grid on one ensemble (e_R only enters through lambda and the weights).
inline SweepResult double_loss_scan(const ModelParams& p, double zeta, const std::vector<double>& eR_grid,
                                    const SimGrid& g, unsigned threads = 1) {
    p.validate();
    std::vector<WelfarePoint> pts;
    for (double e : eR_grid) {
        detail::require(e >= 0.0 && e <= 1.0, "e_R grid must lie in [0,1]");
        pts.push_back({zeta, e});
    }
    WelfareOptions o;
    o.threads = threads;
    o.bench_eta = false;
    const WelfareBatch b(p, g, pts, o);
    SweepResult s;
    s.axis = "e_R";
    s.values = eR_grid;
    s.U_autarky_paths = b.U_autarky();
    for (std::size_t i = 0; i < pts.size(); ++i) {
        s.reports.push_back(b.report(i));
        const double e = eR_grid[i];
        s.double_loss.push_back(e > 0.0 && e < 1.0 && s.reports.back().double_loss());
        s.U_I_paths.push_back(b.U_I(i));
        s.U_total_paths.push_back(b.U_total(i));
    }
    return s;
}

struct ConvexityReport {
    std::vector<Estimate> second_differences;  ///< U^I(e-h) - 2U^I(e) + U^I(e+h), interior points
    bool convex = true;                         ///< every second difference >= -3 SE
    double gap_spread = 0.0;                    ///< max - min of U_I - U_R over the grid
    std::vector<Estimate> total_minus_autarky;
};

/// Checks convexity of U^I(e_R), e_R-invariance of U_I - U_R and the negative-sum property.
inline ConvexityReport convexity_check(const SweepResult& s) {
    detail::require(s.axis == "e_R", "convexity_check needs an e_R sweep");
    detail::require(s.U_I_paths.size() == s.values.size(), "sweep lacks per-path columns");
    ConvexityReport c;
    for (std::size_t i = 1; i + 1 < s.values.size(); ++i) {
        const double hl = s.values[i] - s.values[i - 1];
        const double hr = s.values[i + 1] - s.values[i];
        detail::require(hl > 0.0 && hr > 0.0, "e_R grid must increase");
        // Non-uniform three-point second difference, scaled to the uniform form.
        const double a = 2.0 * hr / (hl + hr), m = -2.0, b = 2.0 * hl / (hl + hr);
        const auto d = combo_se({s.U_I_paths[i - 1], s.U_I_paths[i], s.U_I_paths[i + 1]}, {a, m, b});
        c.second_differences.push_back(d);
        if (d.value < -3.0 * d.se) c.convex = false;
    }
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (const auto& r : s.reports) {
        const double g = r.U_I - r.U_R;
        lo = std::min(lo, g);
        hi = std::max(hi, g);
    }
    c.gap_spread = hi - lo;
    for (const auto& r : s.reports) c.total_minus_autarky.push_back(r.total_minus_autarky);
    return c;
}

// ---------------------------------------------------------------- two-state counterexample

struct CounterexampleResult {
    Estimate slope;  ///< d(U^I - U^bench)/de_R at e_R = 0
    std::size_t n_paths = 0;
    std::size_t clamps = 0;
    bool conclusive = false;  ///< |slope| >= 2 SE
    std::vector<std::string> warnings;
};

/// Slope at e_R = 0 for the two-state model, -int e^{-rho t}(E[eta^R_t/eta^I_t] - 1) dt.
///
/// Simulated in innovations form: the full-information filter mu* (the
/// unbiased Class-I estimate) and the innovation increments drive every
/// estimate, so Y = log eta^R - log eta^I never touches the hidden chain.
/// The conditional mean of each ratio increment is known in closed form,
///   E_k[e^{Y_{k+1}}] = e^{Y_k} exp(h_D^2 dt (mu^I - mu^R)(mu^I - mu*)),
/// and the estimator sums those (with expm1) instead of the raw ratio.
/// Paths come in antithetic pairs.
inline CounterexampleResult two_state_counterexample(const TwoStateParams& p, const SimGrid& g) {
    p.validate();
    g.validate();
    detail::require(p.rho > 0.0, "counterexample slope requires rho > 0");
    const std::size_t n = g.n_steps();
    const double dt = g.dt;
    const double sdt = std::sqrt(dt);
    const double hD = p.h_D();
    const double h2dt = hD * hD * dt;
    TwoStateParams unbiased = p;
    unbiased.zeta = 0.0;
    const PathStream stream(g.seed);
    const std::vector<double> w = detail::discount_weights(g, p.rho);

    const std::size_t pairs = (g.n_paths + 1) / 2;
    std::vector<double> est(pairs);
    std::size_t clamps = 0;
    GaussianLanes gl;
    for (std::size_t first = 0; first < pairs; first += kLanes) {
        const std::size_t cnt = std::min(kLanes, pairs - first);
        struct Lanes {
            double star, r, i, y, acc, slope;
        };
        std::vector<Lanes> st(2 * kLanes);
        for (auto& s : st) s = {p.mu0, p.muR0, p.muI0, 0.0, 0.0, 0.0};
        for (std::size_t k = 0; k < n; ++k) {
            stream.gaussians(first, k, gl);
            for (std::size_t l = 0; l < cnt; ++l) {
                for (int sign = 0; sign < 2; ++sign) {
                    Lanes& s = st[2 * l + static_cast<std::size_t>(sign)];
                    const double m = sign == 0 ? sdt : -sdt;
                    const double dW = m * gl.ch[0][l];
                    const double dB = m * gl.ch[1][l];
                    // Left-point contributions.
                    s.slope -= w[k] * s.acc;
                    s.acc += std::exp(s.y) * std::expm1(h2dt * (s.i - s.r) * (s.i - s.star));
                    const double diff = s.r - s.i;
                    s.y += diff * hD * dW - h2dt * diff * (0.5 * (s.r + s.i) - s.star);
                    WonhamState ws{s.r, s.i, 0.0, 0};
                    ws = wonham_step(ws, s.star, dW, dB, dt, p);
                    WonhamState wstar{s.star, s.star, 0.0, 0};
                    wstar = wonham_step(wstar, s.star, dW, dB, dt, unbiased);
                    clamps += ws.clamps + (wstar.clamps > 0 ? 1 : 0);
                    s.r = ws.muR;
                    s.i = ws.muI;
                    s.star = wstar.muI;
                }
            }
        }
        for (std::size_t l = 0; l < cnt; ++l) est[first + l] = 0.5 * (st[2 * l].slope + st[2 * l + 1].slope);
    }
    CounterexampleResult c;
    c.slope = mean_se(est);
    c.n_paths = 2 * pairs;
    c.clamps = clamps;
    c.conclusive = std::abs(c.slope.value) >= 2.0 * c.slope.se && c.slope.se > 0.0;
    if (!c.conclusive && c.slope.value != 0.0)
        c.warnings.push_back("slope is within 2 SE of zero; increase the number of paths");
    return c;
}

}  // namespace hetbel
