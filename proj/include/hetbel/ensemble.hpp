#pragma once

// Block Monte Carlo engine. Paths are simulated in fixed-width lane blocks;
// every per-path quantity depends only on (seed, path index), and all
// cross-path reductions run in block order, so results do not depend on the
// number of worker threads.

#include <Eigen/Core>

#include <array>
#include <cmath>
#include <cstdint>
#include <thread>
#include <vector>

#include "filters.hpp"
#include "model_core.hpp"
#include "params.hpp"
#include "rng.hpp"
#include "stats.hpp"

namespace hetbel {

/// One equilibrium to price on the shared ensemble.
struct EconomyConfig {
    std::size_t twin = 0;  ///< index into EnsembleSpec::zetas
    double e_R = 0.5;
};

enum ProbeQuantity : std::size_t {
    kProbeMu = 0,        ///< mu
    kProbeLogEta,        ///< log eta^R - log eta^I
    kProbeErrR,          ///< (mu^R - mu)^2
    kProbeErrI,          ///< (mu^I - mu)^2
    kProbeProjection,    ///< (mu^R - mu^I)^2 + (mu^I - mu)^2 - (mu^R - mu)^2
    kProbeCount
};

using ProbeMoments = std::array<Moments, kProbeCount>;

struct EnsembleSpec {
    SimGrid grid;
    std::vector<double> zetas{0.0};
    std::vector<EconomyConfig> economies;
    bool welfare = true;            ///< discounted integrals (needs rho > 0)
    bool ratio_integrals = false;   ///< int w (eta^R/eta^I - 1) and its mirror, per twin
    bool share_slopes = false;      ///< int w (lambda/e_R - (1-lambda)/e_I), per economy
    bool bench_eta = false;         ///< int w log eta^bench, per economy
    std::vector<std::size_t> probe_steps;
    std::vector<double> eta_weights;  ///< optional weights c_k on log eta^R - log eta^I, length n_steps + 1
    bool record_log_eta = false;      ///< keep per-path log eta^R - log eta^I at every probe
    bool mirrored = false;            ///< negate every Gaussian increment (antithetic ensemble)
    unsigned threads = 1;
};

/// Per-path columns (index = path) and block-merged cross-sections.
struct EnsembleResult {
    std::size_t n_paths = 0;
    double C0 = 0.0;     ///< sum_k w_k (log rho - rho t_k)
    double sum_w = 0.0;  ///< sum_k w_k
    std::vector<double> bench_D;                 ///< sum_k w_k (log rho + log D_k)
    std::vector<double> A_R;                     ///< sum_k w_k log eta^R_k
    std::vector<std::vector<double>> A_I;        ///< per twin
    std::vector<std::vector<double>> A_xi;       ///< per economy, sum_k w_k log xi_k
    std::vector<std::vector<double>> A_bench;    ///< per economy, sum_k w_k log eta^bench_k
    std::vector<std::vector<double>> G;          ///< per economy, share-slope integral
    std::vector<std::vector<double>> S0, S1;     ///< per twin, ratio integrals
    std::vector<double> logR_T;
    std::vector<std::vector<double>> logI_T;      ///< per twin
    std::vector<std::vector<double>> logbench_T;  ///< per economy
    std::vector<std::vector<double>> eta_functional;  ///< per twin
    std::vector<std::vector<ProbeMoments>> probes;    ///< [probe][twin]
    std::vector<std::vector<std::vector<double>>> log_eta_paths;  ///< [probe][twin][path]
    std::size_t clamps = 0;                           ///< Wonham clamp events (two-state model)
};

namespace detail {

struct KahanLane {
    Lane sum = Lane::Zero();
    Lane comp = Lane::Zero();
    void add(const Lane& x) {
        const Lane y = x - comp;
        const Lane t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    }
};

inline std::vector<double> discount_weights(const SimGrid& g, double rho) {
    const std::size_t n = g.n_steps();
    std::vector<double> w(n);
    for (std::size_t k = 0; k < n; ++k) w[k] = std::exp(-rho * g.time(k)) * g.dt;
    return w;
}

}  // namespace detail

/// Mean-reverting drift with Kalman-Bucy filters. Bias twins share mu^I(0)
/// and add the deterministic gap zeta * Delta_unit(t).
class MeanRevertingModel {
public:
    struct Block {
        Lane mu, logD, muR, muI0;
        std::vector<Lane> muI;
    };

    MeanRevertingModel(const ModelParams& p, const SimGrid& g, std::vector<double> zetas)
        : p_(p), curves_(FilterCurves::build(p, g)), zetas_(std::move(zetas)), dt_(g.dt) {
        p_.validate();
        check_stability(p_, g.dt);
    }

    const ModelParams& params() const { return p_; }
    double rho() const { return p_.rho; }
    double sigma_D() const { return p_.sigma_D; }
    double h_D() const { return p_.h_D(); }
    std::size_t twins() const { return zetas_.size(); }
    const FilterCurves& curves() const { return curves_; }

    void init(Block& b, const PathStream& s, std::uint64_t first) const {
        b.muI.assign(zetas_.size(), Lane::Zero());
        for (std::size_t l = 0; l < kLanes; ++l) {
            const auto d = initial_draw(p_, s, first + l);
            b.mu[l] = d.mu;
            b.muR[l] = d.muR;
            b.muI0[l] = d.muI;
        }
        b.logD.setZero();
    }

    void prepare(Block& b, std::size_t k) const {
        for (std::size_t z = 0; z < zetas_.size(); ++z) b.muI[z] = b.muI0 + zetas_[z] * curves_.Delta_unit[k];
    }

    void step(Block& b, std::size_t k, const Lane& dW, const Lane& dB, const Lane& dWmu, const PathStream&,
              std::uint64_t, std::size_t&) const {
        const double dt = dt_;
        const double gR = curves_.gammaR[k];
        const double gI = curves_.gammaI[k];
        const double hD = p_.h_D();
        const double he = p_.h_e();
        b.logD += (b.mu - 0.5 * p_.sigma_D * p_.sigma_D) * dt + p_.sigma_D * dW;
        b.muR += p_.kappa * (p_.mu_bar - b.muR) * dt + gR * p_.hR_sq() * (b.mu - b.muR) * dt + gR * hD * dW;
        b.muI0 += p_.kappa * (p_.mu_bar - b.muI0) * dt + gI * p_.hI_sq() * (b.mu - b.muI0) * dt +
                  gI * (hD * dW + he * dB);
        b.mu += p_.kappa * (p_.mu_bar - b.mu) * dt + p_.sigma_mu * dWmu;
    }

private:
    ModelParams p_;
    FilterCurves curves_;
    std::vector<double> zetas_;
    double dt_;
};

/// Two-state chain with Wonham filters; each bias twin runs its own filter.
class TwoStateModel {
public:
    struct Block {
        Lane mu, logD, muR, high;
        std::vector<Lane> muI;
    };

    TwoStateModel(const TwoStateParams& p, const SimGrid& g, std::vector<double> zetas)
        : p_(p), zetas_(std::move(zetas)), dt_(g.dt) {
        p_.validate();
    }

    double rho() const { return p_.rho; }
    double sigma_D() const { return p_.sigma_D; }
    double h_D() const { return p_.h_D(); }
    std::size_t twins() const { return zetas_.size(); }

    void init(Block& b, const PathStream& s, std::uint64_t first) const {
        b.muI.assign(zetas_.size(), Lane::Constant(p_.muI0));
        b.muR.setConstant(p_.muR0);
        b.logD.setZero();
        for (std::size_t l = 0; l < kLanes; ++l) {
            const bool h = two_state_initial_high(p_, s, first + l);
            b.high[l] = h ? 1.0 : 0.0;
            b.mu[l] = h ? p_.mu_h : p_.mu_l;
        }
    }

    void prepare(Block&, std::size_t) const {}

    void step(Block& b, std::size_t k, const Lane& dW, const Lane& dB, const Lane&, const PathStream& s,
              std::uint64_t first, std::size_t& clamps) const {
        b.logD += (b.mu - 0.5 * p_.sigma_D * p_.sigma_D) * dt_ + p_.sigma_D * dW;
        TwoStateParams q = p_;
        for (std::size_t l = 0; l < kLanes; ++l) {
            const double muR = b.muR[l];
            for (std::size_t z = 0; z < zetas_.size(); ++z) {
                q.zeta = zetas_[z];
                WonhamState w{muR, b.muI[z][l], 0.0, 0};
                w = wonham_step(w, b.mu[l], dW[l], dB[l], dt_, q);
                b.muI[z][l] = w.muI;
                if (z == 0) b.muR[l] = w.muR;
                clamps += w.clamps;
            }
            const bool h = two_state_next(b.high[l] != 0.0, s.uniform(first + l, k), dt_, p_);
            b.high[l] = h ? 1.0 : 0.0;
            b.mu[l] = h ? p_.mu_h : p_.mu_l;
        }
    }

private:
    TwoStateParams p_;
    std::vector<double> zetas_;
    double dt_;
};

namespace detail {

struct BlockOutput {
    std::vector<std::vector<ProbeMoments>> probes;
    std::size_t clamps = 0;
};

template <class Model>
void run_block(const Model& model, const EnsembleSpec& spec, const std::vector<double>& w, std::size_t block,
               EnsembleResult& out, BlockOutput& bo) {
    const SimGrid& g = spec.grid;
    const std::size_t n = g.n_steps();
    const std::size_t nz = model.twins();
    const std::size_t ne = spec.economies.size();
    const std::uint64_t first = static_cast<std::uint64_t>(block) * kLanes;
    const std::size_t valid = std::min<std::size_t>(kLanes, g.n_paths - block * kLanes);
    const PathStream stream(g.seed);
    const double sdt = std::sqrt(g.dt);
    const double dt = g.dt;
    const double hD = model.h_D();
    const double sD = model.sigma_D();
    const double rho = model.rho();
    const double log_rho = spec.welfare ? std::log(rho) : 0.0;

    typename Model::Block b;
    model.init(b, stream, first);

    Lane logR = Lane::Zero();
    std::vector<Lane> logI(nz, Lane::Zero());
    std::vector<Lane> logXi(ne, Lane::Zero());
    KahanLane aD, aR;
    std::vector<KahanLane> aI(nz), aXi(ne), aB(ne), aG(ne), s0(nz), s1(nz);
    std::vector<Lane> fun(nz, Lane::Zero());

    std::vector<double> log_e_R(ne), log_e_I(ne), inv_e_R(ne), inv_e_I(ne);
    for (std::size_t c = 0; c < ne; ++c) {
        const double e = spec.economies[c].e_R;
        log_e_R[c] = std::log(e);
        log_e_I[c] = std::log1p(-e);
        inv_e_R[c] = e > 0.0 ? 1.0 / e : 0.0;
        inv_e_I[c] = e < 1.0 ? 1.0 / (1.0 - e) : 0.0;
    }

    bo.probes.assign(spec.probe_steps.size(), std::vector<ProbeMoments>(nz));
    Lane dW, dB, dWmu, lam, zl;
    GaussianLanes gl;
    std::size_t next_probe = 0;

    for (std::size_t k = 0;; ++k) {
        model.prepare(b, k);

        while (next_probe < spec.probe_steps.size() && spec.probe_steps[next_probe] == k) {
            for (std::size_t z = 0; z < nz; ++z) {
                const Lane eR = (b.muR - b.mu).square();
                const Lane eI = (b.muI[z] - b.mu).square();
                const Lane q = (b.muR - b.muI[z]).square() + eI - eR;
                const Lane le = logR - logI[z];
                auto& pm = bo.probes[next_probe][z];
                pm[kProbeMu] = Moments::of({b.mu.data(), valid});
                pm[kProbeLogEta] = Moments::of({le.data(), valid});
                pm[kProbeErrR] = Moments::of({eR.data(), valid});
                pm[kProbeErrI] = Moments::of({eI.data(), valid});
                pm[kProbeProjection] = Moments::of({q.data(), valid});
                if (spec.record_log_eta)
                    for (std::size_t l = 0; l < valid; ++l) out.log_eta_paths[next_probe][z][first + l] = le[l];
            }
            ++next_probe;
        }
        if (!spec.eta_weights.empty() && spec.eta_weights[k] != 0.0) {
            for (std::size_t z = 0; z < nz; ++z) fun[z] += spec.eta_weights[k] * (logR - logI[z]);
        }
        if (k == n) break;

        stream.gaussians(first, k, gl);
        const double scale = spec.mirrored ? -sdt : sdt;
        dW = scale * gl[Channel::W];
        dB = scale * gl[Channel::B];
        dWmu = scale * gl[Channel::Wmu];

        const double wk = spec.welfare ? w[k] : 0.0;
        if (spec.welfare) {
            aD.add(wk * (log_rho + b.logD));
            aR.add(wk * logR);
            for (std::size_t z = 0; z < nz; ++z) aI[z].add(wk * logI[z]);
        }
        if (spec.ratio_integrals) {
            for (std::size_t z = 0; z < nz; ++z) {
                const Lane y = logR - logI[z];
                s0[z].add(wk * (y.exp() - 1.0));
                s1[z].add(wk * ((-y).exp() - 1.0));
            }
        }

        for (std::size_t c = 0; c < ne; ++c) {
            const std::size_t z = spec.economies[c].twin;
            const double eR = spec.economies[c].e_R;
            const Lane& muI = b.muI[z];
            if (eR == 0.0) {
                lam.setZero();
            } else if (eR == 1.0) {
                lam.setOnes();
            } else {
                zl = (log_e_R[c] - log_e_I[c]) + (logR - logI[z]);
                // 1/(1+exp(-z)) saturates cleanly at both ends.
                lam = 1.0 / (1.0 + (-zl).exp());
            }
            if (spec.welfare) {
                aXi[c].add(wk * logXi[c]);
                if (!spec.bench_eta) {
                } else if (eR == 0.0) {
                    aB[c].add(wk * logI[z]);
                } else if (eR == 1.0) {
                    aB[c].add(wk * logR);
                } else {
                    const Lane a = log_e_R[c] + logR;
                    const Lane d = log_e_I[c] + logI[z];
                    aB[c].add(wk * (a.max(d) + (1.0 + (-zl.abs()).exp()).log()));
                }
                if (spec.share_slopes) aG[c].add(wk * (lam * inv_e_R[c] - (1.0 - lam) * inv_e_I[c]));
            }
            const Lane r = rho + (lam * b.muR + (1.0 - lam) * muI) - sD * sD;
            const Lane phi = sD + hD * (lam * (b.mu - b.muR) + (1.0 - lam) * (b.mu - muI));
            logXi[c] += -(r + 0.5 * phi * phi) * dt - phi * dW;
        }

        for (std::size_t z = 0; z < nz; ++z) {
            const Lane ei = b.muI[z] - b.mu;
            logI[z] += -0.5 * hD * hD * dt * ei * ei + hD * ei * dW;
        }
        const Lane er = b.muR - b.mu;
        logR += -0.5 * hD * hD * dt * er * er + hD * er * dW;

        model.step(b, k, dW, dB, dWmu, stream, first, bo.clamps);
    }

    auto put = [&](std::vector<double>& col, const Lane& v) {
        for (std::size_t l = 0; l < valid; ++l) col[first + l] = v[l];
    };
    if (spec.welfare) {
        put(out.bench_D, aD.sum);
        put(out.A_R, aR.sum);
        for (std::size_t z = 0; z < nz; ++z) put(out.A_I[z], aI[z].sum);
        for (std::size_t c = 0; c < ne; ++c) {
            put(out.A_xi[c], aXi[c].sum);
            if (spec.bench_eta) put(out.A_bench[c], aB[c].sum);
            if (spec.share_slopes) put(out.G[c], aG[c].sum);
        }
    }
    if (spec.ratio_integrals) {
        for (std::size_t z = 0; z < nz; ++z) {
            put(out.S0[z], s0[z].sum);
            put(out.S1[z], s1[z].sum);
        }
    }
    put(out.logR_T, logR);
    for (std::size_t z = 0; z < nz; ++z) {
        put(out.logI_T[z], logI[z]);
        if (!spec.eta_weights.empty()) put(out.eta_functional[z], fun[z]);
    }
    for (std::size_t c = 0; c < ne; ++c) {
        const std::size_t z = spec.economies[c].twin;
        const double eR = spec.economies[c].e_R;
        Lane lb;
        if (eR == 0.0) {
            lb = logI[z];
        } else if (eR == 1.0) {
            lb = logR;
        } else {
            const Lane a = log_e_R[c] + logR;
            const Lane d = log_e_I[c] + logI[z];
            lb = a.max(d) + (1.0 + (-(a - d).abs()).exp()).log();
        }
        put(out.logbench_T[c], lb);
    }
}

}  // namespace detail

/// Simulates the ensemble described by `spec` under `model`.
template <class Model>
EnsembleResult run_ensemble(const Model& model, const EnsembleSpec& spec) {
    const SimGrid& g = spec.grid;
    g.validate();
    const std::size_t n = g.n_steps();
    const std::size_t nz = model.twins();
    const std::size_t ne = spec.economies.size();
    detail::require(nz > 0, "ensemble needs at least one bias twin");
    for (const auto& c : spec.economies) {
        detail::require(c.twin < nz, "economy refers to a missing twin");
        detail::require(c.e_R >= 0.0 && c.e_R <= 1.0, "e_R must lie in [0,1]");
    }
    if (spec.welfare) detail::require(model.rho() > 0.0, "welfare integrals require rho > 0");
    for (std::size_t i = 0; i < spec.probe_steps.size(); ++i) {
        detail::require(spec.probe_steps[i] <= n, "probe step beyond the horizon");
        if (i > 0) detail::require(spec.probe_steps[i] > spec.probe_steps[i - 1], "probe steps must increase");
    }
    detail::require(spec.eta_weights.empty() || spec.eta_weights.size() == n + 1,
                    "eta_weights must have n_steps + 1 entries");

    EnsembleResult out;
    out.n_paths = g.n_paths;
    const std::size_t np = g.n_paths;
    std::vector<double> w;
    if (spec.welfare) {
        w = detail::discount_weights(g, model.rho());
        std::vector<double> c0(n);
        for (std::size_t k = 0; k < n; ++k) c0[k] = w[k] * (std::log(model.rho()) - model.rho() * g.time(k));
        out.C0 = pairwise_sum(c0);
        out.sum_w = pairwise_sum(w);
        out.bench_D.assign(np, 0.0);
        out.A_R.assign(np, 0.0);
        out.A_I.assign(nz, std::vector<double>(np, 0.0));
        out.A_xi.assign(ne, std::vector<double>(np, 0.0));
        if (spec.bench_eta) out.A_bench.assign(ne, std::vector<double>(np, 0.0));
        if (spec.share_slopes) out.G.assign(ne, std::vector<double>(np, 0.0));
    }
    if (spec.ratio_integrals) {
        detail::require(spec.welfare, "ratio integrals are discounted and need welfare mode");
        out.S0.assign(nz, std::vector<double>(np, 0.0));
        out.S1.assign(nz, std::vector<double>(np, 0.0));
    }
    out.logR_T.assign(np, 0.0);
    out.logI_T.assign(nz, std::vector<double>(np, 0.0));
    out.logbench_T.assign(ne, std::vector<double>(np, 0.0));
    if (!spec.eta_weights.empty()) out.eta_functional.assign(nz, std::vector<double>(np, 0.0));
    if (spec.record_log_eta)
        out.log_eta_paths.assign(spec.probe_steps.size(),
                                 std::vector<std::vector<double>>(nz, std::vector<double>(np, 0.0)));

    const std::size_t n_blocks = (np + kLanes - 1) / kLanes;
    std::vector<detail::BlockOutput> bos(n_blocks);
    const unsigned threads = std::max(1u, std::min<unsigned>(spec.threads, static_cast<unsigned>(n_blocks)));
    auto worker = [&](unsigned t) {
        for (std::size_t blk = t; blk < n_blocks; blk += threads) detail::run_block(model, spec, w, blk, out, bos[blk]);
    };
    if (threads == 1) {
        worker(0);
    } else {
        std::vector<std::thread> pool;
        for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker, t);
        for (auto& th : pool) th.join();
    }

    out.probes.assign(spec.probe_steps.size(), std::vector<ProbeMoments>(nz));
    std::vector<Moments> parts(n_blocks);
    for (std::size_t p = 0; p < spec.probe_steps.size(); ++p)
        for (std::size_t z = 0; z < nz; ++z)
            for (std::size_t q = 0; q < kProbeCount; ++q) {
                for (std::size_t blk = 0; blk < n_blocks; ++blk) parts[blk] = bos[blk].probes[p][z][q];
                out.probes[p][z][q] = merge_all(parts);
            }
    for (const auto& bo : bos) out.clamps += bo.clamps;
    return out;
}

}  // namespace hetbel
