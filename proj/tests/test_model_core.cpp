#include <gtest/gtest.h>

#include <cmath>

#include <hetbel/diagnostics.hpp>
#include <hetbel/model_core.hpp>

using namespace hetbel;

TEST(ModelCore, ValidationRejectsBadParameters) {
    ModelParams p;
    p.sigma_D = 0.0;
    EXPECT_THROW(p.validate(), ModelError);
    p = {};
    p.e_R = 1.5;
    EXPECT_THROW(p.validate(), ModelError);
    p = {};
    p.kappa = NAN;
    EXPECT_THROW(p.validate(), ModelError);
    SimGrid g;
    g.dt = 0.0;
    EXPECT_THROW(g.validate(), ModelError);
}

TEST(ModelCore, OuMomentsLimits) {
    const ModelParams p;
    const auto [m0, v0] = ou_moments(p, 0.0);
    EXPECT_EQ(m0, p.mu0);
    EXPECT_EQ(v0, 0.0);
    const auto [m, v] = ou_moments(p, 1e4);
    EXPECT_NEAR(m, p.mu_bar, 1e-15);
    EXPECT_NEAR(v, p.sigma_mu * p.sigma_mu / (2 * p.kappa), 1e-18);
}

TEST(ModelCore, TruthMatchesOuMoments) {
    ModelParams p;
    p.mu0 = 0.1;
    SimGrid g;
    g.T = 5.0;
    std::vector<double> end;
    for (std::uint64_t i = 0; i < 4000; ++i) end.push_back(simulate_truth(p, g, i).mu.back());
    const auto e = mean_se(end);
    const auto [m, v] = ou_moments(p, 5.0);
    EXPECT_NEAR(e.value, m, 4.0 * e.se);
    const double var = Moments::of(end).variance();
    EXPECT_NEAR(var, v, 4.0 * v * std::sqrt(2.0 / 4000.0));
}

TEST(ModelCore, Deterministic) {
    const ModelParams p;
    SimGrid g;
    g.T = 3.0;
    const auto a = simulate_truth(p, g, 17);
    const auto b = simulate_truth(p, g, 17);
    EXPECT_EQ(a.mu, b.mu);
    EXPECT_EQ(a.log_D, b.log_D);
}

TEST(ModelCore, StationaryInitialLaw) {
    ModelParams p;
    p.init = InitMode::Stationary;
    const PathStream st(11);
    std::vector<double> mu, err;
    for (std::uint64_t i = 0; i < 20000; ++i) {
        const auto d = initial_draw(p, st, i);
        mu.push_back(d.mu);
        err.push_back((d.muI - d.mu) * (d.muI - d.mu));
    }
    const double v = p.sigma_mu * p.sigma_mu / (2 * p.kappa);
    EXPECT_NEAR(Moments::of(mu).variance(), v, 4.0 * v * std::sqrt(2.0 / 20000.0));
    const auto e = mean_se(err);
    EXPECT_NEAR(e.value, stationary_gamma(p.hI_sq(), p), 4.0 * e.se);
}

TEST(ModelCore, ProjectionIdentityUnbiased) {
    ModelParams p;
    SimGrid g;
    g.T = 5.0;
    g.n_paths = 4096;
    for (const auto& r : projection_identity(p, g, {1.0, 5.0})) EXPECT_LT(std::abs(r.excess().value), 3.0 * r.excess().se);
}

TEST(ModelCore, ProjectionIdentityBiased) {
    ModelParams p;
    p.zeta = 0.5;
    SimGrid g;
    g.T = 5.0;
    g.n_paths = 4096;
    const auto rows = projection_identity(p, g, {5.0});
    EXPECT_LT(std::abs(rows[0].excess().value), 3.0 * rows[0].excess().se);
    EXPECT_GT(rows[0].expected, 0.0);
}

TEST(TwoState, ChainStaysOnStatesAndFlips) {
    TwoStateParams p;
    SimGrid g;
    g.T = 200;
    const auto t = simulate_two_state(p, g, 0);
    std::size_t flips = 0;
    for (std::size_t k = 0; k < t.mu.size(); ++k) {
        ASSERT_TRUE(t.mu[k] == p.mu_h || t.mu[k] == p.mu_l);
        if (k && t.high[k] != t.high[k - 1]) ++flips;
    }
    // Expected flips over 200 time units is about 40.
    EXPECT_GT(flips, 15u);
    EXPECT_LT(flips, 80u);
}

TEST(TwoState, StationaryStartFrequency) {
    auto p = TwoStateParams::realistic();
    p.psi_lh = 0.6;
    const PathStream st(3);
    std::size_t high = 0;
    const std::size_t n = 20000;
    for (std::size_t i = 0; i < n; ++i) high += two_state_initial_high(p, st, i);
    const double f = static_cast<double>(high) / n;
    EXPECT_NEAR(f, p.p_high(), 4.0 * std::sqrt(0.25 / n));
}
