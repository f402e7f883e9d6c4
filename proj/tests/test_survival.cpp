#include <gtest/gtest.h>

#include <cmath>

#include <hetbel/survival.hpp>

using namespace hetbel;

TEST(Survival, FrozenThreshold) {
    const ModelParams p;
    const auto s = stationary_stats(p);
    EXPECT_NEAR(s.zeta4, 0.4478729438011243, 1e-13);
    EXPECT_EQ(s.zeta3, -s.zeta4);
    EXPECT_NEAR(zeta4_bisection(p), s.zeta4, 1e-10);
}

TEST(Survival, DriftChangesSignAtThreshold) {
    const ModelParams p;
    const double z4 = stationary_stats(p).zeta4;
    EXPECT_LT(stationary_log_eta_drift(p, 0.0), 0.0);
    EXPECT_GT(stationary_log_eta_drift(p, 1.0), 0.0);
    EXPECT_NEAR(stationary_log_eta_drift(p, z4), 0.0, 1e-15);
    EXPECT_EQ(stationary_log_eta_drift(p, 0.8), stationary_log_eta_drift(p, -0.8));
}

TEST(Survival, StationaryStartMatchesThreshold) {
    ModelParams p;
    p.init = InitMode::Stationary;
    EXPECT_NEAR(critical_zeta_welfare(p).zeta2, stationary_stats(p).zeta4, 1e-8);
}

TEST(Survival, RhoToZero) {
    const auto e = rho_zero_equivalence(ModelParams{}, {0.1, 0.02, 0.004});
    EXPECT_TRUE(e.strictly_decreasing);
    EXPECT_THROW(rho_zero_equivalence(ModelParams{}, {0.02, 0.1}), ModelError);
}

TEST(Survival, RejectsDegenerateShares) {
    ModelParams p;
    p.e_R = 0.0;
    SimGrid g;
    g.T = 1;
    EXPECT_THROW(simulate_consumption_ratio(p, g, {0.0}), ModelError);
}

TEST(Survival, ShortRunSlopesHaveTheRightSign) {
    const ModelParams p;
    SimGrid g;
    g.T = 150;
    g.n_paths = 2048;
    const auto r = simulate_consumption_ratio(p, g, {0.0, 3.0});
    EXPECT_LT(r[0].late_slope.value, 0.0);
    EXPECT_TRUE(r[1].class_R_survives);
    EXPECT_FALSE(r[1].class_I_survives);
    EXPECT_EQ(r[0].times.front(), 0.0);
    EXPECT_EQ(r[0].mean_log_eta.front().value, 0.0);
}
