#include <gtest/gtest.h>

#include <cmath>

#include <hetbel/diagnostics.hpp>
#include <hetbel/equilibrium.hpp>

using namespace hetbel;

TEST(Equilibrium, ShareLimitsAndSaturation) {
    EXPECT_EQ(consumption_share(0.0, 3.0, -2.0), 0.0);
    EXPECT_EQ(consumption_share(1.0, 3.0, -2.0), 1.0);
    EXPECT_DOUBLE_EQ(consumption_share(0.5, 0.0, 0.0), 0.5);
    EXPECT_EQ(consumption_share(0.5, 1000.0, 0.0), 1.0);
    EXPECT_EQ(consumption_share(0.5, -1000.0, 0.0), 0.0);
    EXPECT_NEAR(consumption_share(0.25, std::log(3.0), 0.0), 0.5, 1e-15);
}

TEST(Equilibrium, BenchmarkLogEta) {
    EXPECT_EQ(benchmark_log_eta(0.0, 1.0, 2.0), 2.0);
    EXPECT_EQ(benchmark_log_eta(1.0, 1.0, 2.0), 1.0);
    EXPECT_NEAR(benchmark_log_eta(0.3, std::log(2.0), std::log(5.0)), std::log(0.3 * 2 + 0.7 * 5), 1e-15);
    EXPECT_NEAR(benchmark_log_eta(0.5, 800.0, 800.0), 800.0, 1e-12);
}

TEST(Equilibrium, PriceDividendRatio) {
    ModelParams p;
    EXPECT_DOUBLE_EQ(price(2.0, p), 100.0);
    p.rho = 0.0;
    EXPECT_THROW(price(1.0, p), ModelError);
}

TEST(Equilibrium, RiskPricesAtBoundaries) {
    const ModelParams p;
    const auto q = rates_and_prices_of_risk(1.0, 0.03, 0.05, 0.04, p);
    EXPECT_DOUBLE_EQ(q.phiR, p.sigma_D);
    EXPECT_DOUBLE_EQ(q.phi, p.sigma_D + p.h_D() * (0.04 - 0.03));
}

TEST(Equilibrium, MarketClearsAndSpdIdentity) {
    ModelParams p;
    p.zeta = 1.0;
    SimGrid g;
    g.T = 30;
    for (double e : {0.0, 0.4, 1.0}) {
        p.e_R = e;
        auto b = simulate_truth(p, g, 21);
        run_filters(p, g, b);
        const auto eq = solve_equilibrium(b, p);
        for (std::size_t k = 0; k < b.size(); k += 101) {
            ASSERT_NEAR(eq.cR[k] + eq.cI[k], std::exp(b.log_D[k]), 1e-12 * std::exp(b.log_D[k]));
            // xi = e^{-rho t} eta^bench / D (with D0 = 1)
            const double lb = benchmark_log_eta(e, eq.log_etaR[k], eq.log_etaI[k]);
            if (e == 0.0 || e == 1.0) ASSERT_NEAR(eq.log_xi[k], -p.rho * g.time(k) + lb - b.log_D[k], 1e-9);
        }
    }
}

TEST(Equilibrium, DensitiesAreMartingales) {
    ModelParams p;
    SimGrid g;
    g.T = 50;
    g.n_paths = 4096;
    const auto m = martingale_check(p, g);
    for (const auto& e : {m.eta_R, m.eta_I, m.eta_bench}) EXPECT_NEAR(e.value, 1.0, 4.0 * e.se);
}
