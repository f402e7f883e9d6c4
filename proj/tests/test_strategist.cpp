#include <gtest/gtest.h>

#include <cmath>

#include <hetbel/strategist.hpp>

using namespace hetbel;

namespace {

SimGrid small() {
    SimGrid g;
    g.T = 40;
    g.n_paths = 512;
    return g;
}

}  // namespace

TEST(Participation, CurveShape) {
    const ParticipationCurve c{0.3, 0.1};
    EXPECT_DOUBLE_EQ(c.e_R(0.0), 0.7);
    EXPECT_EQ(c.e_R(2.0), c.e_R(-2.0));
    EXPECT_NEAR(c.e_R(100.0), 1.0, 1e-15);
    EXPECT_THROW((ParticipationCurve{0.0, 0.1}.validate()), ModelError);
    EXPECT_THROW((ParticipationCurve{0.5, -1.0}.validate()), ModelError);
    EXPECT_EQ(ParticipationCurve::presets().size(), 6u);
}

TEST(Participation, SymmetricGrid) {
    const auto g = default_zeta_grid();
    ASSERT_EQ(g.size(), 41u);
    EXPECT_EQ(g[20], 0.0);
    for (std::size_t i = 0; i < g.size(); ++i) EXPECT_NEAR(g[i], -g[g.size() - 1 - i], 1e-15);
}

TEST(Strategist, DeterministicAndDominatesBenchmark) {
    const ModelParams p;
    const ParticipationCurve c{0.5, 0.1};
    const auto grid = symmetric_grid(5, 2.0);
    const auto a = best_manipulation(p, c, grid, small());
    const auto b = best_manipulation(p, c, grid, small());
    EXPECT_EQ(a.best_zeta, b.best_zeta);
    EXPECT_EQ(a.best_role, b.best_role);
    EXPECT_EQ(a.best_utility.value, b.best_utility.value);
    for (const auto& row : a.surface) {
        const double top = std::max({row.U_R, row.U_I, row.U_bench});
        EXPECT_GE(top, row.U_bench);
        EXPECT_LE(row.U_bench, a.best_utility.value + 3.0 * a.best_utility.se);
    }
}

TEST(Strategist, SurfaceIsEvenInZeta) {
    const ModelParams p;
    const ParticipationCurve c{0.5, 0.1};
    const auto o = best_manipulation(p, c, symmetric_grid(5, 2.0), small());
    for (std::size_t i = 0; i < o.surface.size(); ++i) {
        const auto& a = o.surface[i];
        const auto& b = o.surface[o.surface.size() - 1 - i];
        EXPECT_LT(std::abs(a.U_I - b.U_I), 3.0 * std::hypot(a.se_I, b.se_I));
        EXPECT_LT(std::abs(a.U_R - b.U_R), 3.0 * std::hypot(a.se_R, b.se_R));
    }
}

TEST(Strategist, NobodyListensMeansNoManipulation) {
    const ModelParams p;
    const ParticipationCurve c{1e-9, 0.1};
    const auto o = best_manipulation(p, c, symmetric_grid(5, 2.0), small());
    EXPECT_EQ(o.best_zeta, 0.0);
    EXPECT_LT(std::abs(o.gain_vs_honest.value), 3.0 * o.gain_vs_honest.se + 1e-6);
}

TEST(Strategist, EvaluateRolesUsesCurve) {
    const ModelParams p;
    const ParticipationCurve c{0.3, 0.1};
    const auto r = evaluate_roles(p, c, 0.0, small());
    EXPECT_DOUBLE_EQ(r.e_R, 0.7);
    EXPECT_TRUE(std::isfinite(r.U_I.value));
}
