#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include <hetbel/stats.hpp>

using namespace hetbel;

TEST(Stats, MeanAndStandardError) {
    const std::vector<double> x{1, 2, 3, 4, 5};
    const auto e = mean_se(x);
    EXPECT_DOUBLE_EQ(e.value, 3.0);
    EXPECT_NEAR(e.se, std::sqrt(2.5 / 5.0), 1e-15);
}

TEST(Stats, PairwiseSumIsAccurate) {
    std::vector<double> x(1 << 20, 0.1);
    EXPECT_NEAR(pairwise_sum(x), 0.1 * static_cast<double>(x.size()), 1e-8);
}

TEST(Stats, MergedMomentsMatchDirect) {
    std::vector<double> x;
    for (int i = 0; i < 1000; ++i) x.push_back(std::sin(i * 0.37) * 5 + i * 1e-3);
    std::vector<Moments> parts;
    for (std::size_t i = 0; i < x.size(); i += 64)
        parts.push_back(Moments::of(std::span<const double>(x).subspan(i, std::min<std::size_t>(64, x.size() - i))));
    const auto m = merge_all(parts);
    const auto d = Moments::of(x);
    EXPECT_NEAR(m.mean, d.mean, 1e-13);
    EXPECT_NEAR(m.variance(), d.variance(), 1e-11);
}

TEST(Stats, PairedDifferenceOfIdenticalColumnsIsExactZero) {
    const std::vector<double> a{0.3, -1.2, 4.4};
    const auto d = paired_se(a, a);
    EXPECT_EQ(d.value, 0.0);
    EXPECT_EQ(d.se, 0.0);
}

TEST(Stats, OlsWeightsReproduceSlope) {
    std::vector<double> x, y;
    for (int i = 0; i < 50; ++i) {
        x.push_back(i * 0.5);
        y.push_back(2.0 - 0.75 * i * 0.5 + std::cos(i));
    }
    const auto c = ols_slope_weights(x);
    double s = 0;
    for (std::size_t i = 0; i < x.size(); ++i) s += c[i] * y[i];
    EXPECT_NEAR(s, ols_slope(x, y), 1e-12);
}

TEST(Stats, GaussianKurtosisNearZero) {
    std::vector<double> x;
    for (int i = 1; i <= 20000; ++i) x.push_back(i % 2 ? 1.0 : -1.0);
    EXPECT_NEAR(excess_kurtosis(x), -2.0, 1e-3);
}
