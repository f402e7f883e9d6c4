#pragma once

// Reductions used by every estimator. All sums are pairwise and run in index
// order, so a result depends only on the data, never on how it was produced.

#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <stdexcept>
#include <vector>

namespace hetbel {

/// A Monte Carlo point estimate with its standard error.
struct Estimate {
    double value = 0.0;
    double se = 0.0;

    /// value / se, or +-inf when the estimate is exact and non-zero.
    double z() const {
        if (se > 0.0) return value / se;
        if (value == 0.0) return 0.0;
        return value > 0.0 ? std::numeric_limits<double>::infinity()
                           : -std::numeric_limits<double>::infinity();
    }
};

namespace detail {

template <class F>
double pairwise(std::size_t lo, std::size_t hi, const F& term) {
    const std::size_t n = hi - lo;
    if (n <= 16) {
        double s = 0.0;
        for (std::size_t i = lo; i < hi; ++i) s += term(i);
        return s;
    }
    const std::size_t mid = lo + n / 2;
    return pairwise(lo, mid, term) + pairwise(mid, hi, term);
}

}  // namespace detail

inline double pairwise_sum(std::span<const double> x) {
    return detail::pairwise(0, x.size(), [&](std::size_t i) { return x[i]; });
}

inline double mean(std::span<const double> x) {
    if (x.empty()) throw std::invalid_argument("mean of empty sample");
    return pairwise_sum(x) / static_cast<double>(x.size());
}

/// Sample mean and standard error of the mean (unbiased variance).
inline Estimate mean_se(std::span<const double> x) {
    const double m = mean(x);
    if (x.size() < 2) return {m, 0.0};
    const double ss = detail::pairwise(0, x.size(), [&](std::size_t i) {
        const double d = x[i] - m;
        return d * d;
    });
    const double n = static_cast<double>(x.size());
    return {m, std::sqrt(ss / (n - 1.0) / n)};
}

/// Mean and SE of a linear combination sum_j c_j x_j evaluated per sample.
/// This is the correct error bar for differences of estimates on shared paths.
inline Estimate combo_se(const std::vector<std::span<const double>>& cols,
                         const std::vector<double>& coef) {
    if (cols.empty() || cols.size() != coef.size()) throw std::invalid_argument("combo_se: shape mismatch");
    const std::size_t n = cols.front().size();
    std::vector<double> v(n);
    for (std::size_t i = 0; i < n; ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < cols.size(); ++j) s += coef[j] * cols[j][i];
        v[i] = s;
    }
    return mean_se(v);
}

/// Paired difference a - b.
inline Estimate paired_se(std::span<const double> a, std::span<const double> b) {
    return combo_se({a, b}, {1.0, -1.0});
}

/// Sample excess kurtosis; 0 for a Gaussian.
inline double excess_kurtosis(std::span<const double> x) {
    if (x.size() < 4) return 0.0;
    const double m = mean(x);
    const double m2 = detail::pairwise(0, x.size(), [&](std::size_t i) { return std::pow(x[i] - m, 2); });
    const double m4 = detail::pairwise(0, x.size(), [&](std::size_t i) { return std::pow(x[i] - m, 4); });
    const double n = static_cast<double>(x.size());
    if (m2 == 0.0) return 0.0;
    return n * m4 / (m2 * m2) - 3.0;
}

/// Running (count, mean, M2) that merges in a fixed order.
struct Moments {
    double n = 0.0;
    double mean = 0.0;
    double m2 = 0.0;

    static Moments of(std::span<const double> x) {
        Moments m;
        if (x.empty()) return m;
        m.n = static_cast<double>(x.size());
        m.mean = hetbel::mean(x);
        m.m2 = detail::pairwise(0, x.size(), [&](std::size_t i) {
            const double d = x[i] - m.mean;
            return d * d;
        });
        return m;
    }

    void merge(const Moments& o) {
        if (o.n == 0.0) return;
        if (n == 0.0) {
            *this = o;
            return;
        }
        const double tot = n + o.n;
        const double d = o.mean - mean;
        mean += d * o.n / tot;
        m2 += o.m2 + d * d * n * o.n / tot;
        n = tot;
    }

    double variance() const { return n > 1.0 ? m2 / (n - 1.0) : 0.0; }
    Estimate estimate() const { return {mean, n > 1.0 ? std::sqrt(variance() / n) : 0.0}; }
};

/// Merge a sequence of partial moments pairwise in index order.
inline Moments merge_all(std::span<const Moments> parts) {
    if (parts.empty()) return {};
    if (parts.size() == 1) return parts[0];
    const std::size_t mid = parts.size() / 2;
    Moments a = merge_all(parts.subspan(0, mid));
    a.merge(merge_all(parts.subspan(mid)));
    return a;
}

/// Ordinary least-squares slope of y on x.
inline double ols_slope(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("ols_slope: need two matched points");
    const double mx = mean(x);
    const double my = mean(y);
    const double sxy = detail::pairwise(0, x.size(), [&](std::size_t i) { return (x[i] - mx) * (y[i] - my); });
    const double sxx = detail::pairwise(0, x.size(), [&](std::size_t i) { return (x[i] - mx) * (x[i] - mx); });
    return sxy / sxx;
}

/// Weights c_i with sum_i c_i y_i equal to the OLS slope of y on x.
inline std::vector<double> ols_slope_weights(std::span<const double> x) {
    if (x.size() < 2) throw std::invalid_argument("ols_slope_weights: need two points");
    const double mx = mean(x);
    const double sxx = detail::pairwise(0, x.size(), [&](std::size_t i) { return (x[i] - mx) * (x[i] - mx); });
    std::vector<double> c(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) c[i] = (x[i] - mx) / sxx;
    return c;
}

}  // namespace hetbel
