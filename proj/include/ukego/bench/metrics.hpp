#pragma once

// Latin hypercube designs, convergence/accuracy metrics and boxplot statistics.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "ukego/design.hpp"
#include "ukego/errors.hpp"

namespace ukego::bench {

/// n x m points in [0,1)^m, one per stratum in every column, jittered uniformly.
inline Eigen::MatrixXd lhs_sample(Eigen::Index n, Eigen::Index m, std::uint64_t seed) {
    if (n < 1 || m < 1) throw PreconditionError("lhs_sample: n and m must be >= 1");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    Eigen::MatrixXd X(n, m);
    std::vector<Eigen::Index> perm(static_cast<std::size_t>(n));
    for (Eigen::Index j = 0; j < m; ++j) {
        std::iota(perm.begin(), perm.end(), Eigen::Index{0});
        // Fisher-Yates with an explicit draw so the permutation does not depend
        // on the standard library's shuffle.
        for (std::size_t i = perm.size(); i > 1; --i) {
            const auto k = static_cast<std::size_t>(u(rng) * static_cast<double>(i));
            std::swap(perm[i - 1], perm[std::min(k, i - 1)]);
        }
        for (Eigen::Index i = 0; i < n; ++i) {
            const double v = (static_cast<double>(perm[static_cast<std::size_t>(i)]) + u(rng)) /
                             static_cast<double>(n);
            X(i, j) = std::min(v, std::nextafter(1.0, 0.0));
        }
    }
    return X;
}

/// Relative distance of the best value to the known optimum.
inline double improvement(double best, double optimum) {
    if (optimum == 0.0) throw PreconditionError("improvement: optimum must be non-zero");
    return std::abs(optimum - best) / std::abs(optimum);
}

/// RMSE of predict(u) against truth(u) on n_v uniform points of [-1,1]^m.
template <typename Predict, typename Truth>
double validation_rmse(Predict&& predict, Truth&& truth, Eigen::Index m, Eigen::Index n_v,
                       std::uint64_t seed) {
    if (n_v < 1) throw PreconditionError("validation_rmse: n_v must be >= 1");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    Eigen::VectorXd x(m);
    double ss = 0.0;
    for (Eigen::Index i = 0; i < n_v; ++i) {
        for (Eigen::Index k = 0; k < m; ++k) x(k) = u(rng);
        const double e = truth(x) - predict(x);
        ss += e * e;
    }
    return std::sqrt(ss / static_cast<double>(n_v));
}

/// Linear-interpolation quantile of sorted data (position (n-1) q).
inline double quantile_sorted(const std::vector<double>& s, double q) {
    if (s.empty()) throw PreconditionError("quantile of empty data");
    const double pos = q * static_cast<double>(s.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, s.size() - 1);
    return s[lo] + (pos - static_cast<double>(lo)) * (s[hi] - s[lo]);
}

struct BoxplotStats {
    double q1 = 0, median = 0, q3 = 0;
    double whisker_low = 0, whisker_high = 0;
    std::vector<double> outliers;
    double mean = 0;
    std::size_t count = 0;
};

/// Quartiles, whiskers at the most extreme data inside Q1/Q3 -/+ 1.5 IQR,
/// outliers beyond, plus the mean.
inline BoxplotStats boxplot_stats(std::vector<double> values) {
    if (values.empty()) throw PreconditionError("boxplot_stats: empty input");
    std::sort(values.begin(), values.end());
    BoxplotStats b;
    b.count = values.size();
    b.q1 = quantile_sorted(values, 0.25);
    b.median = quantile_sorted(values, 0.5);
    b.q3 = quantile_sorted(values, 0.75);
    const double iqr = b.q3 - b.q1;
    const double lo_fence = b.q1 - 1.5 * iqr, hi_fence = b.q3 + 1.5 * iqr;
    b.whisker_low = b.q1;
    b.whisker_high = b.q3;
    for (double v : values) {
        if (v < lo_fence || v > hi_fence) {
            b.outliers.push_back(v);
            continue;
        }
        b.whisker_low = std::min(b.whisker_low, v);
        b.whisker_high = std::max(b.whisker_high, v);
    }
    b.mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
    return b;
}

}  // namespace ukego::bench
