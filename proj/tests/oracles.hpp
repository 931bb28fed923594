#pragma once

// Independent reference computations used by the tests. Everything here uses
// the most direct algebra available (explicit inverses, naive refits, brute
// force search) rather than the library's code paths.

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "ukego/design.hpp"
#include "ukego/kriging.hpp"
#include "ukego/poly_basis.hpp"

namespace oracle {

// --- Legendre via explicit coefficient sums, Gauss-Legendre nodes ----------

/// P_n(x) = 2^-n sum_k C(n,k)^2 (x-1)^(n-k) (x+1)^k
inline double legendre_sum(int n, double x) {
    double s = 0.0;
    for (int k = 0; k <= n; ++k) {
        double c = 1.0;
        for (int i = 1; i <= k; ++i) c = c * (n - k + i) / i;
        s += c * c * std::pow(x - 1.0, n - k) * std::pow(x + 1.0, k);
    }
    return s / std::pow(2.0, n);
}

struct Quadrature {
    std::vector<double> nodes, weights;
};

/// Gauss-Legendre rule by Newton iteration on the three-term recurrence.
inline Quadrature gauss_legendre(int n) {
    Quadrature q;
    for (int i = 1; i <= n; ++i) {
        double x = std::cos(std::numbers::pi * (i - 0.25) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        q.nodes.push_back(x);
        q.weights.push_back(2.0 / ((1.0 - x * x) * dp * dp));
    }
    return q;
}

inline std::size_t binom(std::size_t n, std::size_t k) {
    std::size_t r = 1;
    for (std::size_t i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

// --- Dense Kriging algebra --------------------------------------------------

inline Eigen::MatrixXd corr_dense(const Eigen::MatrixXd& X, const Eigen::VectorXd& theta, double nugget) {
    const Eigen::Index n = X.rows();
    Eigen::MatrixXd R(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) {
            double s = 0.0;
            for (Eigen::Index k = 0; k < X.cols(); ++k) s += theta(k) * std::pow(X(i, k) - X(j, k), 2);
            R(i, j) = std::exp(-s) + (i == j ? nugget : 0.0);
        }
    return R;
}

inline Eigen::VectorXd gls_dense(const Eigen::MatrixXd& F, const Eigen::MatrixXd& R, const Eigen::VectorXd& y) {
    const Eigen::MatrixXd Ri = R.inverse();
    return (F.transpose() * Ri * F).inverse() * (F.transpose() * Ri * y);
}

inline double sigma2_dense(const Eigen::MatrixXd& F, const Eigen::MatrixXd& R, const Eigen::VectorXd& y) {
    const Eigen::VectorXd a = gls_dense(F, R, y);
    const Eigen::VectorXd e = y - F * a;
    return (e.transpose() * R.inverse() * e)(0) / static_cast<double>(y.size());
}

struct DensePrediction {
    double mean_std;
    double mse_std;
};

/// Predictor and MSE on the standardized scale, with explicit inverses.
inline DensePrediction predict_dense(const ukego::KrigingModel& m, const Eigen::VectorXd& x) {
    const auto& d = m.design();
    const Eigen::MatrixXd R = corr_dense(d.points(), m.theta().theta(), m.nugget());
    const Eigen::MatrixXd F = ukego::trend_matrix(m.basis(), d.points());
    const Eigen::VectorXd y = d.responses_std();
    const Eigen::MatrixXd Ri = R.inverse();
    const Eigen::VectorXd a = gls_dense(F, R, y);
    const double s2 = sigma2_dense(F, R, y);
    Eigen::VectorXd r(d.n());
    for (Eigen::Index i = 0; i < d.n(); ++i) {
        double s = 0.0;
        for (Eigen::Index k = 0; k < x.size(); ++k) s += m.theta()(k) * std::pow(d.points()(i, k) - x(k), 2);
        r(i) = std::exp(-s) + (s == 0.0 ? m.nugget() : 0.0);
    }
    const Eigen::VectorXd psi = ukego::eval_basis(m.basis(), x);
    const double mean = psi.dot(a) + r.dot(Ri * (y - F * a));
    const Eigen::VectorXd u = F.transpose() * Ri * r - psi;
    const double mse =
        s2 * (1.0 + m.nugget() - r.dot(Ri * r) + u.dot((F.transpose() * Ri * F).inverse() * u));
    return {mean, mse};
}

/// Ordinary Kriging written out directly (scalar mean, no trend matrix).
inline DensePrediction ordinary_kriging(const ukego::ExperimentalDesign& d, const Eigen::VectorXd& theta,
                                        double nugget, const Eigen::VectorXd& x) {
    const Eigen::Index n = d.n();
    const Eigen::MatrixXd R = corr_dense(d.points(), theta, nugget);
    const Eigen::LLT<Eigen::MatrixXd> llt(R);
    const Eigen::VectorXd one = Eigen::VectorXd::Ones(n);
    const Eigen::VectorXd y = d.responses_std();
    const Eigen::VectorXd Ri1 = llt.solve(one), Riy = llt.solve(y);
    const double mu = one.dot(Riy) / one.dot(Ri1);
    const Eigen::VectorXd res = y - mu * one;
    const double s2 = res.dot(llt.solve(res)) / static_cast<double>(n);
    Eigen::VectorXd r(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        double s = 0.0;
        for (Eigen::Index k = 0; k < x.size(); ++k) s += theta(k) * std::pow(d.points()(i, k) - x(k), 2);
        r(i) = std::exp(-s) + (s == 0.0 ? nugget : 0.0);
    }
    const Eigen::VectorXd Rir = llt.solve(r);
    const double t = 1.0 - one.dot(Rir);
    return {mu + r.dot(llt.solve(res)), s2 * (1.0 + nugget - r.dot(Rir) + t * t / one.dot(Ri1))};
}

/// Leave-one-out residuals by refitting on n-1 points with theta frozen.
inline Eigen::VectorXd naive_loocv_std(const ukego::KrigingModel& m) {
    const auto& d = m.design();
    Eigen::VectorXd e(d.n());
    for (Eigen::Index i = 0; i < d.n(); ++i) {
        const ukego::ExperimentalDesign di = d.without(i);
        const ukego::KrigingModel mi = ukego::fit(di, m.basis(), m.theta(), m.nugget());
        e(i) = d.responses_std()(i) - mi.predict_std(d.points().row(i).transpose());
    }
    return e;
}

// --- Expected improvement by Monte Carlo ------------------------------------

struct McResult {
    double mean;
    double std_error;
};

inline McResult ei_monte_carlo(double f_hat, double s, double y_min, long draws, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> nd(f_hat, s);
    double sum = 0.0, sum2 = 0.0;
    for (long i = 0; i < draws; ++i) {
        const double v = std::max(y_min - nd(rng), 0.0);
        sum += v;
        sum2 += v * v;
    }
    const double mean = sum / draws;
    const double var = std::max(0.0, sum2 / draws - mean * mean);
    return {mean, std::sqrt(var / draws)};
}

// --- Test functions written independently -----------------------------------

/// Branin in its usual (a,b,c,r,s,t) form on the [-5,10]x[0,15] box.
inline double branin_classic(double x1, double x2) {
    const double a = 1.0, b = 5.1 / (4.0 * std::numbers::pi * std::numbers::pi), c = 5.0 / std::numbers::pi;
    const double r = 6.0, s = 10.0, t = 1.0 / (8.0 * std::numbers::pi);
    return a * std::pow(x2 - b * x1 * x1 + c * x1 - r, 2) + s * (1.0 - t) * std::cos(x1) + s;
}

inline double sasena_ref(double x1, double x2) {
    return 2.0 + 0.01 * std::pow(x2 - std::pow(x1, 2), 2) + std::pow(1.0 - x1, 2) +
           2.0 * std::pow(2.0 - x2, 2) + 7.0 * std::sin(0.5 * x1) * std::sin(0.7 * x1 * x2);
}

inline double hosaki_ref(double x1, double x2) {
    const double p = 1.0 - 8.0 * x1 + 7.0 * std::pow(x1, 2) - 7.0 / 3.0 * std::pow(x1, 3) + std::pow(x1, 4) / 4.0;
    return p * std::pow(x2, 2) * std::exp(-x2);
}

inline double hartman6_ref(const std::vector<double>& x) {
    static const Eigen::Vector4d c(1.0, 1.2, 3.0, 3.2);
    Eigen::Matrix<double, 4, 6> A, P;
    A << 10, 3, 17, 3.5, 1.7, 8, 0.05, 10, 17, 0.1, 8, 14, 3, 3.5, 1.7, 10, 17, 8, 17, 8, 0.05, 10, 0.1, 14;
    P << 1312, 1696, 5569, 124, 8283, 5886, 2329, 4135, 8307, 3736, 1004, 9991, 2348, 1451, 3522, 2883, 3047,
        6650, 4047, 8828, 8732, 5743, 1091, 381;
    P *= 1e-4;
    double s = 0.0;
    for (int i = 0; i < 4; ++i) {
        double e = 0.0;
        for (int j = 0; j < 6; ++j) e += A(i, j) * (x[j] - P(i, j)) * (x[j] - P(i, j));
        s += c(i) * std::exp(-e);
    }
    return -s;
}

inline double borehole_ref(const std::vector<double>& v) {
    const double rw = v[0], r = v[1], Tu = v[2], Hu = v[3], Tl = v[4], Hl = v[5], L = v[6], Kw = v[7];
    const double num = 2.0 * std::numbers::pi * Tu * (Hu - Hl);
    const double lnr = std::log(r) - std::log(rw);
    return num / (lnr * (1.0 + 2.0 * L * Tu / (lnr * rw * rw * Kw) + Tu / Tl));
}

// --- Derivative-free minimization -------------------------------------------

using Fn = std::function<double(const std::vector<double>&)>;

/// Compass search inside [lo, hi]; step halves until below tol.
inline std::pair<std::vector<double>, double> compass_minimize(const Fn& f, std::vector<double> x,
                                                               const std::vector<double>& lo,
                                                               const std::vector<double>& hi,
                                                               double step_frac = 0.05, double tol = 1e-10) {
    const std::size_t m = x.size();
    std::vector<double> step(m);
    for (std::size_t j = 0; j < m; ++j) step[j] = step_frac * (hi[j] - lo[j]);
    double fx = f(x);
    for (int iter = 0; iter < 200000; ++iter) {
        bool improved = false;
        for (std::size_t j = 0; j < m; ++j) {
            for (double sgn : {1.0, -1.0}) {
                std::vector<double> y = x;
                y[j] = std::clamp(y[j] + sgn * step[j], lo[j], hi[j]);
                const double fy = f(y);
                if (fy < fx) {
                    x = y;
                    fx = fy;
                    improved = true;
                }
            }
        }
        if (!improved) {
            bool done = true;
            for (std::size_t j = 0; j < m; ++j) {
                step[j] *= 0.5;
                if (step[j] > tol * (hi[j] - lo[j])) done = false;
            }
            if (done) break;
        }
    }
    return {x, fx};
}

/// Dense grid over a 2-D box followed by compass refinement of the best cells.
inline double grid_minimum_2d(const Fn& f, double lo1, double hi1, double lo2, double hi2, int n = 401,
                              int refine = 12, std::vector<std::vector<double>>* minimizers = nullptr) {
    std::vector<std::pair<double, std::vector<double>>> cand;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            std::vector<double> x{lo1 + (hi1 - lo1) * i / (n - 1.0), lo2 + (hi2 - lo2) * j / (n - 1.0)};
            cand.emplace_back(f(x), x);
        }
    std::partial_sort(cand.begin(), cand.begin() + refine, cand.end(),
                      [](const auto& a, const auto& b) { return a.first < b.first; });
    double best = cand.front().first;
    for (int k = 0; k < refine; ++k) {
        auto [x, v] = compass_minimize(f, cand[static_cast<std::size_t>(k)].second, {lo1, lo2}, {hi1, hi2}, 0.005);
        if (minimizers) minimizers->push_back(x);
        best = std::min(best, v);
    }
    return best;
}

/// Multi-start compass search with uniform random starts.
inline double multistart_minimum(const Fn& f, const std::vector<double>& lo, const std::vector<double>& hi,
                                 int starts, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    double best = std::numeric_limits<double>::infinity();
    for (int s = 0; s < starts; ++s) {
        std::vector<double> x(lo.size());
        for (std::size_t j = 0; j < x.size(); ++j) x[j] = lo[j] + u(rng) * (hi[j] - lo[j]);
        best = std::min(best, compass_minimize(f, x, lo, hi, 0.1, 1e-9).second);
    }
    return best;
}

}  // namespace oracle
