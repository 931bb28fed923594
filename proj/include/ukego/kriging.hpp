#pragma once

// Universal Kriging with a Gaussian correlation kernel.
//
// All algebra runs on standardized responses; raw units appear only in the
// public predict/predict_mse/loocv results.

#include <cmath>
#include <limits>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "ukego/design.hpp"
#include "ukego/errors.hpp"
#include "ukego/poly_basis.hpp"

namespace ukego {

inline constexpr double kLogThetaMin = -3.0;
inline constexpr double kLogThetaMax = 3.0;
inline constexpr double kNuggetStart = 1e-12;
inline constexpr double kNuggetMax = 1e-6;
inline constexpr double kSigma2Floor = 1e-30;

/// Positive correlation length-scale parameters, theta_k in [1e-3, 1e3].
class Hyperparameters {
public:
    Hyperparameters() = default;
    explicit Hyperparameters(Eigen::VectorXd theta) : theta_(std::move(theta)) {
        for (Eigen::Index k = 0; k < theta_.size(); ++k) {
            const double t = theta_(k);
            if (!(t >= 1e-3 * (1 - 1e-12) && t <= 1e3 * (1 + 1e-12)))
                throw DomainError("Hyperparameters: theta outside [1e-3, 1e3]");
        }
    }
    static Hyperparameters from_log10(const Eigen::VectorXd& log_theta) {
        Eigen::VectorXd t(log_theta.size());
        for (Eigen::Index k = 0; k < t.size(); ++k)
            t(k) = std::pow(10.0, std::clamp(log_theta(k), kLogThetaMin, kLogThetaMax));
        return Hyperparameters(std::move(t));
    }
    static Hyperparameters uniform(Eigen::Index m, double value) {
        return Hyperparameters(Eigen::VectorXd::Constant(m, value));
    }

    const Eigen::VectorXd& theta() const { return theta_; }
    Eigen::VectorXd log10() const { return theta_.array().log10(); }
    Eigen::Index size() const { return theta_.size(); }
    double operator()(Eigen::Index k) const { return theta_(k); }

private:
    Eigen::VectorXd theta_;
};

/// exp(-sum_k theta_k |x1_k - x2_k|^2)
template <typename A, typename B>
double gauss_corr(const Eigen::MatrixBase<A>& x1, const Eigen::MatrixBase<B>& x2,
                  const Eigen::VectorXd& theta) {
    if (x1.size() != x2.size() || x1.size() != theta.size())
        throw PreconditionError("gauss_corr: dimension mismatch");
    double s = 0.0;
    for (Eigen::Index k = 0; k < theta.size(); ++k) {
        const double d = x1(k) - x2(k);
        s += theta(k) * d * d;
    }
    return std::exp(-s);
}

inline double gauss_corr(std::span<const double> x1, std::span<const double> x2,
                         const Hyperparameters& theta) {
    using Map = Eigen::Map<const Eigen::VectorXd>;
    return gauss_corr(Map(x1.data(), static_cast<Eigen::Index>(x1.size())),
                      Map(x2.data(), static_cast<Eigen::Index>(x2.size())), theta.theta());
}

/// Cholesky factor of R + nugget * I.
struct CorrelationFactor {
    Eigen::MatrixXd R;  // including nugget on the diagonal
    Eigen::LLT<Eigen::MatrixXd> llt;
    double nugget = 0.0;
    double log_det = 0.0;

    Eigen::Index n() const { return R.rows(); }
    /// L^{-1} v
    template <typename D>
    Eigen::MatrixXd whiten(const Eigen::MatrixBase<D>& v) const {
        return llt.matrixL().solve(v);
    }
    /// L^{-T} v
    template <typename D>
    Eigen::MatrixXd unwhiten(const Eigen::MatrixBase<D>& v) const {
        return llt.matrixU().solve(v);
    }
    template <typename D>
    Eigen::MatrixXd solve(const Eigen::MatrixBase<D>& v) const {
        return llt.solve(v);
    }
};

namespace detail {

/// Squared coordinate differences, one n x n matrix per dimension.
inline std::vector<Eigen::MatrixXd> pairwise_sq_diffs(const Eigen::MatrixXd& points) {
    const Eigen::Index n = points.rows();
    std::vector<Eigen::MatrixXd> out(static_cast<std::size_t>(points.cols()));
    for (Eigen::Index k = 0; k < points.cols(); ++k) {
        Eigen::MatrixXd& D = out[static_cast<std::size_t>(k)];
        D.resize(n, n);
        for (Eigen::Index j = 0; j < n; ++j)
            for (Eigen::Index i = 0; i < n; ++i) {
                const double d = points(i, k) - points(j, k);
                D(i, j) = d * d;
            }
    }
    return out;
}

inline bool try_factorize(const Eigen::MatrixXd& base, double nugget, CorrelationFactor& out) {
    out.R = base;
    out.R.diagonal().array() += nugget;
    out.llt.compute(out.R);
    if (out.llt.info() != Eigen::Success) return false;
    const auto& L = out.llt.matrixLLT();
    double ld = 0.0;
    for (Eigen::Index i = 0; i < L.rows(); ++i) {
        const double d = L(i, i);
        if (!(d > 0.0) || !std::isfinite(d)) return false;
        ld += 2.0 * std::log(d);
    }
    out.nugget = nugget;
    out.log_det = ld;
    return true;
}

/// Nugget schedule: the requested value, then x10 steps up to kNuggetMax.
inline CorrelationFactor factorize_with_nugget(const Eigen::MatrixXd& base, double nugget) {
    if (!(nugget >= 0.0)) throw PreconditionError("nugget must be >= 0");
    CorrelationFactor f;
    double nu = nugget;
    for (;;) {
        if (try_factorize(base, nu, f)) return f;
        const double next = nu > 0.0 ? nu * 10.0 : kNuggetStart;
        if (next > kNuggetMax * (1.0 + 1e-9))
            throw IllConditionedError("correlation matrix not positive definite", nu);
        nu = std::max(next, kNuggetStart);
    }
}

}  // namespace detail

/// R_ij = corr(x_i, x_j) + nugget * delta_ij, factorized with nugget escalation.
inline CorrelationFactor build_corr_matrix(const Eigen::MatrixXd& points,
                                           const Hyperparameters& theta,
                                           double nugget = kNuggetStart) {
    if (theta.size() != points.cols()) throw PreconditionError("build_corr_matrix: theta size");
    const Eigen::Index n = points.rows();
    Eigen::MatrixXd base(n, n);
    for (Eigen::Index j = 0; j < n; ++j) {
        base(j, j) = 1.0;
        for (Eigen::Index i = j + 1; i < n; ++i) {
            const double r = gauss_corr(points.row(i), points.row(j), theta.theta());
            base(i, j) = r;
            base(j, i) = r;
        }
    }
    return detail::factorize_with_nugget(base, nugget);
}

/// GLS pieces in whitened space: Ft = L^{-1} F and its pivoted QR.
struct TrendSolve {
    Eigen::MatrixXd Ft;
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr;
    Eigen::VectorXd alpha;
    Eigen::VectorXd resid_white;  // L^{-1}(y - F alpha)
};

inline constexpr double kTrendRankThreshold = 1e-10;

inline TrendSolve solve_trend(const Eigen::MatrixXd& F, const CorrelationFactor& factor,
                              const Eigen::VectorXd& y) {
    if (F.rows() != factor.n() || y.size() != factor.n())
        throw PreconditionError("solve_trend: size mismatch");
    if (F.cols() > F.rows()) throw SingularTrendError("trend has more terms than samples");
    TrendSolve ts;
    ts.Ft = factor.whiten(F);
    ts.qr.setThreshold(kTrendRankThreshold);
    ts.qr.compute(ts.Ft);
    if (ts.qr.rank() < F.cols()) throw SingularTrendError("F^T R^-1 F is singular");
    const Eigen::VectorXd yt = factor.whiten(y);
    ts.alpha = ts.qr.solve(yt);
    ts.resid_white = yt - ts.Ft * ts.alpha;
    return ts;
}

/// alpha = (F^T R^-1 F)^-1 F^T R^-1 y via triangular solves.
inline Eigen::VectorXd gls_coefficients(const Eigen::MatrixXd& F, const CorrelationFactor& factor,
                                        const Eigen::VectorXd& y) {
    return solve_trend(F, factor, y).alpha;
}

/// (1/n)(y - F alpha)^T R^-1 (y - F alpha)
inline double sigma2_hat(const Eigen::MatrixXd& F, const CorrelationFactor& factor,
                         const Eigen::VectorXd& y, const Eigen::VectorXd& alpha) {
    const Eigen::VectorXd rt = factor.whiten(y - F * alpha);
    return rt.squaredNorm() / static_cast<double>(y.size());
}

class KrigingModel;

/// A design + trend basis with theta-independent quantities cached, so that
/// the likelihood can be evaluated cheaply for many theta values.
class KrigingProblem {
public:
    KrigingProblem(ExperimentalDesign design, BasisSpec basis)
        : design_(std::move(design)), basis_(std::move(basis)) {
        validate_index_set(basis_.index_set);
        if (static_cast<Eigen::Index>(basis_.dim()) != design_.m())
            throw PreconditionError("basis dimension does not match design");
        F_ = trend_matrix(basis_, design_.points());
        sq_diffs_ = detail::pairwise_sq_diffs(design_.points());
    }

    const ExperimentalDesign& design() const { return design_; }
    const BasisSpec& basis() const { return basis_; }
    const Eigen::MatrixXd& trend() const { return F_; }
    Eigen::Index dim() const { return design_.m(); }

    Eigen::MatrixXd correlation(const Eigen::VectorXd& theta) const {
        const Eigen::Index n = design_.n();
        Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(n, n);
        for (Eigen::Index k = 0; k < theta.size(); ++k)
            acc.noalias() -= theta(k) * sq_diffs_[static_cast<std::size_t>(k)];
        return acc.array().exp().matrix();
    }

    CorrelationFactor factorize(const Hyperparameters& theta, double nugget = kNuggetStart) const {
        if (theta.size() != dim()) throw PreconditionError("theta dimension mismatch");
        return detail::factorize_with_nugget(correlation(theta.theta()), nugget);
    }

    /// -n ln(sigma2_hat) - ln|R|; -infinity when the model cannot be built.
    double log_likelihood(const Eigen::VectorXd& theta) const {
        constexpr double kFail = -std::numeric_limits<double>::infinity();
        if (!theta.allFinite() || (theta.array() <= 0.0).any()) return kFail;
        CorrelationFactor f;
        try {
            f = detail::factorize_with_nugget(correlation(theta), kNuggetStart);
        } catch (const IllConditionedError&) {
            return kFail;
        }
        try {
            const TrendSolve ts = solve_trend(F_, f, design_.responses_std());
            const double s2 = ts.resid_white.squaredNorm() / static_cast<double>(design_.n());
            if (!(s2 > kSigma2Floor) || !std::isfinite(s2)) return kFail;
            const double ll = -static_cast<double>(design_.n()) * std::log(s2) - f.log_det;
            return std::isfinite(ll) ? ll : kFail;
        } catch (const SingularTrendError&) {
            return kFail;
        }
    }

    double log_likelihood_log10(const Eigen::VectorXd& log_theta) const {
        return log_likelihood((log_theta.array() * std::log(10.0)).exp().matrix());
    }

    KrigingModel fit(const Hyperparameters& theta, double nugget = kNuggetStart) const;

private:
    ExperimentalDesign design_;
    BasisSpec basis_;
    Eigen::MatrixXd F_;
    std::vector<Eigen::MatrixXd> sq_diffs_;
};

/// Concentrated log-likelihood of a design/basis at theta.
inline double concentrated_log_likelihood(const Hyperparameters& theta,
                                          const ExperimentalDesign& design,
                                          const BasisSpec& basis) {
    return KrigingProblem(design, basis).log_likelihood(theta.theta());
}

/// A fitted, immutable universal Kriging surrogate.
class KrigingModel {
public:
    const ExperimentalDesign& design() const { return design_; }
    const BasisSpec& basis() const { return basis_; }
    const Hyperparameters& theta() const { return theta_; }
    const Eigen::VectorXd& alpha() const { return alpha_; }
    double sigma2() const { return sigma2_; }
    double nugget() const { return factor_.nugget; }
    const CorrelationFactor& factor() const { return factor_; }
    const Eigen::MatrixXd& trend() const { return F_; }
    /// True when the residual process variance vanished (saturated trend).
    bool degenerate() const { return degenerate_; }
    Eigen::Index n() const { return design_.n(); }
    Eigen::Index num_terms() const { return F_.cols(); }

    /// Correlation vector between x and the design; exact coincidences carry the nugget.
    Eigen::VectorXd correlation_vector(const Eigen::VectorXd& x) const {
        const Eigen::MatrixXd& X = design_.points();
        Eigen::VectorXd r(X.rows());
        for (Eigen::Index i = 0; i < X.rows(); ++i) {
            double s = 0.0;
            for (Eigen::Index k = 0; k < X.cols(); ++k) {
                const double d = X(i, k) - x(k);
                s += theta_(k) * d * d;
            }
            r(i) = s == 0.0 ? 1.0 + factor_.nugget : std::exp(-s);
        }
        return r;
    }

    /// Prediction on the standardized scale.
    double predict_std(const Eigen::VectorXd& x) const {
        check_dim(x);
        return eval_basis(basis_, x).dot(alpha_) + correlation_vector(x).dot(weights_);
    }

    double predict(const Eigen::VectorXd& x) const {
        return design_.mean_y() + design_.std_y() * predict_std(x);
    }

    /// Mean-squared error on the standardized scale before clamping.
    double predict_mse_std_unclamped(const Eigen::VectorXd& x) const {
        check_dim(x);
        const Eigen::VectorXd r = correlation_vector(x);
        return mse_from(r, eval_basis(basis_, x));
    }

    double predict_mse(const Eigen::VectorXd& x) const {
        return std::max(0.0, predict_mse_std_unclamped(x)) * design_.std_y() * design_.std_y();
    }

    struct Prediction {
        double mean;
        double mse;
    };

    /// Raw-unit mean and clamped MSE sharing one correlation vector.
    Prediction predict_full(const Eigen::VectorXd& x) const {
        check_dim(x);
        const Eigen::VectorXd r = correlation_vector(x);
        const Eigen::VectorXd psi = eval_basis(basis_, x);
        const double mean_std = psi.dot(alpha_) + r.dot(weights_);
        const double sd = design_.std_y();
        return {design_.mean_y() + sd * mean_std, std::max(0.0, mse_from(r, psi)) * sd * sd};
    }

    bool has_loocv() const { return loo_errors_.has_value(); }

    /// Leave-one-out residuals y_i - yhat_{-i}(x_i), standardized scale, theta frozen.
    const Eigen::VectorXd& loocv_errors_std() const {
        if (!loo_errors_) throw PreconditionError("LOOCV undefined: need n >= 3 and P < n - 1");
        return *loo_errors_;
    }

    double loocv_rmse_std() const { return std::sqrt(loocv_errors_std().squaredNorm() / n()); }

    /// Leave-one-out RMSE in raw units.
    double loocv_rmse() const { return design_.std_y() * loocv_rmse_std(); }

private:
    friend class KrigingProblem;
    KrigingModel() = default;

    void check_dim(const Eigen::VectorXd& x) const {
        if (x.size() != design_.m()) throw PreconditionError("point dimension mismatch");
    }

    double mse_from(const Eigen::VectorXd& r, const Eigen::VectorXd& psi) const {
        const Eigen::VectorXd rt = factor_.whiten(r);
        const Eigen::VectorXd u = trend_.Ft.transpose() * rt - psi;
        // (F^T R^-1 F)^-1 = Pi G^-1 G^-T Pi^T with Ft Pi = Q G
        const Eigen::Index P = F_.cols();
        Eigen::VectorXd v = trend_.qr.colsPermutation().transpose() * u;
        const auto G = trend_.qr.matrixR().topLeftCorner(P, P).template triangularView<Eigen::Upper>();
        G.transpose().solveInPlace(v);
        return sigma2_ * (1.0 + factor_.nugget - rt.squaredNorm() + v.squaredNorm());
    }

    void compute_loocv() {
        const Eigen::Index nn = n(), P = F_.cols();
        if (nn < 3 || P >= nn - 1) return;
        const Eigen::MatrixXd Linv =
            factor_.llt.matrixL().solve(Eigen::MatrixXd::Identity(nn, nn));
        const Eigen::MatrixXd Q1 =
            trend_.qr.householderQ() * Eigen::MatrixXd::Identity(nn, P);
        const Eigen::MatrixXd B = Linv.transpose() * Q1;
        // diag of R^-1 - R^-1 F (F^T R^-1 F)^-1 F^T R^-1
        const Eigen::VectorXd a = Linv.colwise().squaredNorm().transpose() -
                                  B.rowwise().squaredNorm();
        loo_errors_ = weights_.array() / a.array();
    }

    ExperimentalDesign design_;
    BasisSpec basis_;
    Hyperparameters theta_;
    CorrelationFactor factor_;
    Eigen::MatrixXd F_;
    TrendSolve trend_;
    Eigen::VectorXd alpha_;
    Eigen::VectorXd weights_;  // R^-1 (y - F alpha)
    double sigma2_ = 0.0;
    bool degenerate_ = false;
    std::optional<Eigen::VectorXd> loo_errors_;
};

inline KrigingModel KrigingProblem::fit(const Hyperparameters& theta, double nugget) const {
    if (static_cast<Eigen::Index>(basis_.size()) > design_.n())
        throw PreconditionError("trend has more terms than samples");
    KrigingModel m;
    m.design_ = design_;
    m.basis_ = basis_;
    m.theta_ = theta;
    m.factor_ = factorize(theta, nugget);
    m.F_ = F_;
    m.trend_ = solve_trend(F_, m.factor_, design_.responses_std());
    m.alpha_ = m.trend_.alpha;
    m.weights_ = m.factor_.unwhiten(m.trend_.resid_white);
    m.sigma2_ = m.trend_.resid_white.squaredNorm() / static_cast<double>(design_.n());
    m.degenerate_ = !(m.sigma2_ > kSigma2Floor);
    m.compute_loocv();
    return m;
}

inline KrigingModel fit(const ExperimentalDesign& design, const BasisSpec& basis,
                        const Hyperparameters& theta, double nugget = kNuggetStart) {
    return KrigingProblem(design, basis).fit(theta, nugget);
}

/// Constant-trend basis; a UK with this basis is ordinary Kriging.
inline BasisSpec constant_basis(std::size_t m) {
    return BasisSpec{PolyFamily::Legendre, constant_index_set(m)};
}

inline double loocv_rmse(const KrigingModel& model) { return model.loocv_rmse(); }

}  // namespace ukego
