#pragma once

// Experimental design: sample locations normalized to [-1,1]^m and
// standardized responses.

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "ukego/errors.hpp"

namespace ukego {

struct Bounds {
    double lower = -1.0;
    double upper = 1.0;
};

using BoxBounds = std::vector<Bounds>;

inline void validate_bounds(const BoxBounds& bounds) {
    for (const auto& b : bounds)
        if (!(std::isfinite(b.lower) && std::isfinite(b.upper) && b.lower < b.upper))
            throw PreconditionError("bounds must be finite with lower < upper");
}

inline Eigen::VectorXd normalize_point(std::span<const double> raw, const BoxBounds& bounds) {
    if (raw.size() != bounds.size()) throw PreconditionError("normalize_point: dimension mismatch");
    Eigen::VectorXd u(static_cast<Eigen::Index>(raw.size()));
    for (std::size_t j = 0; j < raw.size(); ++j) {
        const auto& b = bounds[j];
        const double tol = 1e-12 * std::max(1.0, std::abs(b.upper - b.lower));
        if (raw[j] < b.lower - tol || raw[j] > b.upper + tol)
            throw DomainError("normalize_point: coordinate outside bounds");
        const double v = 2.0 * (raw[j] - b.lower) / (b.upper - b.lower) - 1.0;
        u(static_cast<Eigen::Index>(j)) = std::clamp(v, -1.0, 1.0);
    }
    return u;
}

inline Eigen::VectorXd denormalize_point(std::span<const double> u, const BoxBounds& bounds) {
    if (u.size() != bounds.size()) throw PreconditionError("denormalize_point: dimension mismatch");
    Eigen::VectorXd raw(static_cast<Eigen::Index>(u.size()));
    for (std::size_t j = 0; j < u.size(); ++j) {
        if (u[j] < -1.0 - 1e-12 || u[j] > 1.0 + 1e-12)
            throw DomainError("denormalize_point: coordinate outside [-1,1]");
        const auto& b = bounds[j];
        const double v = b.lower + 0.5 * (std::clamp(u[j], -1.0, 1.0) + 1.0) * (b.upper - b.lower);
        raw(static_cast<Eigen::Index>(j)) = v;
    }
    return raw;
}

inline Eigen::VectorXd normalize_point(const Eigen::VectorXd& raw, const BoxBounds& bounds) {
    return normalize_point(std::span<const double>(raw.data(), static_cast<std::size_t>(raw.size())), bounds);
}
inline Eigen::VectorXd denormalize_point(const Eigen::VectorXd& u, const BoxBounds& bounds) {
    return denormalize_point(std::span<const double>(u.data(), static_cast<std::size_t>(u.size())), bounds);
}

struct Standardized {
    Eigen::VectorXd values;
    double mean = 0.0;
    double std = 1.0;
};

/// Zero mean, unit population standard deviation.
inline Standardized standardize_outputs(const Eigen::VectorXd& y) {
    if (y.size() < 2) throw PreconditionError("standardize_outputs: need at least 2 responses");
    const double mean = y.mean();
    const double var = (y.array() - mean).square().mean();
    const double sd = std::sqrt(var);
    if (!(sd > 1e-300) || !std::isfinite(sd))
        throw DegenerateResponseError("standardize_outputs: responses have zero variance");
    return {(y.array() - mean) / sd, mean, sd};
}

class ExperimentalDesign {
public:
    ExperimentalDesign() = default;

    /// Points must already be normalized to [-1,1]^m.
    ExperimentalDesign(Eigen::MatrixXd points, Eigen::VectorXd responses_raw, BoxBounds raw_bounds)
        : points_(std::move(points)), raw_(std::move(responses_raw)), bounds_(std::move(raw_bounds)) {
        check_points();
        auto s = standardize_outputs(raw_);
        std_ = std::move(s.values);
        mean_ = s.mean;
        sd_ = s.std;
    }

    /// Uses caller-provided scaling instead of the sample statistics. Lets
    /// degenerate (constant) responses through for low-level testing.
    static ExperimentalDesign with_scaling(Eigen::MatrixXd points, Eigen::VectorXd responses_raw,
                                           BoxBounds raw_bounds, double mean, double sd) {
        if (!(sd > 0.0)) throw PreconditionError("with_scaling: sd must be positive");
        ExperimentalDesign d;
        d.points_ = std::move(points);
        d.raw_ = std::move(responses_raw);
        d.bounds_ = std::move(raw_bounds);
        d.check_points();
        d.mean_ = mean;
        d.sd_ = sd;
        d.std_ = (d.raw_.array() - mean) / sd;
        return d;
    }

    /// Convenience: unit box bounds [-1,1]^m.
    static BoxBounds unit_bounds(std::size_t m) { return BoxBounds(m, Bounds{-1.0, 1.0}); }

    Eigen::Index n() const { return points_.rows(); }
    Eigen::Index m() const { return points_.cols(); }
    const Eigen::MatrixXd& points() const { return points_; }
    const Eigen::VectorXd& responses_raw() const { return raw_; }
    const Eigen::VectorXd& responses_std() const { return std_; }
    const BoxBounds& raw_bounds() const { return bounds_; }
    double mean_y() const { return mean_; }
    double std_y() const { return sd_; }

    /// Design with row i removed, keeping this design's scaling.
    ExperimentalDesign without(Eigen::Index i) const {
        Eigen::MatrixXd p(n() - 1, m());
        Eigen::VectorXd y(n() - 1);
        for (Eigen::Index r = 0, k = 0; r < n(); ++r) {
            if (r == i) continue;
            p.row(k) = points_.row(r);
            y(k) = raw_(r);
            ++k;
        }
        return with_scaling(std::move(p), std::move(y), bounds_, mean_, sd_);
    }

    /// Design with one extra sample appended (re-standardized).
    ExperimentalDesign with_sample(const Eigen::VectorXd& u, double y) const {
        Eigen::MatrixXd p(n() + 1, m());
        p.topRows(n()) = points_;
        p.row(n()) = u.transpose();
        Eigen::VectorXd yy(n() + 1);
        yy.head(n()) = raw_;
        yy(n()) = y;
        return ExperimentalDesign(std::move(p), std::move(yy), bounds_);
    }

    double min_pairwise_distance() const {
        double best = std::numeric_limits<double>::infinity();
        for (Eigen::Index i = 0; i < n(); ++i)
            for (Eigen::Index j = i + 1; j < n(); ++j)
                best = std::min(best, (points_.row(i) - points_.row(j)).norm());
        return best;
    }

private:
    void check_points() const {
        if (points_.rows() != raw_.size())
            throw PreconditionError("design: points/responses size mismatch");
        if (points_.rows() < 1) throw PreconditionError("design: empty");
        if (!bounds_.empty() && static_cast<Eigen::Index>(bounds_.size()) != points_.cols())
            throw PreconditionError("design: bounds dimension mismatch");
        if ((points_.array() < -1.0 - 1e-12).any() || (points_.array() > 1.0 + 1e-12).any())
            throw DomainError("design: normalized coordinates outside [-1,1]");
        if (!raw_.allFinite()) throw PreconditionError("design: non-finite response");
        if (points_.rows() >= 2 && !(min_pairwise_distance() > 0.0))
            throw PreconditionError("design: duplicate sample points");
    }

    Eigen::MatrixXd points_;
    Eigen::VectorXd raw_;
    Eigen::VectorXd std_;
    BoxBounds bounds_;
    double mean_ = 0.0;
    double sd_ = 1.0;
};

}  // namespace ukego
