#pragma once

// One-dimensional monic/Legendre polynomials, multi-index truncation schemes
// and multivariate basis evaluation.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <set>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "ukego/errors.hpp"

namespace ukego {

enum class PolyFamily { Monic, Legendre };

enum class IndexScheme { TensorProduct, TotalOrder, Hyperbolic, TwoFactor };

inline const char* to_string(IndexScheme s) {
    switch (s) {
        case IndexScheme::TensorProduct: return "tensor";
        case IndexScheme::TotalOrder: return "total-order";
        case IndexScheme::Hyperbolic: return "hyperbolic";
        case IndexScheme::TwoFactor: return "two-factor";
    }
    return "?";
}

/// Legendre polynomial normalized so that P_p(1) = 1.
inline double legendre_eval(int order, double x) {
    if (order < 0) throw PreconditionError("legendre_eval: negative order");
    if (!(x >= -1.0 && x <= 1.0))
        throw DomainError("legendre_eval: x outside [-1,1]");
    const double x2 = x * x;
    switch (order) {
        case 0: return 1.0;
        case 1: return x;
        case 2: return 0.5 * (3.0 * x2 - 1.0);
        case 3: return 0.5 * (5.0 * x2 - 3.0) * x;
        case 4: return 0.125 * ((35.0 * x2 - 30.0) * x2 + 3.0);
        case 5: return 0.125 * ((63.0 * x2 - 70.0) * x2 + 15.0) * x;
        default: break;
    }
    // Bonnet: (k+1) P_{k+1} = (2k+1) x P_k - k P_{k-1}
    double prev = 0.125 * ((35.0 * x2 - 30.0) * x2 + 3.0);
    double cur = 0.125 * ((63.0 * x2 - 70.0) * x2 + 15.0) * x;
    for (int k = 5; k < order; ++k) {
        const double next = ((2.0 * k + 1.0) * x * cur - k * prev) / (k + 1.0);
        prev = cur;
        cur = next;
    }
    return cur;
}

inline double monic_eval(int order, double x) {
    if (order < 0) throw PreconditionError("monic_eval: negative order");
    double r = 1.0;
    for (int k = 0; k < order; ++k) r *= x;
    return r;
}

inline double poly_eval(PolyFamily family, int order, double x) {
    return family == PolyFamily::Legendre ? legendre_eval(order, x)
                                          : monic_eval(order, x);
}

/// Degree tuple (zeta_1, ..., zeta_m).
struct MultiIndex {
    std::vector<int> degrees;

    std::size_t dim() const { return degrees.size(); }
    int total_degree() const {
        return std::accumulate(degrees.begin(), degrees.end(), 0);
    }
    int max_degree() const {
        return degrees.empty() ? 0 : *std::max_element(degrees.begin(), degrees.end());
    }
    int active_factors() const {
        return static_cast<int>(
            std::count_if(degrees.begin(), degrees.end(), [](int d) { return d > 0; }));
    }
    bool is_constant() const { return max_degree() == 0; }

    friend bool operator==(const MultiIndex&, const MultiIndex&) = default;
    friend auto operator<=>(const MultiIndex&, const MultiIndex&) = default;
};

inline std::string to_string(const MultiIndex& a) {
    std::string s = "(";
    for (std::size_t j = 0; j < a.degrees.size(); ++j) {
        if (j) s += ',';
        s += std::to_string(a.degrees[j]);
    }
    return s + ")";
}

/// Graded ordering: lower total degree first; within a degree the
/// lexicographically larger tuple comes first, so (1,0) precedes (0,1).
inline bool graded_less(const MultiIndex& a, const MultiIndex& b) {
    const int ta = a.total_degree(), tb = b.total_degree();
    if (ta != tb) return ta < tb;
    return b.degrees < a.degrees;
}

struct MultiIndexSet {
    std::vector<MultiIndex> indices;
    IndexScheme scheme = IndexScheme::TotalOrder;
    int order = 0;
    double nu = 1.0;

    std::size_t size() const { return indices.size(); }
    std::size_t dim() const { return indices.empty() ? 0 : indices.front().dim(); }
    const MultiIndex& operator[](std::size_t k) const { return indices[k]; }
};

namespace detail {

inline void enumerate_box(std::size_t m, int p, std::vector<int>& cur, std::size_t j,
                          std::vector<MultiIndex>& out) {
    if (j == m) {
        out.push_back(MultiIndex{cur});
        return;
    }
    for (int d = 0; d <= p; ++d) {
        cur[j] = d;
        enumerate_box(m, p, cur, j + 1, out);
    }
}

inline double hyperbolic_norm(const MultiIndex& a, double nu) {
    double s = 0.0;
    for (int d : a.degrees)
        if (d > 0) s += std::pow(static_cast<double>(d), nu);
    return std::pow(s, 1.0 / nu);
}

}  // namespace detail

/// Builds a truncated multi-index set; the constant index is always first.
///
/// TwoFactor keeps indices with at most two active factors and every degree
/// at most p. For p = 2 that is constant + linear + quadratic effects + the
/// four linear/quadratic products per factor pair (2m^2 + 1 terms).
inline MultiIndexSet generate_index_set(std::size_t m, int p, IndexScheme scheme,
                                        double nu = 1.0) {
    if (m < 1) throw PreconditionError("generate_index_set: m must be >= 1");
    if (p < 0) throw PreconditionError("generate_index_set: p must be >= 0");
    if (scheme == IndexScheme::Hyperbolic && !(nu > 0.0 && nu <= 1.0))
        throw PreconditionError("generate_index_set: nu must lie in (0,1]");
    if (scheme == IndexScheme::TwoFactor && p < 2)
        throw PreconditionError("generate_index_set: two-factor scheme needs p >= 2");

    std::vector<MultiIndex> all;
    std::vector<int> cur(m, 0);
    detail::enumerate_box(m, p, cur, 0, all);

    MultiIndexSet set;
    set.scheme = scheme;
    set.order = p;
    set.nu = nu;
    for (auto& a : all) {
        bool keep = false;
        switch (scheme) {
            case IndexScheme::TensorProduct: keep = true; break;
            case IndexScheme::TotalOrder: keep = a.total_degree() <= p; break;
            case IndexScheme::Hyperbolic:
                keep = detail::hyperbolic_norm(a, nu) <= p + 1e-12;
                break;
            case IndexScheme::TwoFactor: keep = a.active_factors() <= 2; break;
        }
        if (keep) set.indices.push_back(std::move(a));
    }
    std::sort(set.indices.begin(), set.indices.end(), graded_less);
    return set;
}

/// Index set holding only the constant term (ordinary Kriging trend).
inline MultiIndexSet constant_index_set(std::size_t m) {
    MultiIndexSet set;
    set.order = 0;
    set.indices.push_back(MultiIndex{std::vector<int>(m, 0)});
    return set;
}

/// Throws unless the set has the constant term once at position 0 and no duplicates.
inline void validate_index_set(const MultiIndexSet& set) {
    if (set.indices.empty() || !set.indices.front().is_constant())
        throw PreconditionError("index set must start with the constant term");
    const std::size_t m = set.indices.front().dim();
    std::set<MultiIndex> seen;
    for (const auto& a : set.indices) {
        if (a.dim() != m) throw PreconditionError("index set: inconsistent dimension");
        for (int d : a.degrees)
            if (d < 0) throw PreconditionError("index set: negative degree");
        if (!seen.insert(a).second) throw PreconditionError("index set: duplicate index");
    }
}

struct BasisSpec {
    PolyFamily family = PolyFamily::Legendre;
    MultiIndexSet index_set;

    std::size_t size() const { return index_set.size(); }
    std::size_t dim() const { return index_set.dim(); }
};

/// Evaluates every basis term at one point.
inline Eigen::VectorXd eval_basis(const BasisSpec& spec, std::span<const double> x) {
    const std::size_t m = spec.dim();
    if (x.size() != m) throw PreconditionError("eval_basis: dimension mismatch");
    int max_deg = 0;
    for (const auto& a : spec.index_set.indices) max_deg = std::max(max_deg, a.max_degree());

    // table(j, d) = poly_d(x_j)
    Eigen::MatrixXd table(static_cast<Eigen::Index>(m), max_deg + 1);
    for (std::size_t j = 0; j < m; ++j)
        for (int d = 0; d <= max_deg; ++d)
            table(static_cast<Eigen::Index>(j), d) = poly_eval(spec.family, d, x[j]);

    Eigen::VectorXd out(static_cast<Eigen::Index>(spec.size()));
    for (std::size_t k = 0; k < spec.size(); ++k) {
        double v = 1.0;
        const auto& deg = spec.index_set[k].degrees;
        for (std::size_t j = 0; j < m; ++j)
            if (deg[j] > 0) v *= table(static_cast<Eigen::Index>(j), deg[j]);
        out(static_cast<Eigen::Index>(k)) = v;
    }
    return out;
}

inline Eigen::VectorXd eval_basis(const BasisSpec& spec, const Eigen::VectorXd& x) {
    return eval_basis(spec, std::span<const double>(x.data(), static_cast<std::size_t>(x.size())));
}

/// n x P trend matrix; row i is the basis evaluated at design row i.
inline Eigen::MatrixXd trend_matrix(const BasisSpec& spec, const Eigen::MatrixXd& points) {
    Eigen::MatrixXd F(points.rows(), static_cast<Eigen::Index>(spec.size()));
    Eigen::VectorXd row(points.cols());
    for (Eigen::Index i = 0; i < points.rows(); ++i) {
        row = points.row(i).transpose();
        F.row(i) = eval_basis(spec, row).transpose();
    }
    return F;
}

// ---------------------------------------------------------------------------
// Blind-Kriging encoding of factors scaled to [1,3].

struct BkEncoded {
    Eigen::VectorXd linear;
    Eigen::VectorXd quadratic;
};

inline BkEncoded bk_encode(std::span<const double> x_scaled) {
    static const double kLin = std::sqrt(3.0) / std::sqrt(2.0);
    static const double kQuad = 1.0 / std::sqrt(2.0);
    BkEncoded e{Eigen::VectorXd(static_cast<Eigen::Index>(x_scaled.size())),
                Eigen::VectorXd(static_cast<Eigen::Index>(x_scaled.size()))};
    for (std::size_t j = 0; j < x_scaled.size(); ++j) {
        const double v = x_scaled[j];
        if (!(v >= 1.0 && v <= 3.0)) throw DomainError("bk_encode: coordinate outside [1,3]");
        const double c = v - 2.0;
        e.linear(static_cast<Eigen::Index>(j)) = kLin * c;
        e.quadratic(static_cast<Eigen::Index>(j)) = kQuad * (3.0 * c * c - 2.0);
    }
    return e;
}

/// Maps a [-1,1]-normalized coordinate onto the [1,3] blind-Kriging scale.
inline double to_bk_scale(double u) { return u + 2.0; }

/// Encoded one-factor effect of the given degree at a [-1,1] coordinate.
/// Degrees 1 and 2 are the linear/quadratic contrasts; higher degrees reuse
/// the contrast of matching parity applied to u^d.
inline double bk_effect(int degree, double u) {
    static const double kLin = std::sqrt(3.0) / std::sqrt(2.0);
    static const double kQuad = 1.0 / std::sqrt(2.0);
    if (degree == 0) return 1.0;
    const double ud = monic_eval(degree, u);
    return (degree % 2 == 1) ? kLin * ud : kQuad * (3.0 * ud - 2.0);
}

/// Encoded candidate column for one multi-index over a [-1,1] design.
inline Eigen::VectorXd bk_candidate_column(const MultiIndex& a, const Eigen::MatrixXd& points) {
    Eigen::VectorXd col = Eigen::VectorXd::Ones(points.rows());
    for (std::size_t j = 0; j < a.dim(); ++j) {
        if (a.degrees[j] == 0) continue;
        for (Eigen::Index i = 0; i < points.rows(); ++i)
            col(i) *= bk_effect(a.degrees[j], points(i, static_cast<Eigen::Index>(j)));
    }
    return col;
}

}  // namespace ukego
