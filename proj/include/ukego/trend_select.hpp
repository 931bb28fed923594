#pragma once

// Automatic trend selection for universal Kriging: Bayesian forward selection
// (blind Kriging), LARS-ordered polynomial-chaos Kriging, coefficient-magnitude
// ranking, and fixed total-order trends. Each scan refits a tuned UK model per
// prefix and keeps the prefix with the lowest leave-one-out error.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "ukego/design.hpp"
#include "ukego/errors.hpp"
#include "ukego/hyperopt.hpp"
#include "ukego/kriging.hpp"
#include "ukego/poly_basis.hpp"
#include "ukego/seeding.hpp"

namespace ukego {

/// Scan of one candidate dictionary of order p.
struct PScan {
    int p = 0;
    std::vector<MultiIndex> ordered_terms;  // non-constant terms, selection order
    std::vector<double> loocv_per_step;     // entry k: constant + first k terms
    std::size_t chosen_prefix_length = 0;
    bool early_stopped = false;
};

struct SelectionTrace {
    std::vector<MultiIndex> ordered_terms;
    std::vector<double> loocv_per_step;
    std::size_t chosen_prefix_length = 0;
    int p_chosen = 0;
    std::vector<PScan> scans;
    bool fell_back_to_ok = false;
};

struct SurrogateResult {
    KrigingModel model;
    SelectionTrace trace;
};

/// Index of the minimum; ties resolve to the earliest entry.
inline std::size_t argmin_first(const std::vector<double>& v) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < v.size(); ++i)
        if (v[i] < v[best]) best = i;
    return best;
}

/// True once the sequence has risen strictly three times in a row at its tail.
inline bool increased_thrice(const std::vector<double>& v) {
    if (v.size() < 4) return false;
    const std::size_t n = v.size();
    return v[n - 1] > v[n - 2] && v[n - 2] > v[n - 3] && v[n - 3] > v[n - 4];
}

// ---------------------------------------------------------------------------
// Blind Kriging posterior.

struct BkFactors {
    Eigen::VectorXd k_linear;
    Eigen::VectorXd k_quadratic;
};

/// Per-dimension prior variance ratios of linear/quadratic effects. The
/// [-1,1] -> [1,3] map has unit slope, so theta carries over unchanged.
inline BkFactors bk_k_factors(const Hyperparameters& theta) {
    BkFactors f{Eigen::VectorXd(theta.size()), Eigen::VectorXd(theta.size())};
    for (Eigen::Index j = 0; j < theta.size(); ++j) {
        const double r1 = std::exp(-theta(j) * 1.0);
        const double r2 = std::exp(-theta(j) * 4.0);
        const double den = 3.0 + 4.0 * r1 + 2.0 * r2;
        f.k_linear(j) = (3.0 - 3.0 * r2) / den;
        f.k_quadratic(j) = (3.0 - 4.0 * r1 + r2) / den;
    }
    return f;
}

/// Prior weight of a candidate: product over factors of the per-degree ratio.
/// Degrees above two continue the linear-to-quadratic decay geometrically.
inline double bk_prior_weight(const MultiIndex& a, const BkFactors& f) {
    double w = 1.0;
    for (std::size_t j = 0; j < a.dim(); ++j) {
        const int d = a.degrees[j];
        const auto jj = static_cast<Eigen::Index>(j);
        const double kl = f.k_linear(jj), kq = f.k_quadratic(jj);
        if (d == 1) w *= kl;
        else if (d == 2) w *= kq;
        else if (d >= 3) w *= kl > 0.0 ? kq * std::pow(kq / kl, d - 2) : 0.0;
    }
    return w;
}

struct BkPosterior {
    Eigen::VectorXd beta_hat;
    Eigen::VectorXd K_diag;
    Eigen::VectorXd beta_var;  // diagonal of var(beta_hat); reported, not used for ranking
    double tau2_over_sigma2 = 1.0;
};

/// Posterior mean of candidate coefficients given the current fitted trend.
inline BkPosterior bk_posterior_beta(const KrigingModel& current,
                                     const std::vector<MultiIndex>& candidates,
                                     double tau2_over_sigma2 = 1.0) {
    const Eigen::MatrixXd& X = current.design().points();
    const Eigen::Index t = static_cast<Eigen::Index>(candidates.size());
    const BkFactors f = bk_k_factors(current.theta());
    BkPosterior post;
    post.tau2_over_sigma2 = tau2_over_sigma2;
    post.beta_hat.resize(t);
    post.K_diag.resize(t);
    post.beta_var.resize(t);
    // R^-1 (y - M alpha) on the standardized scale.
    const Eigen::VectorXd resid = current.design().responses_std() - current.trend() * current.alpha();
    const Eigen::VectorXd w = current.factor().solve(resid);
    const double tau2 = tau2_over_sigma2 * current.sigma2();
    for (Eigen::Index c = 0; c < t; ++c) {
        const Eigen::VectorXd col = bk_candidate_column(candidates[static_cast<std::size_t>(c)], X);
        const double k = bk_prior_weight(candidates[static_cast<std::size_t>(c)], f);
        post.K_diag(c) = k;
        post.beta_hat(c) = tau2_over_sigma2 * k * col.dot(w);
        const Eigen::VectorXd ct = current.factor().whiten(col);
        post.beta_var(c) = tau2 * (k - tau2_over_sigma2 * k * k * ct.squaredNorm());
    }
    return post;
}

// ---------------------------------------------------------------------------
// Least-angle regression.

struct LarsResult {
    std::vector<std::size_t> order;    // candidate column indices, entry order
    std::vector<std::size_t> dropped;  // zero-variance or collinear columns
    Eigen::VectorXd coefficients;      // final coefficients on the standardized columns
};

/// Classic LARS (no lasso modification) on centered, unit-norm columns.
/// Stops after min(P, n-1, max_steps) entries or when no correlation is left.
inline LarsResult lars_select(const Eigen::MatrixXd& candidates, const Eigen::VectorXd& y,
                              std::size_t max_steps = std::numeric_limits<std::size_t>::max()) {
    const Eigen::Index n = candidates.rows(), P = candidates.cols();
    if (y.size() != n) throw PreconditionError("lars_select: size mismatch");
    LarsResult res;
    res.coefficients = Eigen::VectorXd::Zero(P);
    if (P == 0 || n < 2) return res;

    Eigen::MatrixXd X = candidates.rowwise() - candidates.colwise().mean();
    std::vector<bool> usable(static_cast<std::size_t>(P), true);
    const double scale = std::max(1.0, candidates.cwiseAbs().maxCoeff());
    for (Eigen::Index j = 0; j < P; ++j) {
        const double nrm = X.col(j).norm();
        if (!(nrm > 1e-10 * scale * std::sqrt(static_cast<double>(n)))) {
            usable[static_cast<std::size_t>(j)] = false;
            res.dropped.push_back(static_cast<std::size_t>(j));
            X.col(j).setZero();
        } else {
            X.col(j) /= nrm;
        }
    }
    const Eigen::VectorXd yc = y.array() - y.mean();
    const double ynorm = yc.norm();
    if (!(ynorm > 0.0)) return res;
    const double ctol = 1e-12 * ynorm;

    const std::size_t n_usable = static_cast<std::size_t>(std::count(usable.begin(), usable.end(), true));
    const std::size_t limit = std::min({n_usable, static_cast<std::size_t>(n - 1), max_steps});

    std::vector<bool> active(static_cast<std::size_t>(P), false);
    std::vector<Eigen::Index> A;
    Eigen::VectorXd mu = Eigen::VectorXd::Zero(n);
    Eigen::VectorXd beta = Eigen::VectorXd::Zero(P);

    auto inactive = [&](Eigen::Index j) {
        return usable[static_cast<std::size_t>(j)] && !active[static_cast<std::size_t>(j)];
    };

    // First entry: most correlated column.
    {
        const Eigen::VectorXd c = X.transpose() * yc;
        Eigen::Index best = -1;
        for (Eigen::Index j = 0; j < P; ++j)
            if (inactive(j) && (best < 0 || std::abs(c(j)) > std::abs(c(best)))) best = j;
        if (best < 0 || std::abs(c(best)) <= ctol || limit == 0) return res;
        A.push_back(best);
        active[static_cast<std::size_t>(best)] = true;
        res.order.push_back(static_cast<std::size_t>(best));
    }

    while (true) {
        const Eigen::VectorXd resid = yc - mu;
        const Eigen::VectorXd c = X.transpose() * resid;
        double C = 0.0;
        for (Eigen::Index j : A) C = std::max(C, std::abs(c(j)));
        if (C <= ctol) break;

        const Eigen::Index k = static_cast<Eigen::Index>(A.size());
        Eigen::MatrixXd XA(n, k);
        Eigen::VectorXd s(k);
        for (Eigen::Index i = 0; i < k; ++i) {
            s(i) = c(A[static_cast<std::size_t>(i)]) >= 0.0 ? 1.0 : -1.0;
            XA.col(i) = s(i) * X.col(A[static_cast<std::size_t>(i)]);
        }
        const Eigen::MatrixXd G = XA.transpose() * XA;
        Eigen::LLT<Eigen::MatrixXd> llt(G);
        bool singular = llt.info() != Eigen::Success;
        if (!singular) {
            const auto& L = llt.matrixLLT();
            for (Eigen::Index i = 0; i < k; ++i)
                if (!(L(i, i) > 1e-7)) singular = true;
        }
        if (singular) {
            // Latest entrant is (numerically) collinear with the active set.
            const Eigen::Index last = A.back();
            A.pop_back();
            res.order.pop_back();
            usable[static_cast<std::size_t>(last)] = false;
            res.dropped.push_back(static_cast<std::size_t>(last));
            if (A.empty()) break;
            continue;
        }
        const Eigen::VectorXd Ginv1 = llt.solve(Eigen::VectorXd::Ones(k));
        const double AA = 1.0 / std::sqrt(Ginv1.sum());
        const Eigen::VectorXd wA = AA * Ginv1;
        const Eigen::VectorXd u = XA * wA;
        const Eigen::VectorXd a = X.transpose() * u;

        double gamma = C / AA;  // full least-squares step on the active set
        Eigen::Index next = -1;
        if (res.order.size() < limit) {
            for (Eigen::Index j = 0; j < P; ++j) {
                if (!inactive(j)) continue;
                for (double cand : {(C - c(j)) / (AA - a(j)), (C + c(j)) / (AA + a(j))}) {
                    if (std::isfinite(cand) && cand > 1e-14 && cand < gamma - 1e-15) {
                        gamma = cand;
                        next = j;
                    }
                }
            }
        }
        mu += gamma * u;
        for (Eigen::Index i = 0; i < k; ++i) beta(A[static_cast<std::size_t>(i)]) += gamma * wA(i) * s(i);
        if (next < 0 || res.order.size() >= limit) break;
        A.push_back(next);
        active[static_cast<std::size_t>(next)] = true;
        res.order.push_back(static_cast<std::size_t>(next));
    }
    res.coefficients = beta;
    return res;
}

// ---------------------------------------------------------------------------
// Prefix scans.

namespace detail {

inline constexpr std::uint64_t kOkStepTag = 0x4F4B;

inline BasisSpec basis_from(PolyFamily family, const std::vector<MultiIndex>& terms, int order) {
    BasisSpec b;
    b.family = family;
    b.index_set.order = order;
    b.index_set.indices = terms;
    return b;
}

struct StepFit {
    std::optional<KrigingModel> model;
    double loocv = std::numeric_limits<double>::infinity();
};

inline StepFit fit_step(const ExperimentalDesign& design, const BasisSpec& basis, TuneState& state,
                        const TuneStrategy& strategy, std::uint64_t seed, bool first) {
    StepFit out;
    try {
        KrigingProblem problem(design, basis);
        const TuneResult tr = tune(state, problem, strategy, seed, first, false);
        out.model = problem.fit(tr.theta);
        out.loocv = out.model->has_loocv() ? out.model->loocv_rmse_std()
                                           : std::numeric_limits<double>::infinity();
        if (!std::isfinite(out.loocv)) out.loocv = std::numeric_limits<double>::infinity();
    } catch (const SingularTrendError&) {
        out.model.reset();
    } catch (const IllConditionedError&) {
        out.model.reset();
    }
    return out;
}

/// Shared ordinary-Kriging step; identical for every p of one build.
struct OkStep {
    KrigingModel model;
    double loocv;
    Eigen::VectorXd log_theta;
};

inline OkStep fit_ok_step(const ExperimentalDesign& design, PolyFamily family,
                          const TuneStrategy& strategy, std::uint64_t seed) {
    TuneState state;
    const BasisSpec basis{family, constant_index_set(static_cast<std::size_t>(design.m()))};
    StepFit s = fit_step(design, basis, state, strategy, derive_seed(seed, kOkStepTag), true);
    if (!s.model) throw IllConditionedError("ordinary Kriging step could not be fitted", kNuggetMax);
    return {std::move(*s.model), s.loocv, s.model->theta().log10()};
}

/// Chooses the next dictionary entry given the current model, or nothing.
using NextTermFn = std::function<std::optional<std::size_t>(const KrigingModel&,
                                                           const std::vector<bool>& used)>;

struct ScanOutput {
    PScan scan;
    KrigingModel best_model;
    Eigen::VectorXd best_log_theta;
    double best_loocv;
};

/// Forward prefix scan: refit + LOOCV per step, stop after three strict
/// LOOCV increases in a row, keep the lowest-LOOCV prefix.
inline ScanOutput run_scan(const ExperimentalDesign& design, PolyFamily family, int p,
                           const std::vector<MultiIndex>& dictionary, const OkStep& ok,
                           const NextTermFn& next_term, const TuneStrategy& strategy,
                           std::uint64_t seed, bool use_early_stop = true) {
    const std::size_t m = static_cast<std::size_t>(design.m());
    const Eigen::Index n = design.n();
    std::vector<MultiIndex> terms{MultiIndex{std::vector<int>(m, 0)}};
    std::vector<bool> used(dictionary.size(), false);

    TuneState state;
    state.last_optimum_log_theta = ok.log_theta;
    state.iteration_counter = 1;

    ScanOutput out{PScan{}, ok.model, ok.log_theta, ok.loocv};
    out.scan.p = p;
    out.scan.loocv_per_step.push_back(ok.loocv);
    const KrigingModel* current = &ok.model;
    std::optional<KrigingModel> holder;

    std::uint64_t step = 0;
    while (true) {
        // LOOCV needs P <= n - 2.
        if (static_cast<Eigen::Index>(terms.size()) + 1 > n - 2) break;
        std::optional<std::size_t> pick = next_term(*current, used);
        if (!pick) break;
        used[*pick] = true;
        std::vector<MultiIndex> trial = terms;
        trial.push_back(dictionary[*pick]);
        ++step;
        const BasisSpec basis = basis_from(family, trial, p);
        const Eigen::VectorXd warm = state.last_optimum_log_theta ? *state.last_optimum_log_theta
                                                                  : ok.log_theta;
        StepFit s = fit_step(design, basis, state, strategy, derive_seed(seed, p, step), false);
        if (!s.model) {
            // Singular trend with this term: skip it.
            state.last_optimum_log_theta = warm;
            continue;
        }
        terms = std::move(trial);
        out.scan.ordered_terms.push_back(dictionary[*pick]);
        out.scan.loocv_per_step.push_back(s.loocv);
        holder = std::move(s.model);
        current = &*holder;
        if (s.loocv < out.best_loocv) {
            out.best_loocv = s.loocv;
            out.best_model = *holder;
            out.best_log_theta = holder->theta().log10();
        }
        if (use_early_stop && increased_thrice(out.scan.loocv_per_step)) {
            out.scan.early_stopped = true;
            break;
        }
    }
    out.scan.chosen_prefix_length = argmin_first(out.scan.loocv_per_step);
    return out;
}

/// Picks the lowest-LOOCV scan, then re-polishes the winner when the tune
/// strategy asks for a final GA+BFGS pass.
inline SurrogateResult finalize(std::vector<ScanOutput>& scans, const ExperimentalDesign& design,
                                const TuneStrategy& strategy, std::uint64_t seed) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < scans.size(); ++i)
        if (scans[i].best_loocv < scans[best].best_loocv) best = i;
    ScanOutput& w = scans[best];

    SelectionTrace trace;
    trace.p_chosen = w.scan.p;
    trace.ordered_terms = w.scan.ordered_terms;
    trace.loocv_per_step = w.scan.loocv_per_step;
    trace.chosen_prefix_length = w.scan.chosen_prefix_length;
    for (auto& s : scans) trace.scans.push_back(s.scan);
    trace.fell_back_to_ok = !std::isfinite(w.best_loocv);

    KrigingModel model = w.best_model;
    if (strategy.kind == TuneKind::SimplifiedGaBfgs && model.num_terms() > 1) {
        KrigingProblem problem(design, model.basis());
        TuneState st;
        st.last_optimum_log_theta = w.best_log_theta;
        st.iteration_counter = 1;
        const TuneResult tr = tune_simplified(st, problem, strategy, derive_seed(seed, 0xF1A1), false, true);
        try {
            KrigingModel polished = problem.fit(tr.theta);
            if (polished.has_loocv()) model = std::move(polished);
        } catch (const Error&) {
        }
    }
    return {std::move(model), std::move(trace)};
}

inline std::vector<MultiIndex> non_constant(const MultiIndexSet& set) {
    std::vector<MultiIndex> out;
    for (const auto& a : set.indices)
        if (!a.is_constant()) out.push_back(a);
    return out;
}

/// BK/PCK(TF) dictionary of order p: two-factor for p >= 2, total order below.
inline MultiIndexSet two_factor_dictionary(std::size_t m, int p) {
    return p >= 2 ? generate_index_set(m, p, IndexScheme::TwoFactor)
                  : generate_index_set(m, p, IndexScheme::TotalOrder);
}

inline std::vector<int> p_values(const std::vector<int>& p_range) {
    std::vector<int> ps = p_range;
    std::sort(ps.begin(), ps.end());
    ps.erase(std::unique(ps.begin(), ps.end()), ps.end());
    for (int p : ps)
        if (p < 0) throw PreconditionError("p_range must be non-negative");
    if (ps.empty()) throw PreconditionError("p_range must not be empty");
    return ps;
}

}  // namespace detail

/// Blind Kriging: Bayesian forward selection over monic two-factor
/// candidates, one scan per p, lowest LOOCV wins.
inline SurrogateResult build_bk(const ExperimentalDesign& design, const std::vector<int>& p_range,
                                const TuneStrategy& strategy, std::uint64_t seed) {
    strategy.validate();
    const std::size_t m = static_cast<std::size_t>(design.m());
    const detail::OkStep ok = detail::fit_ok_step(design, PolyFamily::Monic, strategy, seed);
    std::vector<detail::ScanOutput> scans;
    for (int p : detail::p_values(p_range)) {
        const std::vector<MultiIndex> dict =
            p == 0 ? std::vector<MultiIndex>{} : detail::non_constant(detail::two_factor_dictionary(m, p));
        detail::NextTermFn next = [&dict](const KrigingModel& cur,
                                          const std::vector<bool>& used) -> std::optional<std::size_t> {
            std::vector<MultiIndex> cands;
            std::vector<std::size_t> map;
            for (std::size_t i = 0; i < dict.size(); ++i)
                if (!used[i]) {
                    cands.push_back(dict[i]);
                    map.push_back(i);
                }
            if (cands.empty()) return std::nullopt;
            const BkPosterior post = bk_posterior_beta(cur, cands);
            Eigen::Index best = 0;
            for (Eigen::Index c = 1; c < post.beta_hat.size(); ++c)
                if (std::abs(post.beta_hat(c)) > std::abs(post.beta_hat(best))) best = c;
            if (!(std::abs(post.beta_hat(best)) > 1e-14)) return std::nullopt;
            return map[static_cast<std::size_t>(best)];
        };
        scans.push_back(detail::run_scan(design, PolyFamily::Monic, p, dict, ok, next, strategy, seed));
    }
    return detail::finalize(scans, design, strategy, seed);
}

/// Returns a next-term chooser that walks a fixed ordering.
inline detail::NextTermFn fixed_order(std::vector<std::size_t> order) {
    return [order = std::move(order)](const KrigingModel&,
                                      const std::vector<bool>& used) -> std::optional<std::size_t> {
        for (std::size_t idx : order)
            if (!used[idx]) return idx;
        return std::nullopt;
    };
}

/// Optimal polynomial-chaos Kriging: LARS orders the Legendre dictionary and
/// a tuned UK is refitted at every LARS step.
inline SurrogateResult build_pck(const ExperimentalDesign& design, const std::vector<int>& p_range,
                                 IndexScheme scheme, const TuneStrategy& strategy,
                                 std::uint64_t seed) {
    strategy.validate();
    if (scheme == IndexScheme::Hyperbolic)
        throw PreconditionError("build_pck: hyperbolic dictionaries are not supported");
    const std::size_t m = static_cast<std::size_t>(design.m());
    const detail::OkStep ok = detail::fit_ok_step(design, PolyFamily::Legendre, strategy, seed);
    std::vector<detail::ScanOutput> scans;
    for (int p : detail::p_values(p_range)) {
        std::vector<MultiIndex> dict;
        if (p > 0) {
            const MultiIndexSet set = scheme == IndexScheme::TwoFactor
                                          ? detail::two_factor_dictionary(m, p)
                                          : generate_index_set(m, p, scheme);
            dict = detail::non_constant(set);
        }
        std::vector<std::size_t> order;
        if (!dict.empty()) {
            const BasisSpec cand = detail::basis_from(PolyFamily::Legendre, dict, p);
            const Eigen::MatrixXd C = trend_matrix(cand, design.points());
            order = lars_select(C, design.responses_std()).order;
        }
        scans.push_back(detail::run_scan(design, PolyFamily::Legendre, p, dict, ok,
                                         fixed_order(std::move(order)), strategy, seed));
    }
    return detail::finalize(scans, design, strategy, seed);
}

/// Ranks total-order Legendre terms by the magnitude of their GLS coefficient
/// on unit-norm centered columns (ties keep graded order). Requires P < n.
inline std::vector<std::size_t> rank_by_coefficient(const KrigingModel& full) {
    const Eigen::MatrixXd& F = full.trend();
    std::vector<std::size_t> idx;
    std::vector<double> key;
    for (Eigen::Index k = 1; k < F.cols(); ++k) {
        const double spread = (F.col(k).array() - F.col(k).mean()).matrix().norm();
        idx.push_back(static_cast<std::size_t>(k - 1));
        key.push_back(std::abs(full.alpha()(k)) * spread);
    }
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return key[a] > key[b]; });
    return idx;
}

/// Frequentist UK: coefficient-magnitude ordering from one full-trend fit,
/// then a LOOCV scan over all prefixes.
inline SurrogateResult build_uk_frequentist(const ExperimentalDesign& design, int p,
                                            const TuneStrategy& strategy, std::uint64_t seed) {
    strategy.validate();
    const std::size_t m = static_cast<std::size_t>(design.m());
    const MultiIndexSet set = generate_index_set(m, p, IndexScheme::TotalOrder);
    if (static_cast<Eigen::Index>(set.size()) >= design.n())
        throw PreconditionError("frequentist ranking needs fewer trend terms than samples");
    const detail::OkStep ok = detail::fit_ok_step(design, PolyFamily::Legendre, strategy, seed);
    const std::vector<MultiIndex> dict = detail::non_constant(set);
    std::vector<std::size_t> order;
    if (!dict.empty()) {
        KrigingProblem full_problem(design, BasisSpec{PolyFamily::Legendre, set});
        const TuneResult tr = tune_exhaustive(full_problem, strategy, derive_seed(seed, 0xF011));
        order = rank_by_coefficient(full_problem.fit(tr.theta));
    }
    std::vector<detail::ScanOutput> scans;
    scans.push_back(detail::run_scan(design, PolyFamily::Legendre, p, dict, ok,
                                     fixed_order(std::move(order)), strategy, seed, false));
    return detail::finalize(scans, design, strategy, seed);
}

/// UK with the complete Legendre total-order basis of order p.
inline SurrogateResult build_uk_fixed(const ExperimentalDesign& design, int p,
                                      const TuneStrategy& strategy, std::uint64_t seed) {
    strategy.validate();
    const std::size_t m = static_cast<std::size_t>(design.m());
    const MultiIndexSet set = generate_index_set(m, p, IndexScheme::TotalOrder);
    if (static_cast<Eigen::Index>(set.size()) > design.n())
        throw PreconditionError("polynomial size (" + std::to_string(set.size()) +
                                ") exceeds the sample size (" + std::to_string(design.n()) + ")");
    KrigingProblem problem(design, BasisSpec{PolyFamily::Legendre, set});
    const TuneResult tr = tune_exhaustive(problem, strategy, derive_seed(seed, 0xF1CED));
    KrigingModel model = problem.fit(tr.theta);
    SelectionTrace trace;
    trace.p_chosen = p;
    trace.ordered_terms = detail::non_constant(set);
    trace.chosen_prefix_length = trace.ordered_terms.size();
    trace.loocv_per_step.push_back(model.has_loocv() ? model.loocv_rmse_std()
                                                     : std::numeric_limits<double>::quiet_NaN());
    return {std::move(model), std::move(trace)};
}

}  // namespace ukego
