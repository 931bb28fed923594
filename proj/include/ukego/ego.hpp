#pragma once

// Expected improvement, its maximization, and the EGO infill loop.

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <numbers>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "ukego/design.hpp"
#include "ukego/errors.hpp"
#include "ukego/hyperopt.hpp"
#include "ukego/kriging.hpp"
#include "ukego/seeding.hpp"
#include "ukego/surrogate.hpp"

namespace ukego {

inline constexpr double kDuplicateGuardRadius = 1e-8;

/// EI via the error function. s below 1e-12 * std_y counts as zero.
inline double expected_improvement(double f_hat, double s, double y_min, double std_y = 1.0) {
    if (!(s > 1e-12 * std_y)) return 0.0;
    const double d = y_min - f_hat;
    const double u = d / s;
    const double cdf = 0.5 + 0.5 * std::erf(u / std::numbers::sqrt2);
    const double pdf = std::exp(-0.5 * u * u) / std::sqrt(2.0 * std::numbers::pi);
    return std::max(0.0, d * cdf + s * pdf);
}

/// Same quantity through the normal cdf/pdf (cdf from erfc); kept for cross-checks.
inline double expected_improvement_cdf_form(double f_hat, double s, double y_min) {
    if (!(s > 0.0)) return 0.0;
    const double u = (y_min - f_hat) / s;
    const double Phi = 0.5 * std::erfc(-u / std::numbers::sqrt2);
    const double phi = std::exp(-0.5 * u * u) / std::sqrt(2.0 * std::numbers::pi);
    return std::max(0.0, (y_min - f_hat) * Phi + s * phi);
}

/// EI of a fitted model at x (normalized coordinates); y_min in raw units.
inline double expected_improvement(const KrigingModel& model, const Eigen::VectorXd& x, double y_min) {
    const auto p = model.predict_full(x);
    return expected_improvement(p.mean, std::sqrt(p.mse), y_min, model.design().std_y());
}

struct EiOptimum {
    Eigen::VectorXd x;
    double ei = 0.0;
};

struct EiSearchOptions {
    int population = 100;
    int generations = 200;
};

/// GA over [-1,1]^m, then projected quasi-Newton from the GA incumbent.
inline EiOptimum maximize_ei(const KrigingModel& model, double y_min, std::uint64_t seed,
                             const EiSearchOptions& opt = {}) {
    const Eigen::Index m = model.design().m();
    const Box box = Box::uniform(m, -1.0, 1.0);
    auto f = [&](const Eigen::VectorXd& x) { return expected_improvement(model, x, y_min); };
    GaOptions ga;
    ga.population = opt.population;
    ga.generations = opt.generations;
    ga.seed = seed;
    const GaResult g = ga_maximize(f, box, ga);
    OptimumResult b = bfgs_maximize(f, g.x, box);
    if (!(b.value >= g.value)) b = g;
    return {b.x, std::max(0.0, b.value)};
}

/// Moves x off any design point closer than the guard radius: the result sits
/// at exactly the guard distance from that point, along a random direction.
inline Eigen::VectorXd apply_duplicate_guard(const Eigen::MatrixXd& points, const Eigen::VectorXd& x,
                                             std::uint64_t seed, bool* moved = nullptr) {
    if (moved) *moved = false;
    Eigen::VectorXd out = x;
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> nd(0.0, 1.0);
    for (int attempt = 0; attempt < 64; ++attempt) {
        Eigen::Index nearest = -1;
        double best = std::numeric_limits<double>::infinity();
        for (Eigen::Index i = 0; i < points.rows(); ++i) {
            const double d = (points.row(i).transpose() - out).norm();
            if (d < best) {
                best = d;
                nearest = i;
            }
        }
        if (nearest < 0 || best >= kDuplicateGuardRadius) return out;
        if (moved) *moved = true;
        Eigen::VectorXd dir(out.size());
        for (Eigen::Index k = 0; k < dir.size(); ++k) dir(k) = nd(rng);
        const Eigen::VectorXd base = points.row(nearest).transpose();
        // Slightly more than the radius so rounding cannot leave it inside.
        Eigen::VectorXd cand = base + (kDuplicateGuardRadius * (1.0 + 1e-6)) * dir.normalized();
        if ((cand.array().abs() <= 1.0).all()) out = cand;
    }
    throw IllConditionedError("duplicate guard could not place a new point", 0.0);
}

/// Objective over normalized coordinates, returning the value the surrogate
/// is fitted to together with the raw value that is reported.
struct Evaluation {
    double model_value;
    double raw_value;
};
using NormalizedObjective = std::function<Evaluation(const Eigen::VectorXd&)>;

struct HistoryEntry {
    int iteration;
    Eigen::VectorXd point;  // normalized
    double raw_value;
    double best_raw;
};

struct EgoState {
    ExperimentalDesign design;  // responses are model values
    Eigen::VectorXd best_point;
    double best_value = std::numeric_limits<double>::infinity();  // model scale
    double best_raw = std::numeric_limits<double>::infinity();
    int iteration = 0;
    std::vector<HistoryEntry> history;
    std::vector<SelectionTrace> traces;
    std::vector<double> ei_values;
};

inline EgoState make_ego_state(const ExperimentalDesign& initial, const Eigen::VectorXd& initial_raw) {
    EgoState s{initial, {}, std::numeric_limits<double>::infinity(),
               std::numeric_limits<double>::infinity(), 0, {}, {}, {}};
    for (Eigen::Index i = 0; i < initial.n(); ++i) {
        if (initial.responses_raw()(i) < s.best_value) {
            s.best_value = initial.responses_raw()(i);
            s.best_point = initial.points().row(i).transpose();
            s.best_raw = initial_raw(i);
        }
    }
    return s;
}

struct EgoStepOptions {
    SurrogateConfig surrogate;
    EiSearchOptions ei;
};

/// One infill: rebuild the surrogate, maximize EI, guard, evaluate, append.
inline void ego_step(EgoState& state, const EgoStepOptions& opt, const NormalizedObjective& objective,
                     std::uint64_t seed, std::optional<KrigingModel>* built_model = nullptr) {
    SurrogateResult sr = build_surrogate(state.design, opt.surrogate, derive_seed(seed, 1));
    const double y_min = state.design.responses_raw().minCoeff();
    EiOptimum e = maximize_ei(sr.model, y_min, derive_seed(seed, 2), opt.ei);
    const Eigen::VectorXd x = apply_duplicate_guard(state.design.points(), e.x, derive_seed(seed, 3));
    const Evaluation ev = objective(x);
    if (!std::isfinite(ev.model_value) || !std::isfinite(ev.raw_value))
        throw DomainError("objective returned a non-finite value");
    state.design = state.design.with_sample(x, ev.model_value);
    ++state.iteration;
    if (ev.model_value < state.best_value) {
        state.best_value = ev.model_value;
        state.best_raw = ev.raw_value;
        state.best_point = x;
    }
    state.history.push_back({state.iteration, x, ev.raw_value, state.best_raw});
    state.traces.push_back(std::move(sr.trace));
    state.ei_values.push_back(e.ei);
    if (built_model) built_model->emplace(std::move(sr.model));
}

}  // namespace ukego
