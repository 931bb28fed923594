#pragma once

// Box-constrained maximizers (real-coded GA, projected quasi-Newton with
// finite-difference gradients) and the likelihood tuning strategies built on
// top of them.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "ukego/errors.hpp"
#include "ukego/kriging.hpp"
#include "ukego/seeding.hpp"

namespace ukego {

struct Box {
    Eigen::VectorXd lower;
    Eigen::VectorXd upper;

    Eigen::Index dim() const { return lower.size(); }
    Eigen::VectorXd clamp(const Eigen::VectorXd& x) const {
        return x.cwiseMax(lower).cwiseMin(upper);
    }
    bool contains(const Eigen::VectorXd& x) const {
        return (x.array() >= lower.array()).all() && (x.array() <= upper.array()).all();
    }
    static Box uniform(Eigen::Index m, double lo, double hi) {
        return {Eigen::VectorXd::Constant(m, lo), Eigen::VectorXd::Constant(m, hi)};
    }
    static Box log_theta(Eigen::Index m) { return uniform(m, kLogThetaMin, kLogThetaMax); }
};

struct OptimumResult {
    Eigen::VectorXd x;
    double value = -std::numeric_limits<double>::infinity();
    long evaluations = 0;
};

struct GaOptions {
    int population = 100;
    int generations = 200;
    double mutation_sigma = 0.1;
    double blend_alpha = 0.5;
    std::uint64_t seed = 1;
};

struct GaResult : OptimumResult {
    std::vector<double> best_per_generation;
};

namespace detail {
inline double sanitize(double v) {
    return std::isnan(v) ? -std::numeric_limits<double>::infinity() : v;
}
}  // namespace detail

/// Elitist real-coded GA: tournament(2) selection, blend crossover, Gaussian
/// mutation with per-gene rate 1/m, one elite.
template <typename Objective>
GaResult ga_maximize(Objective&& objective, const Box& box, const GaOptions& opt) {
    if (opt.population < 4) throw PreconditionError("ga_maximize: population must be >= 4");
    if (opt.generations < 1) throw PreconditionError("ga_maximize: generations must be >= 1");
    const Eigen::Index m = box.dim();
    if (m < 1) throw PreconditionError("ga_maximize: empty box");

    std::mt19937_64 rng(opt.seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::normal_distribution<double> gauss(0.0, opt.mutation_sigma);
    const double mutation_rate = 1.0 / static_cast<double>(m);
    const auto pop_size = static_cast<std::size_t>(opt.population);

    std::vector<Eigen::VectorXd> pop(pop_size, Eigen::VectorXd(m));
    std::vector<double> fit(pop_size);
    GaResult res;
    for (std::size_t i = 0; i < pop_size; ++i) {
        for (Eigen::Index k = 0; k < m; ++k)
            pop[i](k) = box.lower(k) + unit(rng) * (box.upper(k) - box.lower(k));
        fit[i] = detail::sanitize(objective(pop[i]));
        ++res.evaluations;
    }
    auto best_index = [&] {
        return static_cast<std::size_t>(std::max_element(fit.begin(), fit.end()) - fit.begin());
    };
    std::size_t best = best_index();
    res.best_per_generation.push_back(fit[best]);

    std::uniform_int_distribution<std::size_t> pick(0, pop_size - 1);
    auto tournament = [&]() -> const Eigen::VectorXd& {
        const std::size_t a = pick(rng), b = pick(rng);
        return fit[a] >= fit[b] ? pop[a] : pop[b];
    };

    std::vector<Eigen::VectorXd> next(pop_size, Eigen::VectorXd(m));
    std::vector<double> next_fit(pop_size);
    for (int g = 1; g < opt.generations; ++g) {
        next[0] = pop[best];
        next_fit[0] = fit[best];
        for (std::size_t i = 1; i < pop_size; ++i) {
            const Eigen::VectorXd& pa = tournament();
            const Eigen::VectorXd& pb = tournament();
            Eigen::VectorXd& child = next[i];
            for (Eigen::Index k = 0; k < m; ++k) {
                const double lo = std::min(pa(k), pb(k)), hi = std::max(pa(k), pb(k));
                const double ext = opt.blend_alpha * (hi - lo);
                double v = (lo - ext) + unit(rng) * ((hi + ext) - (lo - ext));
                if (unit(rng) < mutation_rate) v += gauss(rng);
                child(k) = std::clamp(v, box.lower(k), box.upper(k));
            }
            next_fit[i] = detail::sanitize(objective(child));
            ++res.evaluations;
        }
        std::swap(pop, next);
        std::swap(fit, next_fit);
        best = best_index();
        res.best_per_generation.push_back(fit[best]);
    }
    res.x = pop[best];
    res.value = fit[best];
    return res;
}

struct BfgsOptions {
    double fd_step = 1e-4;
    double grad_tol = 1e-6;
    int max_iterations = 200;
};

namespace detail {

template <typename Objective>
Eigen::VectorXd fd_gradient(Objective& f, const Eigen::VectorXd& x, double fx, const Box& box,
                            double h, long& evals) {
    const Eigen::Index m = x.size();
    Eigen::VectorXd g(m);
    for (Eigen::Index k = 0; k < m; ++k) {
        Eigen::VectorXd xp = x, xm = x;
        xp(k) = std::min(x(k) + h, box.upper(k));
        xm(k) = std::max(x(k) - h, box.lower(k));
        const double fp = sanitize(f(xp));
        const double fm = sanitize(f(xm));
        evals += 2;
        const bool okp = std::isfinite(fp), okm = std::isfinite(fm);
        if (okp && okm && xp(k) > xm(k))
            g(k) = (fp - fm) / (xp(k) - xm(k));
        else if (okp && xp(k) > x(k))
            g(k) = (fp - fx) / (xp(k) - x(k));
        else if (okm && xm(k) < x(k))
            g(k) = (fx - fm) / (x(k) - xm(k));
        else
            g(k) = 0.0;
    }
    return g;
}

}  // namespace detail

/// Projected BFGS ascent. Never accepts a step that lowers the objective or
/// lands on a non-finite value, so the result is at least as good as start.
template <typename Objective>
OptimumResult bfgs_maximize(Objective&& objective, const Eigen::VectorXd& start, const Box& box,
                            const BfgsOptions& opt = {}) {
    if (start.size() != box.dim()) throw PreconditionError("bfgs_maximize: dimension mismatch");
    if (!box.contains(start)) throw PreconditionError("bfgs_maximize: start outside bounds");
    const Eigen::Index m = start.size();
    OptimumResult res;
    Eigen::VectorXd x = start;
    double fx = detail::sanitize(objective(x));
    res.evaluations = 1;
    res.x = x;
    res.value = fx;
    if (!std::isfinite(fx)) return res;

    // Work on the minimization of -f.
    auto neg_grad = [&](const Eigen::VectorXd& p, double fp) {
        return Eigen::VectorXd(
            -detail::fd_gradient(objective, p, fp, box, opt.fd_step, res.evaluations));
    };
    Eigen::VectorXd g = neg_grad(x, fx);
    Eigen::MatrixXd H = Eigen::MatrixXd::Identity(m, m);
    const double first_scale = 1.0 / std::max(1.0, g.norm());
    H *= first_scale;

    for (int it = 0; it < opt.max_iterations; ++it) {
        Eigen::VectorXd pg = g;
        std::vector<bool> pinned(static_cast<std::size_t>(m), false);
        for (Eigen::Index k = 0; k < m; ++k) {
            if ((x(k) <= box.lower(k) && g(k) > 0.0) || (x(k) >= box.upper(k) && g(k) < 0.0)) {
                pg(k) = 0.0;
                pinned[static_cast<std::size_t>(k)] = true;
            }
        }
        if (pg.norm() < opt.grad_tol) break;

        bool accepted = false;
        Eigen::VectorXd xn;
        double fn = 0.0;
        for (int attempt = 0; attempt < 2 && !accepted; ++attempt) {
            Eigen::VectorXd d = -(H * pg);
            for (Eigen::Index k = 0; k < m; ++k)
                if (pinned[static_cast<std::size_t>(k)]) d(k) = 0.0;
            if (d.dot(pg) >= 0.0 || !d.allFinite()) {
                H = Eigen::MatrixXd::Identity(m, m) * first_scale;
                d = -pg * first_scale;
            }
            double t = 1.0;
            for (int ls = 0; ls < 40; ++ls, t *= 0.5) {
                xn = box.clamp(x + t * d);
                if ((xn - x).norm() == 0.0) break;
                fn = detail::sanitize(objective(xn));
                ++res.evaluations;
                // Armijo condition on -f
                if (std::isfinite(fn) && -fn <= -fx + 1e-4 * g.dot(xn - x) && fn >= fx) {
                    accepted = true;
                    break;
                }
            }
            if (!accepted) H = Eigen::MatrixXd::Identity(m, m) * first_scale;
        }
        if (!accepted) break;

        const Eigen::VectorXd gn = neg_grad(xn, fn);
        const Eigen::VectorXd s = xn - x;
        const Eigen::VectorXd y = gn - g;
        const double sy = s.dot(y);
        if (sy > 1e-12 * s.norm() * y.norm() && sy > 0.0) {
            const double rho = 1.0 / sy;
            const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(m, m);
            H = (I - rho * s * y.transpose()) * H * (I - rho * y * s.transpose()) +
                rho * s * s.transpose();
        }
        x = xn;
        fx = fn;
        g = gn;
        if (fx > res.value) {
            res.value = fx;
            res.x = x;
        }
    }
    return res;
}

// ---------------------------------------------------------------------------
// Likelihood tuning strategies.

enum class TuneKind { ExhaustiveGaBfgs, SimplifiedGaBfgs, BfgsOnly };

inline const char* to_string(TuneKind k) {
    switch (k) {
        case TuneKind::ExhaustiveGaBfgs: return "exhaustive";
        case TuneKind::SimplifiedGaBfgs: return "simplified";
        case TuneKind::BfgsOnly: return "bfgs";
    }
    return "?";
}

struct TuneStrategy {
    TuneKind kind = TuneKind::SimplifiedGaBfgs;
    int ga_population = 100;
    int ga_generations = 200;
    std::uint64_t seed = 1;

    void validate() const {
        if (ga_population < 4) throw PreconditionError("tune strategy: population must be >= 4");
        if (ga_generations < 1) throw PreconditionError("tune strategy: generations must be >= 1");
    }
};

/// Warm-start memory for one trend-selection scan.
struct TuneState {
    std::optional<Eigen::VectorXd> last_optimum_log_theta;
    int iteration_counter = 0;
};

struct TuneResult {
    Hyperparameters theta;
    double log_likelihood = -std::numeric_limits<double>::infinity();
};

namespace detail {

inline TuneResult to_tune_result(const OptimumResult& r, Eigen::Index m) {
    if (r.x.size() != m || !std::isfinite(r.value))
        return {Hyperparameters::uniform(m, 1.0), r.value};
    return {Hyperparameters::from_log10(r.x), r.value};
}

inline auto log_likelihood_fn(const KrigingProblem& problem) {
    return [&problem](const Eigen::VectorXd& lt) { return problem.log_likelihood_log10(lt); };
}

}  // namespace detail

/// GA followed by BFGS from the GA incumbent.
inline TuneResult tune_exhaustive(const KrigingProblem& problem, const TuneStrategy& strategy,
                                  std::uint64_t seed) {
    strategy.validate();
    const Eigen::Index m = problem.dim();
    const Box box = Box::log_theta(m);
    auto f = detail::log_likelihood_fn(problem);
    GaOptions ga{strategy.ga_population, strategy.ga_generations, 0.1, 0.5, seed};
    const GaResult g = ga_maximize(f, box, ga);
    const Eigen::VectorXd start = g.x.size() == m ? g.x : Eigen::VectorXd::Zero(m);
    OptimumResult b = bfgs_maximize(f, start, box);
    if (!(b.value >= g.value)) b = g;
    return detail::to_tune_result(b, m);
}

/// BFGS from a random start.
inline TuneResult tune_bfgs_random(const KrigingProblem& problem, std::uint64_t seed) {
    const Eigen::Index m = problem.dim();
    const Box box = Box::log_theta(m);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(kLogThetaMin, kLogThetaMax);
    Eigen::VectorXd start(m);
    for (Eigen::Index k = 0; k < m; ++k) start(k) = u(rng);
    auto f = detail::log_likelihood_fn(problem);
    return detail::to_tune_result(bfgs_maximize(f, start, box), m);
}

/// GA+BFGS on the first scan iteration and on the final trend; warm-started
/// BFGS in between.
inline TuneResult tune_simplified(TuneState& state, const KrigingProblem& problem,
                                  const TuneStrategy& strategy, std::uint64_t seed,
                                  bool is_first_trend_iteration, bool is_final_trend) {
    const Eigen::Index m = problem.dim();
    TuneResult out;
    const bool have_warm = state.last_optimum_log_theta &&
                           state.last_optimum_log_theta->size() == m;
    if (is_first_trend_iteration || !have_warm) {
        out = tune_exhaustive(problem, strategy, seed);
    } else {
        const Box box = Box::log_theta(m);
        auto f = detail::log_likelihood_fn(problem);
        out = detail::to_tune_result(bfgs_maximize(f, box.clamp(*state.last_optimum_log_theta), box), m);
        if (is_final_trend) {
            TuneResult fresh = tune_exhaustive(problem, strategy, seed);
            if (fresh.log_likelihood > out.log_likelihood) out = fresh;
        }
    }
    if (std::isfinite(out.log_likelihood)) state.last_optimum_log_theta = out.theta.log10();
    ++state.iteration_counter;
    return out;
}

/// Dispatches on the strategy kind.
inline TuneResult tune(TuneState& state, const KrigingProblem& problem, const TuneStrategy& strategy,
                       std::uint64_t seed, bool is_first_trend_iteration, bool is_final_trend) {
    switch (strategy.kind) {
        case TuneKind::ExhaustiveGaBfgs: {
            TuneResult r = tune_exhaustive(problem, strategy, seed);
            if (std::isfinite(r.log_likelihood)) state.last_optimum_log_theta = r.theta.log10();
            ++state.iteration_counter;
            return r;
        }
        case TuneKind::BfgsOnly: {
            TuneResult r = tune_bfgs_random(problem, seed);
            ++state.iteration_counter;
            return r;
        }
        case TuneKind::SimplifiedGaBfgs:
            return tune_simplified(state, problem, strategy, seed, is_first_trend_iteration,
                                   is_final_trend);
    }
    throw PreconditionError("unknown tune strategy");
}

}  // namespace ukego
