#include <gtest/gtest.h>

#include <cmath>

#include "oracles.hpp"
#include "ukego/bench/metrics.hpp"
#include "ukego/ego.hpp"

using namespace ukego;

namespace {

double toy(const Eigen::VectorXd& x) { return std::sin(3.0 * x(0)) + 0.5 * x(0) * x(0); }

ExperimentalDesign toy_design() {
    Eigen::MatrixXd X(6, 1);
    X << -0.95, -0.6, -0.2, 0.15, 0.55, 0.9;
    Eigen::VectorXd y(6);
    for (Eigen::Index i = 0; i < 6; ++i) y(i) = toy(Eigen::VectorXd::Constant(1, X(i, 0)));
    return ExperimentalDesign(X, y, BoxBounds{{-1, 1}});
}

SurrogateConfig quick_ok() {
    SurrogateConfig c;
    c.kind = SurrogateKind::OK;
    c.tune.ga_population = 20;
    c.tune.ga_generations = 15;
    return c;
}

}  // namespace

TEST(Ei, ReferenceValues) {
    EXPECT_NEAR(expected_improvement(0.0, 1.0, 0.0), 1.0 / std::sqrt(2.0 * std::numbers::pi), 1e-15);
    EXPECT_NEAR(expected_improvement(0.0, 1.0, 0.0), 0.3989422804014327, 1e-15);
    EXPECT_EQ(expected_improvement(1.0, 0.0, 0.5), 0.0);
    EXPECT_EQ(expected_improvement(0.0, 1e-13, 2.0), 0.0);
    // s -> 0 with f below the incumbent: the value drops to zero by convention.
    EXPECT_EQ(expected_improvement(0.0, 0.5e-12, 1.0), 0.0);
    EXPECT_GT(expected_improvement(0.0, 2e-12, 1.0), 0.999);
}

TEST(Ei, MonotoneInMeanAndSpread) {
    double prev = 1e300;
    for (double f = -3; f <= 3; f += 0.25) {
        const double e = expected_improvement(f, 0.7, 0.0);
        EXPECT_LE(e, prev);
        EXPECT_GE(e, 0.0);
        prev = e;
    }
    prev = 0.0;
    for (double s = 0.05; s <= 4; s += 0.05) {
        const double e = expected_improvement(0.3, s, 0.0);
        EXPECT_GE(e, prev);
        prev = e;
    }
}

TEST(Ei, MonteCarloAgreement) {
    for (auto [f, s, ymin] : {std::tuple{0.0, 1.0, 0.0}, {0.5, 0.3, 0.2}, {-1.0, 2.0, 0.5}}) {
        const auto mc = oracle::ei_monte_carlo(f, s, ymin, 400000, 42);
        EXPECT_NEAR(expected_improvement(f, s, ymin), mc.mean, 4.0 * mc.std_error + 1e-6);
    }
}

TEST(Ei, TwoFormsAgree) {
    for (double u = -6; u <= 6; u += 0.125)
        for (double s : {1e-6, 0.01, 1.0, 100.0}) {
            const double a = expected_improvement(0.0, s, u * s);
            const double b = expected_improvement_cdf_form(0.0, s, u * s);
            EXPECT_NEAR(a / s, b / s, 1e-12) << u << " " << s;
        }
}

TEST(EiSearch, DominatesDenseGrid) {
    const auto d = toy_design();
    const auto model = fit(d, constant_basis(1), Hyperparameters(Eigen::VectorXd::Constant(1, 3.0)));
    const double ymin = d.responses_raw().minCoeff();
    const auto opt = maximize_ei(model, ymin, 7);
    double grid_best = 0.0;
    for (int i = 0; i <= 10000; ++i) {
        const double x = -1.0 + 2.0 * i / 10000.0;
        grid_best = std::max(grid_best, expected_improvement(model, Eigen::VectorXd::Constant(1, x), ymin));
    }
    EXPECT_GE(opt.ei, grid_best * (1.0 - 1e-3));
    EXPECT_NEAR(opt.ei, expected_improvement(model, opt.x, ymin), 1e-15);
    EXPECT_LE(opt.x.cwiseAbs().maxCoeff(), 1.0);
}

TEST(EiSearch, Deterministic) {
    const auto d = toy_design();
    const auto model = fit(d, constant_basis(1), Hyperparameters(Eigen::VectorXd::Constant(1, 3.0)));
    const double ymin = d.responses_raw().minCoeff();
    const EiSearchOptions o{30, 20};
    EXPECT_EQ(maximize_ei(model, ymin, 3, o).x, maximize_ei(model, ymin, 3, o).x);
}

TEST(DuplicateGuard, LeavesDistinctPointsAlone) {
    Eigen::MatrixXd P(2, 2);
    P << 0, 0, 0.5, 0.5;
    bool moved = true;
    const Eigen::Vector2d x(0.1, 0.1);
    EXPECT_EQ(apply_duplicate_guard(P, x, 1, &moved), x);
    EXPECT_FALSE(moved);
}

TEST(DuplicateGuard, MovesCoincidentPoint) {
    Eigen::MatrixXd P(2, 2);
    P << 0, 0, 0.5, 0.5;
    bool moved = false;
    const Eigen::VectorXd y = apply_duplicate_guard(P, Eigen::Vector2d(0.5, 0.5 + 1e-10), 4, &moved);
    EXPECT_TRUE(moved);
    const double d = (y - Eigen::Vector2d(0.5, 0.5)).norm();
    EXPECT_GE(d, kDuplicateGuardRadius);
    EXPECT_LT(d, 1.1 * kDuplicateGuardRadius);
    // Corner: candidates outside the box are rejected, the point stays inside.
    Eigen::MatrixXd C(1, 2);
    C << 1, 1;
    const Eigen::VectorXd z = apply_duplicate_guard(C, Eigen::Vector2d(1, 1), 5);
    EXPECT_LE(z.cwiseAbs().maxCoeff(), 1.0);
    EXPECT_GE((z - Eigen::Vector2d(1, 1)).norm(), kDuplicateGuardRadius);
}

TEST(EgoLoop, BudgetAndMonotoneBest) {
    const auto d = toy_design();
    EgoState st = make_ego_state(d, d.responses_raw());
    const NormalizedObjective f = [](const Eigen::VectorXd& u) {
        const double v = toy(u);
        return Evaluation{v, v};
    };
    EgoStepOptions opt{quick_ok(), {30, 20}};
    double prev = st.best_value;
    for (int k = 1; k <= 5; ++k) {
        ego_step(st, opt, f, derive_seed(99, k));
        EXPECT_LE(st.best_value, prev);
        prev = st.best_value;
        EXPECT_GE(st.design.min_pairwise_distance(), kDuplicateGuardRadius);
    }
    EXPECT_EQ(st.design.n(), 11);
    EXPECT_EQ(st.history.size(), 5u);
    EXPECT_EQ(st.traces.size(), 5u);
    EXPECT_EQ(st.best_value, st.design.responses_raw().minCoeff());
    // The toy minimum is near x = -0.42 with value about -0.87.
    EXPECT_LT(st.best_value, -0.85);
}

TEST(EgoLoop, Deterministic) {
    const auto d = toy_design();
    const NormalizedObjective f = [](const Eigen::VectorXd& u) {
        const double v = toy(u);
        return Evaluation{v, v};
    };
    EgoStepOptions opt{quick_ok(), {30, 20}};
    EgoState a = make_ego_state(d, d.responses_raw()), b = make_ego_state(d, d.responses_raw());
    for (int k = 1; k <= 3; ++k) {
        ego_step(a, opt, f, derive_seed(5, k));
        ego_step(b, opt, f, derive_seed(5, k));
    }
    EXPECT_EQ(a.design.points(), b.design.points());
}

TEST(EgoLoop, RejectsNonFiniteObjective) {
    const auto d = toy_design();
    EgoState st = make_ego_state(d, d.responses_raw());
    const NormalizedObjective f = [](const Eigen::VectorXd&) {
        return Evaluation{std::nan(""), 0.0};
    };
    EXPECT_THROW(ego_step(st, EgoStepOptions{quick_ok(), {20, 5}}, f, 1), DomainError);
}
