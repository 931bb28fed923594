#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "oracles.hpp"
#include "ukego/poly_basis.hpp"

using namespace ukego;

TEST(Legendre, TableValues) {
    EXPECT_DOUBLE_EQ(legendre_eval(2, 1.0), 1.0);
    EXPECT_DOUBLE_EQ(legendre_eval(0, -0.37), 1.0);
    EXPECT_DOUBLE_EQ(legendre_eval(4, 0.0), 0.375);
}

TEST(Legendre, MatchesCoefficientSumUpToTen) {
    for (int p = 0; p <= 10; ++p)
        for (double x = -1.0; x <= 1.0; x += 0.0625)
            EXPECT_NEAR(legendre_eval(p, x), oracle::legendre_sum(p, x), 1e-12) << "p=" << p << " x=" << x;
}

TEST(Legendre, UnitAtOne) {
    for (int p = 0; p <= 12; ++p) EXPECT_NEAR(legendre_eval(p, 1.0), 1.0, 1e-13);
}

TEST(Legendre, RejectsOutsideDomain) {
    EXPECT_THROW(legendre_eval(2, 1.0001), DomainError);
    EXPECT_THROW(legendre_eval(2, -1.5), DomainError);
    EXPECT_THROW(legendre_eval(-1, 0.0), PreconditionError);
}

TEST(Legendre, OrthogonalUnderGaussQuadrature) {
    const auto q = oracle::gauss_legendre(20);
    for (int i = 0; i <= 5; ++i)
        for (int j = 0; j <= 5; ++j) {
            double s = 0.0;
            for (std::size_t k = 0; k < q.nodes.size(); ++k)
                s += q.weights[k] * legendre_eval(i, q.nodes[k]) * legendre_eval(j, q.nodes[k]);
            EXPECT_NEAR(s, i == j ? 2.0 / (2 * i + 1) : 0.0, 1e-10);
        }
}

TEST(Monic, Powers) {
    EXPECT_DOUBLE_EQ(monic_eval(3, 2.0), 8.0);
    EXPECT_DOUBLE_EQ(monic_eval(0, 5.0), 1.0);
    EXPECT_DOUBLE_EQ(monic_eval(1, -0.5), -0.5);
}

TEST(IndexSet, TotalOrderSmall) {
    const auto s = generate_index_set(2, 1, IndexScheme::TotalOrder);
    ASSERT_EQ(s.size(), 3u);
    EXPECT_EQ(s[0].degrees, (std::vector<int>{0, 0}));
    EXPECT_EQ(s[1].degrees, (std::vector<int>{1, 0}));
    EXPECT_EQ(s[2].degrees, (std::vector<int>{0, 1}));
}

TEST(IndexSet, TensorTwentyFive) {
    EXPECT_EQ(generate_index_set(2, 4, IndexScheme::TensorProduct).size(), 25u);
}

TEST(IndexSet, TwoFactorEighteenFeaturesInThreeDims) {
    const auto s = generate_index_set(3, 2, IndexScheme::TwoFactor);
    EXPECT_EQ(s.size() - 1, 18u);
}

TEST(IndexSet, CardinalityFormulas) {
    for (std::size_t m = 1; m <= 8; ++m)
        for (int p = 0; p <= 4; ++p) {
            const auto pu = static_cast<std::size_t>(p);
            std::size_t tensor = 1;
            for (std::size_t j = 0; j < m; ++j) tensor *= pu + 1;
            EXPECT_EQ(generate_index_set(m, p, IndexScheme::TensorProduct).size(), tensor);
            EXPECT_EQ(generate_index_set(m, p, IndexScheme::TotalOrder).size(), oracle::binom(m + pu, pu));
            if (p >= 2) {
                EXPECT_EQ(generate_index_set(m, p, IndexScheme::TwoFactor).size(),
                          1 + m * pu + oracle::binom(m, 2) * pu * pu);
            }
        }
    for (std::size_t m = 1; m <= 8; ++m)
        EXPECT_EQ(generate_index_set(m, 2, IndexScheme::TwoFactor).size(), 2 * m * m + 1);
}

TEST(IndexSet, ConstantFirstNoDuplicatesGraded) {
    for (auto scheme : {IndexScheme::TensorProduct, IndexScheme::TotalOrder, IndexScheme::TwoFactor,
                        IndexScheme::Hyperbolic}) {
        const auto s = generate_index_set(3, 3, scheme, 0.5);
        EXPECT_NO_THROW(validate_index_set(s));
        for (std::size_t k = 1; k < s.size(); ++k) EXPECT_TRUE(graded_less(s[k - 1], s[k]));
    }
}

TEST(IndexSet, TotalOrderInsideTensor) {
    for (std::size_t m = 1; m <= 4; ++m)
        for (int p = 0; p <= 4; ++p) {
            const auto t = generate_index_set(m, p, IndexScheme::TensorProduct);
            std::set<MultiIndex> tensor(t.indices.begin(), t.indices.end());
            for (const auto& a : generate_index_set(m, p, IndexScheme::TotalOrder).indices)
                EXPECT_TRUE(tensor.count(a));
        }
}

TEST(IndexSet, HyperbolicBetweenSchemes) {
    // nu = 1 reproduces total order; smaller nu prunes interactions.
    EXPECT_EQ(generate_index_set(3, 3, IndexScheme::Hyperbolic, 1.0).size(),
              generate_index_set(3, 3, IndexScheme::TotalOrder).size());
    EXPECT_LT(generate_index_set(3, 3, IndexScheme::Hyperbolic, 0.5).size(),
              generate_index_set(3, 3, IndexScheme::TotalOrder).size());
    EXPECT_THROW(generate_index_set(2, 2, IndexScheme::Hyperbolic, 0.0), PreconditionError);
    EXPECT_THROW(generate_index_set(2, 2, IndexScheme::Hyperbolic, 1.5), PreconditionError);
}

TEST(IndexSet, TwoFactorNeedsOrderTwo) {
    EXPECT_THROW(generate_index_set(2, 1, IndexScheme::TwoFactor), PreconditionError);
}

TEST(Basis, Examples) {
    BasisSpec c{PolyFamily::Legendre, constant_index_set(3)};
    Eigen::VectorXd x(3);
    x << 0.2, -0.7, 0.9;
    EXPECT_EQ(eval_basis(c, x), Eigen::VectorXd::Ones(1));

    BasisSpec l{PolyFamily::Legendre, generate_index_set(2, 1, IndexScheme::TotalOrder)};
    EXPECT_EQ(eval_basis(l, Eigen::Vector2d(1, 1)), Eigen::VectorXd::Ones(3));

    BasisSpec mono{PolyFamily::Monic, {}};
    mono.index_set.indices = {MultiIndex{{0, 0}}, MultiIndex{{2, 1}}};
    EXPECT_DOUBLE_EQ(eval_basis(mono, Eigen::Vector2d(0.5, -1))(1), -0.25);
}

TEST(Basis, AllOnesAtUpperCorner) {
    BasisSpec s{PolyFamily::Legendre, generate_index_set(4, 4, IndexScheme::TensorProduct)};
    const Eigen::VectorXd v = eval_basis(s, Eigen::VectorXd::Ones(4));
    EXPECT_LT((v.array() - 1.0).abs().maxCoeff(), 1e-13);
}

TEST(Basis, DimensionMismatch) {
    BasisSpec s{PolyFamily::Legendre, generate_index_set(2, 1, IndexScheme::TotalOrder)};
    EXPECT_THROW(eval_basis(s, Eigen::VectorXd::Zero(3)), PreconditionError);
}

TEST(BkEncoding, Examples) {
    const double c[] = {2.0, 3.0, 1.0};
    const auto e = bk_encode(c);
    EXPECT_NEAR(e.linear(0), 0.0, 1e-15);
    EXPECT_NEAR(e.quadratic(0), -std::sqrt(2.0), 1e-12);
    EXPECT_NEAR(e.linear(1), std::sqrt(1.5), 1e-12);
    EXPECT_NEAR(e.quadratic(1), 1.0 / std::sqrt(2.0), 1e-12);
    EXPECT_NEAR(e.linear(2), -std::sqrt(1.5), 1e-12);
    EXPECT_NEAR(e.quadratic(2), 1.0 / std::sqrt(2.0), 1e-12);
    const double bad[] = {0.5};
    EXPECT_THROW(bk_encode(bad), DomainError);
}

TEST(BkEncoding, EffectsMatchEncodingOnScaledAxis) {
    for (double u = -1.0; u <= 1.0; u += 0.125) {
        const double v = to_bk_scale(u);
        const auto e = bk_encode(std::span<const double>(&v, 1));
        EXPECT_NEAR(bk_effect(1, u), e.linear(0), 1e-14);
        EXPECT_NEAR(bk_effect(2, u), e.quadratic(0), 1e-14);
    }
}
