#include "ipbm/quadrature.hpp"

#include <gtest/gtest.h>

#include <Eigen/Dense>

#include <cmath>
#include <random>

using namespace ipbm;

namespace {

double factorial(int n) { return std::tgamma(n + 1.0); }

double simplex_moment(int i, int j, int k) { return factorial(i) * factorial(j) * factorial(k) / factorial(i + j + k + 3); }

double integrate(const QuadratureRule& rule, int i, int j, int k)
{
    double s = 0.0;
    for (std::size_t q = 0; q < rule.size(); ++q) {
        const Point3& p = rule.nodes[q];
        s += rule.weights[q] * std::pow(p.x(), i) * std::pow(p.y(), j) * std::pow(p.z(), k);
    }
    return s;
}

}  // namespace

TEST(GaussLegendre, SmallRules)
{
    const auto g1 = gauss_legendre(1);
    ASSERT_EQ(g1.size(), 1u);
    EXPECT_NEAR(g1.nodes[0], 0.0, 1e-15);
    EXPECT_NEAR(g1.weights[0], 2.0, 1e-15);

    const auto g2 = gauss_legendre(2);
    ASSERT_EQ(g2.size(), 2u);
    EXPECT_NEAR(std::abs(g2.nodes[0]), 1.0 / std::sqrt(3.0), 1e-15);
    EXPECT_NEAR(g2.nodes[0], -g2.nodes[1], 1e-15);
    EXPECT_NEAR(g2.weights[0], 1.0, 1e-15);
    EXPECT_NEAR(g2.weights[1], 1.0, 1e-15);
}

TEST(GaussLegendre, FivePointOctic)
{
    const auto g = gauss_legendre(5);
    double s = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) s += g.weights[i] * std::pow(g.nodes[i], 8);
    EXPECT_NEAR(s, 2.0 / 9.0, 1e-14);
}

TEST(GaussLegendre, ExactnessSweepAndSymmetry)
{
    for (int n = 1; n <= 30; ++n) {
        const auto g = gauss_legendre(n);
        ASSERT_EQ(static_cast<int>(g.size()), n);
        EXPECT_EQ(g.degree, 2 * n - 1);
        for (int i = 0; i < n; ++i) {
            EXPECT_NEAR(g.nodes[i], -g.nodes[n - 1 - i], 1e-14);
            EXPECT_GT(g.weights[i], 0.0);
        }
        for (int p = 0; p <= 2 * n - 1; ++p) {
            double s = 0.0;
            for (int i = 0; i < n; ++i) s += g.weights[i] * std::pow(g.nodes[i], p);
            const double exact = p % 2 ? 0.0 : 2.0 / (p + 1);
            EXPECT_NEAR(s, exact, 1e-13) << "n=" << n << " p=" << p;
        }
    }
}

TEST(GaussLegendre, OutOfRangeThrows)
{
    EXPECT_THROW(gauss_legendre(0), InvalidArgument);
    EXPECT_THROW(gauss_legendre(31), InvalidArgument);
}

TEST(GaussLegendre, MappedInterval)
{
    const auto g = gauss_legendre(3, 1.0, 4.0);
    double s = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) s += g.weights[i] * g.nodes[i] * g.nodes[i];
    EXPECT_NEAR(s, (64.0 - 1.0) / 3.0, 1e-13);
}

TEST(BoxRule, Examples)
{
    const auto unit = box_rule(Box::unit(), {1, 1, 1});
    double vol = 0.0;
    for (double w : unit.weights) vol += w;
    EXPECT_NEAR(vol, 1.0, 1e-15);

    const auto r = box_rule(Box::unit(), {2, 2, 2});
    double s = 0.0;
    for (std::size_t q = 0; q < r.size(); ++q) {
        const Point3& p = r.nodes[q];
        s += r.weights[q] * p.x() * p.x() * p.x() * p.y() * p.y() * p.z();
    }
    EXPECT_NEAR(s, 1.0 / 24.0, 1e-14);

    const auto big = box_rule(Box{Point3(0, 0, 0), Point3(2, 2, 2)}, {1, 1, 1});
    s = 0.0;
    for (std::size_t q = 0; q < big.size(); ++q) s += big.weights[q] * big.nodes[q].x();
    EXPECT_NEAR(s, 8.0, 1e-14);
}

TEST(BoxRule, AnisotropicExactness)
{
    const Box box{Point3(-1, 0.5, 2), Point3(0.5, 1.0, 3)};
    const std::array<int, 3> n{2, 3, 4};
    const auto r = box_rule(box, n);
    EXPECT_EQ(r.size(), 24u);
    for (int a = 0; a <= 2 * n[0] - 1; ++a) {
        for (int b = 0; b <= 2 * n[1] - 1; ++b) {
            for (int c = 0; c <= 2 * n[2] - 1; ++c) {
                auto I = [](double lo, double hi, int p) { return (std::pow(hi, p + 1) - std::pow(lo, p + 1)) / (p + 1); };
                const double exact = I(-1, 0.5, a) * I(0.5, 1.0, b) * I(2, 3, c);
                double s = 0.0;
                for (std::size_t q = 0; q < r.size(); ++q) {
                    const Point3& p = r.nodes[q];
                    s += r.weights[q] * std::pow(p.x(), a) * std::pow(p.y(), b) * std::pow(p.z(), c);
                }
                EXPECT_NEAR(s, exact, 1e-12 * std::max(1.0, std::abs(exact)));
            }
        }
    }
}

TEST(BoxRule, Errors)
{
    EXPECT_THROW(box_rule(Box::unit(), {0, 1, 1}), InvalidArgument);
    EXPECT_THROW(box_rule(Box{Point3(0, 0, 0), Point3(1, 0, 1)}, {1, 1, 1}), InvalidArgument);
}

TEST(TetRule, ExactnessSweep)
{
    for (int mq = 4; mq <= 20; mq += 2) {
        const auto rule = reference_tet_rule(mq);
        EXPECT_GE(rule.degree, mq);
        double vol = 0.0;
        for (double w : rule.weights) vol += w;
        EXPECT_NEAR(vol, 1.0 / 6.0, 1e-13) << "mq=" << mq;
        for (int i = 0; i <= mq; ++i) {
            for (int j = 0; i + j <= mq; ++j) {
                for (int k = 0; i + j + k <= mq; ++k) {
                    const double exact = simplex_moment(i, j, k);
                    EXPECT_NEAR(integrate(rule, i, j, k), exact, 1e-12 * exact) << "mq=" << mq << " x^" << i << " y^"
                                                                                << j << " z^" << k;
                }
            }
        }
    }
}

TEST(TetRule, PositiveWeightsAndInteriorNodes)
{
    for (int mq = 4; mq <= 20; mq += 2) {
        const auto rule = reference_tet_rule(mq);
        for (std::size_t q = 0; q < rule.size(); ++q) {
            const Point3& p = rule.nodes[q];
            EXPECT_GT(rule.weights[q], 0.0);
            EXPECT_GE(p.minCoeff(), -1e-15);
            EXPECT_LE(p.sum(), 1.0 + 1e-15);
        }
    }
}

TEST(TetRule, TabulatedNodeCounts)
{
    EXPECT_EQ(reference_tet_rule(10).size(), 81u);
    EXPECT_EQ(reference_tet_rule(12).size(), 168u);
}

TEST(TetRule, VolumeOfArbitraryTet)
{
    const std::array<Point3, 4> v{Point3(0.1, 0.2, 0.3), Point3(1.4, 0.1, 0.0), Point3(0.3, 1.1, 0.2),
                                  Point3(0.2, 0.4, 0.9)};
    Eigen::Matrix3d J;
    for (int c = 0; c < 3; ++c) J.col(c) = v[c + 1] - v[0];
    const double vol = std::abs(J.determinant()) / 6.0;
    for (int mq : {4, 6, 8, 12}) {
        const auto r = tet_rule(v, mq);
        double s = 0.0;
        for (double w : r.weights) s += w;
        EXPECT_NEAR(s, vol, 1e-13);
    }
}

TEST(TetRule, AffineInvariance)
{
    // Pulling a polynomial back to the reference simplex keeps its degree, so both sides are exact.
    std::mt19937_64 rng(21);
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    for (int trial = 0; trial < 10; ++trial) {
        const Point3 o(U(rng), U(rng), U(rng));
        Eigen::Matrix3d A;
        for (int i = 0; i < 9; ++i) A(i / 3, i % 3) = U(rng);
        if (std::abs(A.determinant()) < 0.05) continue;
        const std::array<Point3, 4> v{o, o + A.col(0), o + A.col(1), o + A.col(2)};
        const int mq = 6;
        const auto mapped = tet_rule(v, mq);
        const auto ref = reference_tet_rule(mq);
        auto f = [](const Point3& p) { return std::pow(p.x(), 3) * p.y() - 2 * p.z() * p.z() * p.x() + std::pow(p.y(), 6); };
        double lhs = 0.0, rhs = 0.0;
        for (std::size_t q = 0; q < mapped.size(); ++q) lhs += mapped.weights[q] * f(mapped.nodes[q]);
        for (std::size_t q = 0; q < ref.size(); ++q) rhs += ref.weights[q] * f(o + A * ref.nodes[q]);
        rhs *= std::abs(A.determinant());
        EXPECT_NEAR(lhs, rhs, 1e-12 * std::max(1.0, std::abs(rhs)));
    }
}

TEST(TetRule, DegreeErrors)
{
    EXPECT_THROW(reference_tet_rule(5), InvalidArgument);
    EXPECT_THROW(reference_tet_rule(2), InvalidArgument);
    EXPECT_THROW(reference_tet_rule(22), InvalidArgument);
    const std::array<Point3, 4> flat{Point3(0, 0, 0), Point3(1, 0, 0), Point3(0, 1, 0), Point3(1, 1, 0)};
    EXPECT_THROW(tet_rule(flat, 4), InvalidArgument);
}

TEST(TetRule, CollapsedRuleExactness)
{
    for (int deg : {0, 3, 9, 14}) {
        const auto r = collapsed_tet_rule(deg);
        for (int i = 0; i <= deg; ++i) {
            for (int j = 0; i + j <= deg; ++j) {
                const int k = deg - i - j;
                EXPECT_NEAR(integrate(r, i, j, k), simplex_moment(i, j, k), 1e-12 * simplex_moment(i, j, k));
            }
        }
    }
}
