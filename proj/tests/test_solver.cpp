#include "ipbm/solver.hpp"

#include <gtest/gtest.h>

#include <Eigen/Dense>

#include <cmath>
#include <random>

using namespace ipbm;

namespace {

LinearSystem make_system(const Eigen::MatrixXd& H, const Eigen::VectorXd& r)
{
    LinearSystem sys;
    sys.H = H.sparseView();
    sys.r = r;
    sys.blocks = {{Block::galerkin, 0, H.rows()}};
    return sys;
}

Eigen::MatrixXd random_matrix(int rows, int cols, std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> N;
    Eigen::MatrixXd A(rows, cols);
    for (int i = 0; i < rows; ++i) {
        for (int j = 0; j < cols; ++j) A(i, j) = N(rng);
    }
    return A;
}

/// Gaussian elimination with partial pivoting, written out so the oracle shares no code with Eigen's solvers.
Eigen::VectorXd eliminate(Eigen::MatrixXd A, Eigen::VectorXd b)
{
    const int n = static_cast<int>(A.rows());
    for (int k = 0; k < n; ++k) {
        int piv = k;
        for (int i = k + 1; i < n; ++i) {
            if (std::abs(A(i, k)) > std::abs(A(piv, k))) piv = i;
        }
        A.row(k).swap(A.row(piv));
        std::swap(b[k], b[piv]);
        for (int i = k + 1; i < n; ++i) {
            const double f = A(i, k) / A(k, k);
            for (int j = k; j < n; ++j) A(i, j) -= f * A(k, j);
            b[i] -= f * b[k];
        }
    }
    Eigen::VectorXd x(n);
    for (int i = n - 1; i >= 0; --i) {
        double s = b[i];
        for (int j = i + 1; j < n; ++j) s -= A(i, j) * x[j];
        x[i] = s / A(i, i);
    }
    return x;
}

}  // namespace

TEST(Solve, SquareNonsingular)
{
    const Eigen::MatrixXd H = random_matrix(12, 12, 1) + 5 * Eigen::MatrixXd::Identity(12, 12);
    const Eigen::VectorXd r = Eigen::VectorXd::LinSpaced(12, -1, 1);
    const auto res = solve_least_squares(make_system(H, r));
    EXPECT_LE(res.residual_norm, 1e-12);
    EXPECT_LE((H * res.c - r).norm(), 1e-12);
    EXPECT_FALSE(res.rank_deficient);
    EXPECT_EQ(res.path, SolvePath::dense);
}

TEST(Solve, ConsistentOverdetermined)
{
    const Eigen::MatrixXd H = random_matrix(50, 10, 2);
    const Eigen::VectorXd cstar = Eigen::VectorXd::LinSpaced(10, 1, 10);
    const auto res = solve_least_squares(make_system(H, H * cstar));
    EXPECT_LE((res.c - cstar).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(Solve, MatchesNormalEquationsOracle)
{
    const Eigen::MatrixXd H = random_matrix(40, 8, 3);
    const Eigen::VectorXd r = random_matrix(40, 1, 4);
    const Eigen::VectorXd oracle = eliminate(H.transpose() * H, H.transpose() * r);
    const auto res = solve_least_squares(make_system(H, r));
    EXPECT_LE((res.c - oracle).cwiseAbs().maxCoeff(), 1e-8);
    EXPECT_NEAR(res.residual_norm, (H * res.c - r).norm(), 1e-9);
}

TEST(Solve, IterativeMatchesDense)
{
    const Eigen::MatrixXd H = random_matrix(300, 120, 5);
    const Eigen::VectorXd r = random_matrix(300, 1, 6);
    const auto sys = make_system(H, r);
    SolveOptions dense;
    dense.path = SolvePath::dense;
    SolveOptions iterative;
    iterative.path = SolvePath::iterative;
    const auto a = solve_least_squares(sys, dense);
    const auto b = solve_least_squares(sys, iterative);
    EXPECT_EQ(b.path, SolvePath::iterative);
    EXPECT_TRUE(b.converged);
    EXPECT_LE((a.c - b.c).norm(), 1e-7 * a.c.norm());
    EXPECT_NEAR(b.residual_norm, (H * b.c - r).norm(), 1e-9);
}

TEST(Solve, IterativeMatchesDenseOnAssembledSystem)
{
    SolverConfig cfg;
    cfg.degrees = {3, 3, 3};
    cfg.m = 4;
    const auto space = build_space(Box::unit(), cfg);
    const auto sys = assemble_ipbf(space, make_preset("sin5", "laplace"),
                                   boundary_points(Domain::unit_sphere(), 400, 42), cfg);
    SolveOptions dense;
    dense.path = SolvePath::dense;
    SolveOptions iterative;
    iterative.path = SolvePath::iterative;
    iterative.compute_condition = false;
    const auto a = solve_least_squares(sys, dense);
    const auto b = solve_least_squares(sys, iterative);
    ASSERT_FALSE(a.rank_deficient);
    EXPECT_LE((a.c - b.c).norm(), 1e-7 * a.c.norm());
}

TEST(Solve, ConsistentRowLeavesMinimizerUnchanged)
{
    const Eigen::MatrixXd H = random_matrix(30, 6, 7);
    const Eigen::VectorXd r = random_matrix(30, 1, 8);
    const auto base = solve_least_squares(make_system(H, r));
    Eigen::MatrixXd H2(31, 6);
    H2 << H, random_matrix(1, 6, 9);
    Eigen::VectorXd r2(31);
    r2 << r, (H2.bottomRows(1) * base.c)(0);
    const auto more = solve_least_squares(make_system(H2, r2));
    EXPECT_LE((more.c - base.c).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(Solve, RankDeficientGivesMinimumNorm)
{
    Eigen::MatrixXd H = random_matrix(20, 4, 10);
    H.col(3) = H.col(0) + H.col(1);
    const Eigen::VectorXd r = random_matrix(20, 1, 11);
    const auto res = solve_least_squares(make_system(H, r));
    EXPECT_TRUE(res.rank_deficient);
    EXPECT_TRUE(std::isinf(res.gram_condition));
    const Eigen::VectorXd oracle = H.completeOrthogonalDecomposition().pseudoInverse() * r;
    EXPECT_LE((res.c - oracle).norm(), 1e-10 * oracle.norm());
}

TEST(Condition, SimpleMatrices)
{
    EXPECT_NEAR(condition_number(make_system(Eigen::MatrixXd::Identity(5, 5), Eigen::VectorXd::Zero(5))), 1.0, 1e-12);
    Eigen::MatrixXd D = Eigen::MatrixXd::Zero(2, 2);
    D(0, 0) = 1;
    D(1, 1) = 10;
    EXPECT_NEAR(condition_number(make_system(D, Eigen::VectorXd::Zero(2))), 100.0, 1e-10);
}

TEST(Condition, SvdOracleAndEstimate)
{
    const Eigen::MatrixXd H = random_matrix(20, 5, 12);
    const auto s = Eigen::JacobiSVD<Eigen::MatrixXd>(H).singularValues();
    const double oracle = std::pow(s[0] / s[4], 2);
    const auto sys = make_system(H, Eigen::VectorXd::Zero(20));
    const auto exact = gram_condition(sys.H);
    EXPECT_TRUE(exact.exact);
    EXPECT_NEAR(exact.value, oracle, 1e-6 * oracle);

    SolveOptions est;
    est.exact_condition_limit = 0;
    const auto approx = gram_condition(sys.H, est);
    EXPECT_FALSE(approx.exact);
    EXPECT_GE(approx.value, oracle / 2);
    EXPECT_LE(approx.value, oracle * 2);

    est.dense_limit = 0;
    const auto sparse = gram_condition(sys.H, est);
    EXPECT_GE(sparse.value, oracle / 2);
    EXPECT_LE(sparse.value, oracle * 2);
}

TEST(Condition, RankThreshold)
{
    EXPECT_TRUE(numerically_rank_deficient(0.0, 1.0, 10));
    EXPECT_TRUE(numerically_rank_deficient(1e-16, 1.0, 10));
    EXPECT_FALSE(numerically_rank_deficient(1e-12, 1.0, 10));
}

TEST(Errors, Summaries)
{
    const auto s = summarize_errors({3.0, -4.0});
    EXPECT_DOUBLE_EQ(s.emax, 4.0);
    EXPECT_NEAR(s.rms, std::sqrt(12.5), 1e-15);
    EXPECT_EQ(s.count, 2u);
    const auto z = summarize_errors({});
    EXPECT_EQ(z.emax, 0.0);
    EXPECT_EQ(z.rms, 0.0);
}

TEST(Errors, SplineOffsets)
{
    SolverConfig cfg;
    cfg.degrees = {1, 1, 1};
    cfg.m = 3;
    const auto space = build_space(Box::unit(), cfg);
    // Partition of unity: all-ones coefficients give s = 1.
    const Eigen::VectorXd ones = Eigen::VectorXd::Ones(space_dimension(space));
    const auto pts = grid_points(Box::unit(), 6);
    const auto exact = evaluate_errors(space, ones, [](const Point3&) { return 1.0; }, pts);
    EXPECT_NEAR(exact.emax, 0.0, 1e-15);
    const auto off = evaluate_errors(space, ones, [](const Point3&) { return 1.0 - 1e-3; }, pts);
    EXPECT_NEAR(off.emax, 1e-3, 1e-15);
    EXPECT_NEAR(off.rms, 1e-3, 1e-15);
    EXPECT_LE(off.rms, off.emax);
}

TEST(Rates, Examples)
{
    EXPECT_NEAR(*convergence_rate(2e-3, 1e-3, 3, 5), 1.0, 1e-12);
    EXPECT_NEAR(*convergence_rate(16.0, 1.0, 3, 5), 4.0, 1e-12);
    EXPECT_NEAR(*convergence_rate(5.99e-4, 1.78e-4, 5, 6), 5.44, 0.01);
    EXPECT_FALSE(convergence_rate(0.0, 1e-3, 5, 6).has_value());
    EXPECT_THROW(convergence_rate(1.0, 1.0, 6, 5), InvalidArgument);
}

TEST(Rates, SyntheticPowerLaws)
{
    for (double p = 1.0; p <= 8.0; p += 0.5) {
        for (int m = 3; m < 12; ++m) {
            const double C = 3.7;
            const double ec = C * std::pow(1.0 / (m - 1), p);
            const double ef = C * std::pow(1.0 / m, p);
            EXPECT_NEAR(*convergence_rate(ec, ef, m, m + 1), p, 1e-12);
        }
    }
}
