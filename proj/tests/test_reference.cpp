// Parallel kernels against their serial brute-force counterparts.

#include "ipbm/reference.hpp"

#include <gtest/gtest.h>

#include <Eigen/Dense>

#include <omp.h>

#include <random>

using namespace ipbm;

namespace {

SolverConfig config(SpaceKind space, int d, int m, Method method)
{
    SolverConfig c;
    c.space = space;
    c.method = method;
    c.degrees = {d, d, d};
    c.m = m;
    return c;
}

double max_diff(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) { return (a - b).cwiseAbs().maxCoeff(); }

struct ThreadGuard {
    int saved = omp_get_max_threads();
    ~ThreadGuard() { omp_set_num_threads(saved); }
};

}  // namespace

class AssemblyVsReference : public ::testing::TestWithParam<std::tuple<SpaceKind, Method, const char*>> {};

TEST_P(AssemblyVsReference, SameSystem)
{
    const auto [kind, method, op] = GetParam();
    const auto cfg = kind == SpaceKind::tensor_product ? config(kind, 3, 4, method) : config(kind, 3, 3, method);
    const auto space = build_space(Box::unit(), cfg);
    const auto bvp = make_preset("sin5", op);
    const auto B = boundary_points(Domain::unit_sphere(), 150, 42);
    LinearSystem fast;
    reference::DenseSystem slow;
    if (method == Method::ipbf) {
        fast = assemble_ipbf(space, bvp, B, cfg);
        slow = reference::assemble_ipbf(space, bvp, B, cfg);
    } else {
        const auto gamma = collocation_points(space, cfg);
        fast = assemble_ipbc(space, bvp, gamma, B, cfg);
        slow = reference::assemble_ipbc(space, bvp, gamma, B, cfg);
    }
    const Eigen::MatrixXd H(fast.H);
    ASSERT_EQ(H.rows(), slow.H.rows());
    ASSERT_EQ(H.cols(), slow.H.cols());
    EXPECT_LE(max_diff(H, slow.H), 1e-12 * slow.H.cwiseAbs().maxCoeff());
    EXPECT_LE((fast.r - slow.r).cwiseAbs().maxCoeff(), 1e-12 * std::max(1.0, slow.r.cwiseAbs().maxCoeff()));
}

INSTANTIATE_TEST_SUITE_P(
    Kernels, AssemblyVsReference,
    ::testing::Values(std::make_tuple(SpaceKind::tensor_product, Method::ipbf, "laplace"),
                      std::make_tuple(SpaceKind::tensor_product, Method::ipbf, "var-full"),
                      std::make_tuple(SpaceKind::tensor_product, Method::ipbc, "var-full"),
                      std::make_tuple(SpaceKind::type5, Method::ipbf, "laplace"),
                      std::make_tuple(SpaceKind::type5, Method::ipbf, "var-full"),
                      std::make_tuple(SpaceKind::type5, Method::ipbc, "var-full")));

TEST(Reference, FarthestPointSampling)
{
    const auto cloud = sample_surface(make_icosphere(Point3::Constant(0.5), 0.5, 2), 1500, 3);
    for (std::size_t start : {std::size_t{0}, std::size_t{17}, std::size_t{1499}}) {
        const auto fast = farthest_point_downsample_from(cloud, 200, start);
        const auto slow = reference::farthest_point_downsample_from(cloud, 200, start);
        ASSERT_EQ(fast.size(), slow.size());
        for (std::size_t i = 0; i < fast.size(); ++i) EXPECT_EQ(fast[i], slow[i]) << "index " << i;
    }
}

TEST(Reference, InsideFlags)
{
    const auto torus = make_torus_mesh(Point3::Constant(0.5), 0.3, 0.12, 24, 12);
    const auto pts = grid_points(Box::unit(), 14);
    EXPECT_EQ(mesh_inside_flags(torus, pts.points), reference::mesh_inside_flags(torus, pts.points));
    const auto sphere = make_icosphere(Point3::Constant(0.5), 0.45, 2);
    EXPECT_EQ(mesh_inside_flags(sphere, pts.points), reference::mesh_inside_flags(sphere, pts.points));
}

TEST(Reference, SplineEvaluation)
{
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    std::vector<Point3> pts;
    for (int i = 0; i < 300; ++i) pts.emplace_back(U(rng), U(rng), U(rng));
    for (SpaceKind kind : {SpaceKind::tensor_product, SpaceKind::type5}) {
        const auto cfg = config(kind, 3, 3, Method::ipbf);
        const auto space = build_space(Box::unit(), cfg);
        Eigen::VectorXd c(space_dimension(space));
        for (int i = 0; i < c.size(); ++i) c[i] = U(rng) - 0.5;
        const auto fast = eval_spline(space, c, pts);
        const auto slow = reference::eval_spline(space, c, pts);
        for (std::size_t i = 0; i < pts.size(); ++i) EXPECT_NEAR(fast[i], slow[i], 1e-13);
        for (std::size_t i = 0; i < 20; ++i) {
            for (const Deriv d : deriv::all) {
                EXPECT_NEAR(eval_spline(space, c, pts[i], d), reference::eval_spline(space, c, pts[i], d),
                            1e-10 * std::max(1.0, std::abs(reference::eval_spline(space, c, pts[i], d))));
            }
        }
        auto u = [](const Point3& p) { return std::sin(p.x()) * p.y(); };
        PointSet ps;
        ps.points = pts;
        const auto e1 = evaluate_errors(space, c, u, ps);
        const auto e2 = reference::evaluate_errors(space, c, u, ps);
        EXPECT_NEAR(e1.emax, e2.emax, 1e-13);
        EXPECT_NEAR(e1.rms, e2.rms, 1e-13);
    }
}

TEST(Determinism, ThreadCountDoesNotChangeResults)
{
    ThreadGuard guard;
    auto run = [](int threads) {
        omp_set_num_threads(threads);
        const auto cfg = config(SpaceKind::type5, 3, 3, Method::ipbf);
        const auto space = build_space(Box::unit(), cfg);
        const auto B = boundary_points(Domain::unit_sphere(), 300, 42);
        const auto sys = assemble_ipbf(space, make_preset("sin5", "var-full"), B, cfg);
        const auto E = build_smoothness_matrix(std::get<S0dSpace>(space));
        const auto cloud = sample_surface(make_icosphere(Point3::Constant(0.5), 0.5, 2), 800, 1);
        const auto fps = farthest_point_downsample(cloud, 100, 9);
        return std::make_tuple(Eigen::MatrixXd(sys.H), sys.r, Eigen::MatrixXd(E), fps.points);
    };
    const auto one = run(1);
    const auto four = run(4);
    EXPECT_EQ(max_diff(std::get<0>(one), std::get<0>(four)), 0.0);
    EXPECT_EQ((std::get<1>(one) - std::get<1>(four)).norm(), 0.0);
    EXPECT_EQ(max_diff(std::get<2>(one), std::get<2>(four)), 0.0);
    EXPECT_EQ(std::get<3>(one), std::get<3>(four));
}
