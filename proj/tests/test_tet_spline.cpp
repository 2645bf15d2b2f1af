#include "ipbm/tet_spline.hpp"

#include <gtest/gtest.h>

#include <Eigen/Dense>

#include <algorithm>
#include <map>
#include <random>
#include <set>

using namespace ipbm;

namespace {

Point3 random_in_tet(const Tetrahedron& tet, std::mt19937_64& rng)
{
    std::uniform_real_distribution<double> U(0.05, 1.0);
    Eigen::Vector4d b(U(rng), U(rng), U(rng), U(rng));
    b /= b.sum();
    Point3 p = Point3::Zero();
    for (int i = 0; i < 4; ++i) p += b[i] * tet.vertex(i);
    return p;
}

Point3 random_on_face(const TetPartition& part, const InteriorFace& f, std::mt19937_64& rng)
{
    std::uniform_real_distribution<double> U(0.05, 1.0);
    Eigen::Vector3d b(U(rng), U(rng), U(rng));
    b /= b.sum();
    return b[0] * part.vertices()[f.vertices[0]] + b[1] * part.vertices()[f.vertices[1]] +
           b[2] * part.vertices()[f.vertices[2]];
}

double max_abs(const Eigen::VectorXd& v) { return v.size() ? v.cwiseAbs().maxCoeff() : 0.0; }

}  // namespace

TEST(Type5Partition, SingleCubeVolumes)
{
    const auto part = build_type5_partition(Box::unit(), 2);
    ASSERT_EQ(part.tet_count(), 5);
    std::vector<double> vols;
    for (int t = 0; t < 5; ++t) vols.push_back(part.tet(t).volume());
    std::sort(vols.begin(), vols.end());
    for (int t = 0; t < 4; ++t) EXPECT_NEAR(vols[t], 1.0 / 6.0, 1e-15);
    EXPECT_NEAR(vols[4], 1.0 / 3.0, 1e-15);
    EXPECT_NEAR(part.total_volume(), 1.0, 1e-14);
}

TEST(Type5Partition, TetCountsAndVolumeConservation)
{
    EXPECT_EQ(build_type5_partition(Box::unit(), 5).tet_count(), 320);
    const Box box{Point3(-0.5, 0.0, 1.0), Point3(0.5, 0.7, 1.2)};
    for (int m = 2; m <= 7; ++m) {
        const auto part = build_type5_partition(box, m);
        EXPECT_EQ(part.tet_count(), 5 * (m - 1) * (m - 1) * (m - 1));
        EXPECT_NEAR(part.total_volume(), box.volume(), 1e-12 * box.volume());
        for (int t = 0; t < part.tet_count(); ++t) EXPECT_GT(part.tet(t).volume(), 0.0);
    }
    EXPECT_THROW(build_type5_partition(box, 1), InvalidArgument);
}

TEST(Type5Partition, FaceCensus)
{
    for (int m = 2; m <= 5; ++m) {
        const auto part = build_type5_partition(Box::unit(), m);
        std::map<std::array<int, 3>, int> count;
        for (const auto& t : part.tets()) {
            for (int skip = 0; skip < 4; ++skip) {
                std::array<int, 3> f{};
                for (int i = 0, k = 0; i < 4; ++i) {
                    if (i != skip) f[k++] = t[i];
                }
                std::sort(f.begin(), f.end());
                ++count[f];
            }
        }
        int interior = 0, boundary = 0;
        for (const auto& [f, c] : count) {
            ASSERT_LE(c, 2);
            if (c == 2) {
                ++interior;
                continue;
            }
            ++boundary;
            // A face seen once must lie in a bounding-box plane.
            bool on_plane = false;
            for (int ax = 0; ax < 3; ++ax) {
                for (double side : {0.0, 1.0}) {
                    bool all = true;
                    for (int v : f) all = all && std::abs(part.vertices()[v][ax] - side) < 1e-14;
                    on_plane = on_plane || all;
                }
            }
            EXPECT_TRUE(on_plane);
        }
        const int k = m - 1;
        EXPECT_EQ(boundary, 12 * k * k);
        EXPECT_EQ(interior, static_cast<int>(part.interior_faces().size()));
        EXPECT_EQ(part.boundary_face_count(), boundary);
        for (const auto& f : part.interior_faces()) {
            EXPECT_NE(f.tets[0], f.tets[1]);
            for (int s = 0; s < 2; ++s) {
                const auto& tv = part.tets()[f.tets[s]];
                EXPECT_EQ(std::count(tv.begin(), tv.end(), f.opposite[s]), 1);
                EXPECT_EQ(std::count(f.vertices.begin(), f.vertices.end(), f.opposite[s]), 0);
            }
        }
    }
}

TEST(Type5Partition, LocateFindsContainingTet)
{
    const auto part = build_type5_partition(Box::unit(), 4);
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    for (int i = 0; i < 500; ++i) {
        const Point3 p(U(rng), U(rng), U(rng));
        EXPECT_TRUE(part.tet(part.locate(p)).contains(p, 1e-12));
    }
    EXPECT_TRUE(part.tet(part.locate(Point3(1, 1, 1))).contains(Point3(1, 1, 1)));
}

TEST(DomainPoints, Counts)
{
    const Tetrahedron tet({Point3(0, 0, 0), Point3(1, 0, 0), Point3(0, 1, 0), Point3(0, 0, 1)});
    const auto p1 = domain_points(tet, 1);
    ASSERT_EQ(p1.size(), 4u);
    for (int i = 0; i < 4; ++i) EXPECT_TRUE(p1[i].isApprox(tet.vertex(i)) || p1[i].norm() < 1e-15);
    EXPECT_EQ(domain_points(tet, 2).size(), 10u);
    EXPECT_EQ(domain_points(tet, 3).size(), 20u);
    EXPECT_EQ(bernstein_indices(5).size(), 56u);
    const auto idx = bernstein_indices(2);
    EXPECT_EQ(idx.front(), (std::array<int, 4>{2, 0, 0, 0}));
    EXPECT_EQ(idx.back(), (std::array<int, 4>{0, 0, 0, 2}));
}

TEST(S0dSpace, Dimensions)
{
    const Box unit = Box::unit();
    EXPECT_EQ(build_s0d_space(build_type5_partition(unit, 5), 5).dimension(), 7981);
    EXPECT_EQ(build_s0d_space(build_type5_partition(unit, 5), 4).dimension(), 4273);
    // A single cube: C^0 space of degree d on 5 tets.
    const auto cube = build_s0d_space(build_type5_partition(unit, 2), 1);
    EXPECT_EQ(cube.dimension(), 8);
}

TEST(S0dSpace, DedupMatchesIntegerKeys)
{
    // On a type-5 partition every domain point times d (m - 1) is an integer vector.
    for (auto [m, d] : {std::pair{3, 2}, std::pair{4, 3}, std::pair{3, 5}}) {
        const auto space = build_s0d_space(build_type5_partition(Box::unit(), m), d);
        const double scale = d * (m - 1);
        std::map<std::array<long, 3>, int> key_to_global;
        for (int t = 0; t < space.partition().tet_count(); ++t) {
            const auto pts = domain_points(space.partition().tet(t), d);
            for (int n = 0; n < space.local_count(); ++n) {
                const std::array<long, 3> key{std::lround(pts[n].x() * scale), std::lround(pts[n].y() * scale),
                                              std::lround(pts[n].z() * scale)};
                const int g = space.global_index(t, n);
                const auto [it, fresh] = key_to_global.emplace(key, g);
                EXPECT_EQ(it->second, g);
                EXPECT_TRUE((space.domain_points()[g] - pts[n]).norm() < 1e-12);
            }
        }
        EXPECT_EQ(static_cast<int>(key_to_global.size()), space.dimension());
        std::set<int> globals;
        for (const auto& [k, g] : key_to_global) globals.insert(g);
        EXPECT_EQ(static_cast<int>(globals.size()), space.dimension());
    }
}

TEST(Bernstein, VertexValuesAndPartitionOfUnity)
{
    const Tetrahedron tet({Point3(0.1, 0, 0), Point3(1, 0.2, 0), Point3(0, 1, 0.1), Point3(0.2, 0.3, 1)});
    for (int d = 1; d <= 6; ++d) {
        const auto v = eval_bernstein(tet, d, tet.vertex(0));
        EXPECT_NEAR(v[0], 1.0, 1e-13);
        for (std::size_t n = 1; n < v.size(); ++n) EXPECT_NEAR(v[n], 0.0, 1e-13);
        std::mt19937_64 rng(d);
        for (int t = 0; t < 1000; ++t) {
            const auto vals = eval_bernstein(tet, d, random_in_tet(tet, rng));
            double s = 0.0;
            for (double x : vals) s += x;
            EXPECT_NEAR(s, 1.0, 1e-13);
        }
    }
}

TEST(Bernstein, DerivativesMatchFiniteDifferences)
{
    const Tetrahedron tet({Point3(0, 0, 0), Point3(0.5, 0, 0), Point3(0, 0.5, 0.1), Point3(0.1, 0.1, 0.5)});
    const int d = 4;
    std::mt19937_64 rng(3);
    const double h = 1e-6;
    for (int trial = 0; trial < 20; ++trial) {
        const Point3 p = random_in_tet(tet, rng);
        for (const Deriv der : deriv::all) {
            if (der.order() == 0) continue;
            Deriv lower = der;
            const int axis = der.z > 0 ? 2 : der.y > 0 ? 1 : 0;
            (axis == 0 ? lower.x : axis == 1 ? lower.y : lower.z) -= 1;
            Point3 e = Point3::Zero();
            e[axis] = h;
            const auto plus = eval_bernstein(tet, d, p + e, lower);
            const auto minus = eval_bernstein(tet, d, p - e, lower);
            const auto an = eval_bernstein(tet, d, p, der);
            double scale = 0.0;
            for (double v : an) scale = std::max(scale, std::abs(v));
            for (std::size_t n = 0; n < an.size(); ++n) {
                EXPECT_NEAR((plus[n] - minus[n]) / (2 * h), an[n], 1e-5 * scale);
            }
        }
    }
}

TEST(Bernstein, EvaluatorMatchesSingleDerivativeCalls)
{
    const Tetrahedron tet({Point3(0, 0, 0), Point3(1, 0, 0), Point3(0, 1, 0), Point3(0, 0, 1)});
    const BernsteinEvaluator ev(5);
    ActiveBasis ab;
    const Point3 p(0.2, 0.3, 0.1);
    ev.evaluate(tet, p, 2, ab);
    for (const Deriv der : deriv::all) {
        const auto ref = eval_bernstein(tet, 5, p, der);
        for (int n = 0; n < ev.size(); ++n) EXPECT_NEAR(ab[der][n], ref[n], 1e-11);
    }
}

TEST(S0dSpline, InterpolatesGlobalPolynomials)
{
    const auto space = build_s0d_space(build_type5_partition(Box::unit(), 3), 3);
    auto u = [](const Point3& p) { return p.x() * p.x() * p.y() - 2 * p.z() * p.z() * p.z() + p.y() + 1; };
    const auto c = interpolate_polynomial(space, u);
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    for (int i = 0; i < 200; ++i) {
        const Point3 p(U(rng), U(rng), U(rng));
        EXPECT_NEAR(eval_s0d_spline(space, c, p), u(p), 1e-12);
        EXPECT_NEAR(eval_s0d_spline(space, c, p, deriv::dzz), -12 * p.z(), 1e-9);
        EXPECT_NEAR(eval_s0d_spline(space, c, p, deriv::dxy), 2 * p.x(), 1e-9);
    }
}

TEST(Smoothness, RowStructure)
{
    const auto space = build_s0d_space(build_type5_partition(Box::unit(), 3), 3);
    const auto E = build_smoothness_matrix(space);
    const int d = space.degree();
    EXPECT_EQ(E.rows(), static_cast<Eigen::Index>(space.partition().interior_faces().size()) * d * (d + 1) / 2);
    EXPECT_EQ(E.cols(), space.dimension());
    for (Eigen::Index r = 0; r < E.rows(); ++r) {
        int nnz = 0;
        bool has_minus_one = false;
        for (SparseRowMatrix::InnerIterator it(E, r); it; ++it) {
            ++nnz;
            has_minus_one = has_minus_one || it.value() == -1.0;
        }
        EXPECT_LE(nnz, 5);
        EXPECT_TRUE(has_minus_one);
    }
}

TEST(Smoothness, PolynomialKernel)
{
    for (int d : {1, 2, 3, 5}) {
        const auto space = build_s0d_space(build_type5_partition(Box::unit(), 3), d);
        const auto E = build_smoothness_matrix(space);
        const Eigen::VectorXd lin = interpolate_polynomial(space, [](const Point3& p) { return p.x() + 2 * p.y() + 3 * p.z(); });
        EXPECT_LE(max_abs(E * lin), 1e-12);
        const Eigen::VectorXd xd = interpolate_polynomial(space, [d](const Point3& p) { return std::pow(p.x(), d); });
        EXPECT_LE(max_abs(E * xd), 1e-10);
        const Eigen::VectorXd mixed = interpolate_polynomial(space, [d](const Point3& p) {
            return std::pow(p.x() - p.z(), d) + std::pow(p.y(), d - 1) * p.z();
        });
        EXPECT_LE(max_abs(E * mixed), 1e-10);
    }
}

TEST(Smoothness, PerturbationIsDetected)
{
    const int d = 4;
    const auto space = build_s0d_space(build_type5_partition(Box::unit(), 3), d);
    const auto E = build_smoothness_matrix(space);
    Eigen::VectorXd c = interpolate_polynomial(space, [](const Point3& p) { return std::pow(p.x(), 4); });
    // (1,1,1,1) is the interior point of a tetrahedron: on no face, yet adjacent to all four.
    const int g = space.global_index(0, space.indices().position(1, 1, 1));
    c[g] += 1.0;
    double min_entry = std::numeric_limits<double>::infinity();
    for (int k = 0; k < E.outerSize(); ++k) {
        for (SparseRowMatrix::InnerIterator it(E, k); it; ++it) {
            if (it.value() != 0.0) min_entry = std::min(min_entry, std::abs(it.value()));
        }
    }
    EXPECT_GE(max_abs(E * c), min_entry - 1e-10);
    EXPECT_GT(min_entry, 0.0);
}

TEST(S0dSpline, ContinuousAcrossSharedFaces)
{
    const auto space = build_s0d_space(build_type5_partition(Box::unit(), 3), 3);
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    Eigen::VectorXd c(space.dimension());
    for (int i = 0; i < c.size(); ++i) c[i] = U(rng);
    const auto& faces = space.partition().interior_faces();
    for (int i = 0; i < 100; ++i) {
        const auto& f = faces[static_cast<std::size_t>(i * 7919) % faces.size()];
        const Point3 p = random_on_face(space.partition(), f, rng);
        EXPECT_NEAR(eval_s0d_on_tet(space, c, f.tets[0], p), eval_s0d_on_tet(space, c, f.tets[1], p), 1e-12);
    }
}

TEST(Smoothness, C1Certificate)
{
    // Random element of the kernel of E on a small partition.
    const auto space = build_s0d_space(build_type5_partition(Box::unit(), 3), 3);
    const Eigen::MatrixXd E(build_smoothness_matrix(space));
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(E, Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    int rank = 0;
    while (rank < sv.size() && sv[rank] > 1e-10 * sv[0]) ++rank;
    const Eigen::MatrixXd kernel = svd.matrixV().rightCols(space.dimension() - rank);
    ASSERT_GE(kernel.cols(), 20);  // contains at least the cubic polynomials
    std::mt19937_64 rng(6);
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    Eigen::VectorXd w(kernel.cols());
    for (int i = 0; i < w.size(); ++i) w[i] = U(rng);
    const Eigen::VectorXd c = kernel * w;
    ASSERT_LE(max_abs(E * c), 1e-12);
    for (const auto& f : space.partition().interior_faces()) {
        const Point3 p = random_on_face(space.partition(), f, rng);
        for (const Deriv der : {deriv::dx, deriv::dy, deriv::dz}) {
            EXPECT_NEAR(eval_s0d_on_tet(space, c, f.tets[0], p, der), eval_s0d_on_tet(space, c, f.tets[1], p, der),
                        1e-8);
        }
    }
}

TEST(S0dSpline, BatchMatchesPointwise)
{
    const auto space = build_s0d_space(build_type5_partition(Box::unit(), 3), 2);
    Eigen::VectorXd c = Eigen::VectorXd::LinSpaced(space.dimension(), -1.0, 2.0);
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    std::vector<Point3> pts;
    for (int i = 0; i < 200; ++i) pts.emplace_back(U(rng), U(rng), U(rng));
    const auto batch = eval_s0d_spline(space, c, pts);
    for (std::size_t i = 0; i < pts.size(); ++i) EXPECT_NEAR(batch[i], eval_s0d_spline(space, c, pts[i]), 1e-15);
}

TEST(Tetrahedron, FlatThrows)
{
    EXPECT_THROW(Tetrahedron({Point3(0, 0, 0), Point3(1, 0, 0), Point3(0, 1, 0), Point3(1, 1, 0)}), InvalidArgument);
}
