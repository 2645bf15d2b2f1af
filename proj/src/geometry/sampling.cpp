#include "ipbm/geometry.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include <omp.h>

namespace ipbm {

PointSet sample_surface(const TriangleMesh& mesh, std::size_t n, std::uint64_t seed)
{
    IPBM_REQUIRE(n >= 1, "sample_surface: n must be >= 1");
    IPBM_REQUIRE(!mesh.empty(), "sample_surface: empty mesh");
    mesh.validate();

    std::vector<double> areas(mesh.size());
    double total = 0.0;
    for (std::size_t t = 0; t < mesh.size(); ++t) {
        areas[t] = mesh.triangle_area(t);
        total += areas[t];
    }
    if (!(total > 0.0)) throw InvalidArgument("sample_surface: all triangles are degenerate (zero total area)");

    std::mt19937_64 rng(seed);
    std::discrete_distribution<std::size_t> pick(areas.begin(), areas.end());
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    PointSet out;
    out.role = PointRole::boundary;
    out.points.reserve(n);
    for (std::size_t s = 0; s < n; ++s) {
        const auto& tri = mesh.triangles[pick(rng)];
        const double r1 = std::sqrt(unit(rng));
        const double r2 = unit(rng);
        out.points.push_back((1.0 - r1) * mesh.vertices[tri[0]] + r1 * (1.0 - r2) * mesh.vertices[tri[1]] +
                             r1 * r2 * mesh.vertices[tri[2]]);
    }
    return out;
}

PointSet farthest_point_downsample_from(const PointSet& cloud, std::size_t nb, std::size_t start)
{
    IPBM_REQUIRE(!cloud.empty(), "farthest_point_downsample: empty cloud");
    IPBM_REQUIRE(nb >= 1, "farthest_point_downsample: nb must be >= 1");
    IPBM_REQUIRE(nb <= cloud.size(), "farthest_point_downsample: nb exceeds cloud size");
    IPBM_REQUIRE(start < cloud.size(), "farthest_point_downsample: start index out of range");

    const auto n = static_cast<std::int64_t>(cloud.size());
    const auto& pts = cloud.points;
    std::vector<double> dist2(cloud.size());
    std::vector<char> taken(cloud.size(), 0);

    PointSet out;
    out.role = cloud.role;
    out.points.reserve(nb);

    std::size_t current = start;
    taken[current] = 1;
    out.points.push_back(pts[current]);

#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < n; ++i) dist2[i] = (pts[i] - pts[current]).squaredNorm();

    while (out.size() < nb) {
        // Ties go to the lowest index so the result does not depend on the thread count.
        double best = -1.0;
        std::int64_t best_index = -1;
#pragma omp parallel
        {
            double local_best = -1.0;
            std::int64_t local_index = -1;
#pragma omp for schedule(static) nowait
            for (std::int64_t i = 0; i < n; ++i) {
                if (!taken[i] && dist2[i] > local_best) {
                    local_best = dist2[i];
                    local_index = i;
                }
            }
#pragma omp critical(ipbm_fps_argmax)
            {
                if (local_index >= 0 &&
                    (local_best > best || (local_best == best && local_index < best_index))) {
                    best = local_best;
                    best_index = local_index;
                }
            }
        }
        current = static_cast<std::size_t>(best_index);
        taken[current] = 1;
        out.points.push_back(pts[current]);
        const Point3 chosen = pts[current];
#pragma omp parallel for schedule(static)
        for (std::int64_t i = 0; i < n; ++i) {
            dist2[i] = std::min(dist2[i], (pts[i] - chosen).squaredNorm());
        }
    }
    return out;
}

PointSet farthest_point_downsample(const PointSet& cloud, std::size_t nb, std::uint64_t seed)
{
    IPBM_REQUIRE(!cloud.empty(), "farthest_point_downsample: empty cloud");
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<std::size_t> pick(0, cloud.size() - 1);
    return farthest_point_downsample_from(cloud, nb, pick(rng));
}

PointSet fibonacci_sphere(const Sphere& sphere, std::size_t n)
{
    IPBM_REQUIRE(n >= 1, "fibonacci_sphere: n must be >= 1");
    const double golden_angle = std::numbers::pi * (3.0 - std::sqrt(5.0));
    PointSet out;
    out.role = PointRole::boundary;
    out.points.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double z = 1.0 - (2.0 * static_cast<double>(i) + 1.0) / static_cast<double>(n);
        const double rho = std::sqrt(std::max(0.0, 1.0 - z * z));
        const double phi = golden_angle * static_cast<double>(i);
        out.points.push_back(sphere.center + sphere.radius * Point3(rho * std::cos(phi), rho * std::sin(phi), z));
    }
    return out;
}

PointSet grid_points(const Box& box, int n)
{
    IPBM_REQUIRE(n >= 2, "grid_points: need at least 2 points per axis");
    PointSet out;
    out.role = PointRole::evaluation;
    out.points.reserve(static_cast<std::size_t>(n) * n * n);
    const Point3 step = box.edges() / static_cast<double>(n - 1);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            for (int k = 0; k < n; ++k) {
                out.points.push_back(box.lo + Point3(i * step.x(), j * step.y(), k * step.z()));
            }
        }
    }
    return out;
}

namespace {
constexpr std::size_t kDenseCloudSize = 50000;
}

PointSet boundary_points(const Domain& domain, std::size_t nb, std::uint64_t seed)
{
    const std::size_t cloud_size = std::max(kDenseCloudSize, nb);
    PointSet cloud;
    if (const auto* sphere = std::get_if<Sphere>(&domain.surface)) {
        cloud = fibonacci_sphere(*sphere, cloud_size);
    } else {
        cloud = sample_surface(std::get<TriangleMesh>(domain.surface), cloud_size, seed);
    }
    PointSet b = farthest_point_downsample(cloud, nb, seed + 1);
    b.role = PointRole::boundary;
    return b;
}

PointSet evaluation_points(const Domain& domain, int grid_n, std::size_t boundary_count, std::uint64_t seed)
{
    PointSet out = classify_interior(domain, grid_points(domain.bbox, grid_n)).inside;
    out.role = PointRole::evaluation;
    if (boundary_count > 0) {
        PointSet rim;
        if (const auto* sphere = std::get_if<Sphere>(&domain.surface)) {
            rim = fibonacci_sphere(*sphere, boundary_count);
        } else {
            rim = sample_surface(std::get<TriangleMesh>(domain.surface), boundary_count, seed + 7);
        }
        out.points.insert(out.points.end(), rim.points.begin(), rim.points.end());
    }
    return out;
}

PointDeduplicator::PointDeduplicator(const Point3& origin, double scale, double tol)
    : origin_(origin), step_(scale * tol)
{
    IPBM_REQUIRE(step_ > 0.0, "PointDeduplicator: tolerance must be positive");
}

std::size_t PointDeduplicator::KeyHash::operator()(const Key& k) const
{
    std::uint64_t h = static_cast<std::uint64_t>(k.x) * 0x9E3779B97F4A7C15ull;
    h ^= static_cast<std::uint64_t>(k.y) + 0x9E3779B97F4A7C15ull + (h << 6) + (h >> 2);
    h ^= static_cast<std::uint64_t>(k.z) + 0x9E3779B97F4A7C15ull + (h << 6) + (h >> 2);
    return static_cast<std::size_t>(h);
}

std::size_t PointDeduplicator::insert(const Point3& p, bool* inserted)
{
    const Point3 u = (p - origin_) / step_;
    const Key key{std::llround(u.x()), std::llround(u.y()), std::llround(u.z())};
    const auto [it, fresh] = ids_.try_emplace(key, points_.size());
    if (fresh) points_.push_back(p);
    if (inserted) *inserted = fresh;
    return it->second;
}

}  // namespace ipbm
