#include "ipbm/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>

namespace ipbm {

std::array<Point3, 3> parity_ray_directions()
{
    // Fixed, deliberately non-axis-aligned so grid-aligned inputs rarely graze edges.
    return {Point3(0.2357, 0.5138, 0.8254).normalized(), Point3(-0.7193, 0.3119, 0.6207).normalized(),
            Point3(0.4421, -0.8536, 0.2755).normalized()};
}

namespace {

/// Counts crossings of the ray p + t*dir (t > 0) with triangle (a, b, c).
bool ray_hits_triangle(const Point3& p, const Point3& dir, const Point3& a, const Point3& b, const Point3& c)
{
    constexpr double eps = 1e-14;
    const Point3 e1 = b - a;
    const Point3 e2 = c - a;
    const Point3 h = dir.cross(e2);
    const double det = e1.dot(h);
    if (std::abs(det) < eps) return false;
    const double inv = 1.0 / det;
    const Point3 s = p - a;
    const double u = inv * s.dot(h);
    if (u < 0.0 || u > 1.0) return false;
    const Point3 q = s.cross(e1);
    const double v = inv * dir.dot(q);
    if (v < 0.0 || u + v > 1.0) return false;
    return inv * e2.dot(q) > eps;
}

/// Triangles binned by their projection onto the plane orthogonal to one ray direction.
class ProjectedGrid {
public:
    ProjectedGrid(const TriangleMesh& mesh, const Point3& dir) : mesh_(mesh), dir_(dir)
    {
        const Point3 helper = std::abs(dir.x()) < 0.9 ? Point3::UnitX() : Point3::UnitY();
        u_ = dir.cross(helper).normalized();
        v_ = dir.cross(u_);

        const std::size_t nt = mesh.size();
        std::vector<std::array<double, 4>> rects(nt);
        lo_u_ = lo_v_ = std::numeric_limits<double>::infinity();
        double hi_u = -lo_u_;
        double hi_v = -lo_v_;
        for (std::size_t t = 0; t < nt; ++t) {
            auto& r = rects[t];
            r = {std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity(),
                 std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
            for (int vtx : mesh.triangles[t]) {
                const double pu = u_.dot(mesh.vertices[vtx]);
                const double pv = v_.dot(mesh.vertices[vtx]);
                r[0] = std::min(r[0], pu);
                r[1] = std::max(r[1], pu);
                r[2] = std::min(r[2], pv);
                r[3] = std::max(r[3], pv);
            }
            lo_u_ = std::min(lo_u_, r[0]);
            hi_u = std::max(hi_u, r[1]);
            lo_v_ = std::min(lo_v_, r[2]);
            hi_v = std::max(hi_v, r[3]);
        }
        cells_ = std::max(1, static_cast<int>(std::sqrt(static_cast<double>(nt))));
        const double pad = 1e-9 * std::max({1.0, hi_u - lo_u_, hi_v - lo_v_});
        lo_u_ -= pad;
        lo_v_ -= pad;
        size_u_ = (hi_u + pad - lo_u_) / cells_;
        size_v_ = (hi_v + pad - lo_v_) / cells_;
        bins_.resize(static_cast<std::size_t>(cells_) * cells_);
        for (std::size_t t = 0; t < nt; ++t) {
            const auto& r = rects[t];
            const int i0 = cell_u(r[0]), i1 = cell_u(r[1]);
            const int j0 = cell_v(r[2]), j1 = cell_v(r[3]);
            for (int i = i0; i <= i1; ++i) {
                for (int j = j0; j <= j1; ++j) bins_[static_cast<std::size_t>(i) * cells_ + j].push_back(static_cast<int>(t));
            }
        }
    }

    bool odd_crossings(const Point3& p) const
    {
        const double pu = u_.dot(p);
        const double pv = v_.dot(p);
        if (pu < lo_u_ || pv < lo_v_ || pu > lo_u_ + cells_ * size_u_ || pv > lo_v_ + cells_ * size_v_) return false;
        const auto& bin = bins_[static_cast<std::size_t>(cell_u(pu)) * cells_ + cell_v(pv)];
        int crossings = 0;
        for (int t : bin) {
            const auto& tri = mesh_.triangles[t];
            if (ray_hits_triangle(p, dir_, mesh_.vertices[tri[0]], mesh_.vertices[tri[1]], mesh_.vertices[tri[2]])) {
                ++crossings;
            }
        }
        return crossings % 2 == 1;
    }

private:
    int cell_u(double pu) const { return std::clamp(static_cast<int>((pu - lo_u_) / size_u_), 0, cells_ - 1); }
    int cell_v(double pv) const { return std::clamp(static_cast<int>((pv - lo_v_) / size_v_), 0, cells_ - 1); }

    const TriangleMesh& mesh_;
    Point3 dir_, u_, v_;
    double lo_u_ = 0, lo_v_ = 0, size_u_ = 1, size_v_ = 1;
    int cells_ = 1;
    std::vector<std::vector<int>> bins_;
};

}  // namespace

std::vector<char> mesh_inside_flags(const TriangleMesh& mesh, const std::vector<Point3>& points)
{
    mesh.validate();
    const auto dirs = parity_ray_directions();
    const std::array<ProjectedGrid, 3> grids = {ProjectedGrid(mesh, dirs[0]), ProjectedGrid(mesh, dirs[1]),
                                                ProjectedGrid(mesh, dirs[2])};
    std::vector<char> inside(points.size(), 0);
    const auto n = static_cast<std::int64_t>(points.size());
#pragma omp parallel for schedule(dynamic, 256)
    for (std::int64_t i = 0; i < n; ++i) {
        int votes = 0;
        for (const auto& grid : grids) votes += grid.odd_crossings(points[i]) ? 1 : 0;
        inside[i] = votes >= 2 ? 1 : 0;
    }
    return inside;
}

InteriorResult classify_interior(const Domain& domain, const PointSet& candidates)
{
    InteriorResult result;
    result.inside.role = candidates.role;
    if (const auto* sphere = std::get_if<Sphere>(&domain.surface)) {
        const double r2 = sphere->radius * sphere->radius;
        for (const auto& p : candidates.points) {
            if ((p - sphere->center).squaredNorm() < r2) result.inside.points.push_back(p);
        }
        return result;
    }
    const auto& mesh = std::get<TriangleMesh>(domain.surface);
    result.surface_watertight = mesh.is_watertight();
    const auto flags = mesh_inside_flags(mesh, candidates.points);
    for (std::size_t i = 0; i < flags.size(); ++i) {
        if (flags[i]) result.inside.points.push_back(candidates.points[i]);
    }
    return result;
}

}  // namespace ipbm
