#include "ipbm/geometry.hpp"

#include <cmath>
#include <numbers>

namespace ipbm {

double TriangleMesh::triangle_area(std::size_t t) const
{
    const auto& tri = triangles[t];
    const Point3& a = vertices[tri[0]];
    return 0.5 * (vertices[tri[1]] - a).cross(vertices[tri[2]] - a).norm();
}

Box TriangleMesh::bounding_box() const { return ipbm::bounding_box(vertices); }

std::map<std::pair<int, int>, int> TriangleMesh::edge_census() const
{
    std::map<std::pair<int, int>, int> census;
    for (const auto& tri : triangles) {
        for (int e = 0; e < 3; ++e) {
            int a = tri[e];
            int b = tri[(e + 1) % 3];
            if (a > b) std::swap(a, b);
            ++census[{a, b}];
        }
    }
    return census;
}

bool TriangleMesh::is_watertight() const
{
    if (triangles.empty()) return false;
    for (const auto& [edge, count] : edge_census()) {
        if (count != 2) return false;
    }
    return true;
}

void TriangleMesh::validate() const
{
    const int n = static_cast<int>(vertices.size());
    for (std::size_t t = 0; t < triangles.size(); ++t) {
        for (int v : triangles[t]) {
            if (v < 0 || v >= n) {
                throw InvalidArgument("mesh: triangle " + std::to_string(t) + " references vertex " +
                                      std::to_string(v) + " of " + std::to_string(n));
            }
        }
    }
}

Box bounding_box(const std::vector<Point3>& points)
{
    IPBM_REQUIRE(!points.empty(), "bounding_box: empty point list");
    Box box{points.front(), points.front()};
    for (const auto& p : points) {
        box.lo = box.lo.cwiseMin(p);
        box.hi = box.hi.cwiseMax(p);
    }
    return box;
}

SimilarityTransform unit_box_transform(const Box& bbox)
{
    const double edge = bbox.max_edge();
    if (!(edge > 0.0)) throw InvalidArgument("scale_to_unit_box: bounding box has zero extent in all axes");
    return SimilarityTransform{1.0 / edge, bbox.lo};
}

std::pair<TriangleMesh, SimilarityTransform> scale_to_unit_box(const TriangleMesh& mesh)
{
    IPBM_REQUIRE(!mesh.vertices.empty(), "scale_to_unit_box: empty mesh");
    const SimilarityTransform transform = unit_box_transform(mesh.bounding_box());
    TriangleMesh scaled = mesh;
    for (auto& v : scaled.vertices) v = transform.apply(v);
    return {std::move(scaled), transform};
}

std::pair<PointSet, SimilarityTransform> scale_to_unit_box(const PointSet& cloud)
{
    IPBM_REQUIRE(!cloud.empty(), "scale_to_unit_box: empty point set");
    const SimilarityTransform transform = unit_box_transform(bounding_box(cloud.points));
    PointSet scaled = cloud;
    for (auto& p : scaled.points) p = transform.apply(p);
    return {std::move(scaled), transform};
}

Domain Domain::unit_sphere()
{
    Domain domain;
    domain.bbox = Box::unit();
    domain.surface = Sphere{domain.bbox.center(), 0.5};
    return domain;
}

Domain Domain::from_mesh(const TriangleMesh& mesh)
{
    mesh.validate();
    auto [scaled, transform] = scale_to_unit_box(mesh);
    Domain domain;
    domain.bbox = scaled.bounding_box();
    domain.surface = std::move(scaled);
    domain.transform = transform;
    return domain;
}

TriangleMesh make_box_mesh(const Box& box)
{
    TriangleMesh mesh;
    for (int c = 0; c < 8; ++c) {
        mesh.vertices.emplace_back((c & 1) ? box.hi.x() : box.lo.x(), (c & 2) ? box.hi.y() : box.lo.y(),
                                   (c & 4) ? box.hi.z() : box.lo.z());
    }
    // Outward-facing quads as corner-bit indices, each split into two triangles.
    const int quads[6][4] = {{0, 2, 3, 1}, {4, 5, 7, 6}, {0, 1, 5, 4}, {2, 6, 7, 3}, {0, 4, 6, 2}, {1, 3, 7, 5}};
    for (const auto& q : quads) {
        mesh.triangles.push_back({q[0], q[1], q[2]});
        mesh.triangles.push_back({q[0], q[2], q[3]});
    }
    return mesh;
}

TriangleMesh make_icosphere(const Point3& center, double radius, int subdivisions)
{
    IPBM_REQUIRE(radius > 0 && subdivisions >= 0, "make_icosphere: bad radius or subdivision count");
    const double t = (1.0 + std::sqrt(5.0)) / 2.0;
    std::vector<Point3> v = {{-1, t, 0}, {1, t, 0}, {-1, -t, 0}, {1, -t, 0}, {0, -1, t}, {0, 1, t},
                             {0, -1, -t}, {0, 1, -t}, {t, 0, -1}, {t, 0, 1}, {-t, 0, -1}, {-t, 0, 1}};
    for (auto& p : v) p.normalize();
    std::vector<std::array<int, 3>> f = {{0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11},
                                         {1, 5, 9},  {5, 11, 4}, {11, 10, 2}, {10, 7, 6}, {7, 1, 8},
                                         {3, 9, 4},  {3, 4, 2},  {3, 2, 6},   {3, 6, 8},  {3, 8, 9},
                                         {4, 9, 5},  {2, 4, 11}, {6, 2, 10},  {8, 6, 7},  {9, 8, 1}};
    for (int level = 0; level < subdivisions; ++level) {
        std::map<std::pair<int, int>, int> midpoint;
        auto mid = [&](int a, int b) {
            const auto key = std::minmax(a, b);
            const auto it = midpoint.find(key);
            if (it != midpoint.end()) return it->second;
            v.push_back((v[a] + v[b]).normalized());
            const int index = static_cast<int>(v.size()) - 1;
            midpoint.emplace(key, index);
            return index;
        };
        std::vector<std::array<int, 3>> next;
        next.reserve(4 * f.size());
        for (const auto& tri : f) {
            const int ab = mid(tri[0], tri[1]);
            const int bc = mid(tri[1], tri[2]);
            const int ca = mid(tri[2], tri[0]);
            next.push_back({tri[0], ab, ca});
            next.push_back({tri[1], bc, ab});
            next.push_back({tri[2], ca, bc});
            next.push_back({ab, bc, ca});
        }
        f = std::move(next);
    }
    TriangleMesh mesh;
    mesh.vertices.reserve(v.size());
    for (const auto& p : v) mesh.vertices.push_back(center + radius * p);
    mesh.triangles = std::move(f);
    return mesh;
}

TriangleMesh make_torus_mesh(const Point3& center, double R, double r, int n_major, int n_minor)
{
    IPBM_REQUIRE(R > r && r > 0 && n_major >= 3 && n_minor >= 3, "make_torus_mesh: bad parameters");
    TriangleMesh mesh;
    const double two_pi = 2.0 * std::numbers::pi;
    for (int i = 0; i < n_major; ++i) {
        const double u = two_pi * i / n_major;
        for (int j = 0; j < n_minor; ++j) {
            const double w = two_pi * j / n_minor;
            const double rho = R + r * std::cos(w);
            mesh.vertices.push_back(center + Point3(rho * std::cos(u), rho * std::sin(u), r * std::sin(w)));
        }
    }
    auto id = [&](int i, int j) { return (i % n_major) * n_minor + (j % n_minor); };
    for (int i = 0; i < n_major; ++i) {
        for (int j = 0; j < n_minor; ++j) {
            mesh.triangles.push_back({id(i, j), id(i + 1, j), id(i + 1, j + 1)});
            mesh.triangles.push_back({id(i, j), id(i + 1, j + 1), id(i, j + 1)});
        }
    }
    return mesh;
}

}  // namespace ipbm
