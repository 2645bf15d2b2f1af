#pragma once

/**
 * @file geometry.hpp
 * @brief Domain descriptions: STL meshes, point clouds, analytic spheres.
 *
 * Everything here is the plumbing needed to produce the two point sets an
 * immersed solve needs: well-spaced points on the boundary surface and a dense
 * set of interior points for measuring errors. Meshes and clouds are normalized
 * so their bounding box has maximum edge one before any solve.
 */

#include "ipbm/core.hpp"

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <variant>
#include <vector>

namespace ipbm {

struct TriangleMesh {
    std::vector<Point3> vertices;
    std::vector<std::array<int, 3>> triangles;

    std::size_t size() const { return triangles.size(); }
    bool empty() const { return triangles.empty(); }

    double triangle_area(std::size_t t) const;
    Box bounding_box() const;

    /// Undirected edge -> number of incident triangles.
    std::map<std::pair<int, int>, int> edge_census() const;

    /// True when every edge is shared by exactly two triangles.
    bool is_watertight() const;

    /// Throws if any triangle references a vertex that does not exist.
    void validate() const;
};

enum class PointRole { boundary, collocation, evaluation };

struct PointSet {
    std::vector<Point3> points;
    PointRole role = PointRole::evaluation;

    std::size_t size() const { return points.size(); }
    bool empty() const { return points.empty(); }
    const Point3& operator[](std::size_t i) const { return points[i]; }
};

/// Uniform scale + translation: x -> scale * (x - origin).
struct SimilarityTransform {
    double scale = 1.0;
    Point3 origin = Point3::Zero();

    Point3 apply(const Point3& p) const { return scale * (p - origin); }
    Point3 inverse(const Point3& p) const { return p / scale + origin; }
};

struct Sphere {
    Point3 center = Point3::Constant(0.5);
    double radius = 0.5;
};

/// A curved domain immersed in its bounding box.
struct Domain {
    Box bbox = Box::unit();
    std::variant<Sphere, TriangleMesh> surface = Sphere{};
    SimilarityTransform transform;

    /// Ball of radius 0.5 centred in the unit cube.
    static Domain unit_sphere();

    /// Normalizes the mesh to a unit-max-edge box anchored at the origin.
    static Domain from_mesh(const TriangleMesh& mesh);

    bool is_analytic_sphere() const { return std::holds_alternative<Sphere>(surface); }
};

// ---------------------------------------------------------------------------
// STL I/O

/// Raised for malformed STL input; the message carries the byte offset or line.
class StlParseError : public Error {
public:
    using Error::Error;
};

/// Reads ASCII or binary STL. Vertices closer than `dedup_tol` (max-norm) merge.
TriangleMesh load_stl(const std::filesystem::path& path, double dedup_tol = 1e-12);
TriangleMesh read_stl(std::istream& in, double dedup_tol = 1e-12);

void write_stl_binary(const std::filesystem::path& path, const TriangleMesh& mesh);
void write_stl_ascii(const std::filesystem::path& path, const TriangleMesh& mesh);

/// Plain-text clouds, one "x y z" triple per line. Blank lines and '#' comments skipped.
PointSet read_point_cloud(const std::filesystem::path& path, PointRole role = PointRole::boundary);
void write_point_cloud(const std::filesystem::path& path, const PointSet& cloud);

// ---------------------------------------------------------------------------
// Normalization

std::pair<TriangleMesh, SimilarityTransform> scale_to_unit_box(const TriangleMesh& mesh);
std::pair<PointSet, SimilarityTransform> scale_to_unit_box(const PointSet& cloud);
SimilarityTransform unit_box_transform(const Box& bbox);
Box bounding_box(const std::vector<Point3>& points);

// ---------------------------------------------------------------------------
// Point generation

/// Area-weighted uniform sampling of the surface; deterministic per seed.
PointSet sample_surface(const TriangleMesh& mesh, std::size_t n, std::uint64_t seed);

/// Greedy max-min selection of nb points; the start point is drawn from the seed.
PointSet farthest_point_downsample(const PointSet& cloud, std::size_t nb, std::uint64_t seed);

/// Same, with an explicit start index.
PointSet farthest_point_downsample_from(const PointSet& cloud, std::size_t nb, std::size_t start);

/// Spherical Fibonacci lattice, nearly uniform on the sphere.
PointSet fibonacci_sphere(const Sphere& sphere, std::size_t n);

struct InteriorResult {
    PointSet inside;
    bool surface_watertight = true;  ///< false: mesh had open edges, result may be unreliable
};

/// Points strictly inside the domain surface (ray parity with majority vote for meshes).
InteriorResult classify_interior(const Domain& domain, const PointSet& candidates);

/// Per-candidate membership flags for a mesh; the parallel kernel behind classify_interior.
std::vector<char> mesh_inside_flags(const TriangleMesh& mesh, const std::vector<Point3>& points);

/// The three fixed ray directions used for parity voting.
std::array<Point3, 3> parity_ray_directions();

/// Regular grid of n^3 candidates over the box (endpoints included).
PointSet grid_points(const Box& box, int n);

/// Well-spaced boundary points B: dense surface cloud, then farthest-point downsampling.
PointSet boundary_points(const Domain& domain, std::size_t nb, std::uint64_t seed);

/// Interior grid points plus a boundary sample, for error measurement.
PointSet evaluation_points(const Domain& domain, int grid_n, std::size_t boundary_count,
                           std::uint64_t seed);

/// Merges points that agree after quantization to `tol * scale` relative to `origin`.
class PointDeduplicator {
public:
    PointDeduplicator(const Point3& origin, double scale, double tol);

    /// Id of p (first-seen order); `inserted` tells whether p was new.
    std::size_t insert(const Point3& p, bool* inserted = nullptr);
    const std::vector<Point3>& points() const { return points_; }

private:
    struct Key {
        std::int64_t x, y, z;
        bool operator==(const Key&) const = default;
    };
    struct KeyHash {
        std::size_t operator()(const Key& k) const;
    };

    Point3 origin_;
    double step_;
    std::vector<Point3> points_;
    std::unordered_map<Key, std::size_t, KeyHash> ids_;
};

// ---------------------------------------------------------------------------
// Test shapes

TriangleMesh make_box_mesh(const Box& box);
TriangleMesh make_icosphere(const Point3& center, double radius, int subdivisions);
/// Torus around the z axis through `center`; major radius R, minor radius r.
TriangleMesh make_torus_mesh(const Point3& center, double R, double r, int n_major, int n_minor);

}  // namespace ipbm
