#pragma once

/**
 * @file tet_spline.hpp
 * @brief Type-5 tetrahedral partitions and continuous splines in Bernstein-Bezier form.
 *
 * The bounding box is cut into (m-1)^3 subboxes and each subbox into five
 * tetrahedra. Coefficients of S^0_d live at the domain points
 * (i v1 + j v2 + k v3 + l v4) / d; coincident domain points of neighbouring
 * tetrahedra share one global coefficient, which is what makes the space C^0.
 * C^1 continuity is imposed weakly through the smoothness matrix E.
 */

#include "ipbm/core.hpp"
#include "ipbm/tp_spline.hpp"

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include <array>
#include <functional>
#include <vector>

namespace ipbm {

using SparseRowMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;

class Tetrahedron {
public:
    /// Throws InvalidArgument for a (numerically) flat tetrahedron.
    explicit Tetrahedron(const std::array<Point3, 4>& vertices);

    const std::array<Point3, 4>& vertices() const { return v_; }
    const Point3& vertex(int i) const { return v_[i]; }
    double volume() const { return volume_; }

    Eigen::Vector4d barycentric(const Point3& p) const;
    /// Row m is the (constant) Cartesian gradient of barycentric coordinate b_m.
    const Eigen::Matrix<double, 4, 3>& barycentric_gradients() const { return grad_; }
    bool contains(const Point3& p, double tol = 1e-12) const;

private:
    std::array<Point3, 4> v_;
    Eigen::Matrix3d inverse_;  ///< maps p - v0 to (b1, b2, b3)
    Eigen::Matrix<double, 4, 3> grad_;
    double volume_ = 0.0;
};

/// The multi-indices (i, j, k, l), i + j + k + l = d, in descending lexicographic order.
class BernsteinIndexSet {
public:
    explicit BernsteinIndexSet(int degree);

    int degree() const { return degree_; }
    int size() const { return static_cast<int>(indices_.size()); }
    const std::array<int, 4>& operator[](int n) const { return indices_[n]; }
    const std::vector<std::array<int, 4>>& indices() const { return indices_; }
    /// Position of (i, j, k, d-i-j-k); -1 when any entry is negative.
    int position(int i, int j, int k) const;
    int position(const std::array<int, 4>& a) const { return position(a[0], a[1], a[2]); }

private:
    int degree_;
    std::vector<std::array<int, 4>> indices_;
    std::vector<int> lookup_;
};

std::vector<std::array<int, 4>> bernstein_indices(int d);

/// Domain points of `tet`, one per multi-index of bernstein_indices(d).
std::vector<Point3> domain_points(const Tetrahedron& tet, int d);

/// A face shared by two tetrahedra.
struct InteriorFace {
    std::array<int, 3> vertices{};  ///< sorted global vertex ids
    std::array<int, 2> tets{};
    std::array<int, 2> opposite{};  ///< vertex of tets[s] not on the face
};

class TetPartition {
public:
    const Box& bbox() const { return bbox_; }
    int grid_lines() const { return m_; }
    double mesh_size() const { return 1.0 / (m_ - 1); }
    const std::vector<Point3>& vertices() const { return vertices_; }
    const std::vector<std::array<int, 4>>& tets() const { return tets_; }
    int tet_count() const { return static_cast<int>(tets_.size()); }
    const Tetrahedron& tet(int t) const { return geometry_[t]; }
    const std::vector<InteriorFace>& interior_faces() const { return faces_; }
    int boundary_face_count() const { return boundary_faces_; }
    double total_volume() const;

    /// Index of a tetrahedron containing p (p inside the box within kBoxTolerance).
    int locate(const Point3& p) const;

private:
    friend TetPartition build_type5_partition(const Box& bbox, int m);

    Box bbox_;
    int m_ = 2;
    std::vector<Point3> vertices_;
    std::vector<std::array<int, 4>> tets_;
    std::vector<Tetrahedron> geometry_;
    std::vector<InteriorFace> faces_;
    int boundary_faces_ = 0;
};

/// m grid lines per axis; the two mirror five-splits alternate by global corner parity.
TetPartition build_type5_partition(const Box& bbox, int m);

class S0dSpace {
public:
    const TetPartition& partition() const { return partition_; }
    int degree() const { return indices_.degree(); }
    const BernsteinIndexSet& indices() const { return indices_; }
    int dimension() const { return static_cast<int>(points_.size()); }
    int local_count() const { return indices_.size(); }
    /// Global coefficient index of local Bernstein index n in tetrahedron t.
    int global_index(int t, int n) const { return local_to_global_[static_cast<std::size_t>(t) * local_count() + n]; }
    const int* tet_dofs(int t) const { return &local_to_global_[static_cast<std::size_t>(t) * local_count()]; }
    const std::vector<Point3>& domain_points() const { return points_; }
    double mesh_size() const { return partition_.mesh_size(); }

private:
    friend S0dSpace build_s0d_space(const TetPartition& partition, int d);

    S0dSpace(TetPartition partition, int d) : partition_(std::move(partition)), indices_(d) {}

    TetPartition partition_;
    BernsteinIndexSet indices_;
    std::vector<Point3> points_;
    std::vector<int> local_to_global_;
};

/// Global domain points are deduplicated on a 1e-10 grid (bbox units).
S0dSpace build_s0d_space(const TetPartition& partition, int d);

/// Evaluates all Bernstein polynomials of one degree, with derivatives, on any tetrahedron.
class BernsteinEvaluator {
public:
    explicit BernsteinEvaluator(int degree);

    int degree() const { return d_; }
    int size() const { return set_d_.size(); }
    const BernsteinIndexSet& indices() const { return set_d_; }
    /// Fills out.ders[slot] for every derivative of order <= max_order; out.index is 0..size-1.
    void evaluate(const Tetrahedron& tet, const Point3& p, int max_order, ActiveBasis& out) const;

private:
    int d_;
    BernsteinIndexSet set_d_, set_d1_, set_d2_;
    std::vector<double> coef_d_, coef_d1_, coef_d2_;  ///< multinomial coefficients
    std::vector<std::array<int, 4>> down1_;            ///< position of alpha - e_m in set_d1_
    std::vector<std::array<int, 10>> down2_;           ///< position of alpha - e_m - e_n in set_d2_, m <= n
};

/// Values (or one derivative) of all C(d+3,3) Bernstein polynomials at p.
std::vector<double> eval_bernstein(const Tetrahedron& tet, int d, const Point3& p, Deriv deriv = deriv::value);

double eval_s0d_spline(const S0dSpace& space, const Eigen::VectorXd& c, const Point3& p, Deriv d = deriv::value);

/// Value of the piece on tetrahedron t at p (p may lie on the closure of t).
double eval_s0d_on_tet(const S0dSpace& space, const Eigen::VectorXd& c, int t, const Point3& p,
                       Deriv d = deriv::value);

/// Batch evaluation (values only), parallel over points.
std::vector<double> eval_s0d_spline(const S0dSpace& space, const Eigen::VectorXd& c,
                                    const std::vector<Point3>& points);

/// B-coefficients of a global polynomial of degree <= d (exact up to rounding).
Eigen::VectorXd interpolate_polynomial(const S0dSpace& space, const std::function<double(const Point3&)>& u);

/// One row per interior face and (i, j, k) with i + j + k = d - 1; coefficient of the off-face point is -1.
SparseRowMatrix build_smoothness_matrix(const S0dSpace& space);

}  // namespace ipbm
