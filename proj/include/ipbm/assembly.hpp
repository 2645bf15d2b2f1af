#pragma once

/**
 * @file assembly.hpp
 * @brief Overdetermined systems H c = r for the Galerkin (IPBF) and collocation (IPBC) methods.
 *
 * Rows come in blocks, always in this order:
 *   galerkin | collocation   one per basis function / collocation point
 *   boundary                 lambda * s(xi) = lambda * g(xi)
 *   smoothness (type5 only)  lambda_S * E c = 0
 */

#include "ipbm/geometry.hpp"
#include "ipbm/problems.hpp"
#include "ipbm/tet_spline.hpp"
#include "ipbm/tp_spline.hpp"

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include <iosfwd>
#include <string>
#include <variant>
#include <vector>

namespace ipbm {

enum class Method { ipbf, ipbc };
enum class SpaceKind { tensor_product, type5 };

std::string to_string(Method m);
std::string to_string(SpaceKind s);
Method parse_method(const std::string& s);
SpaceKind parse_space_kind(const std::string& s);

struct SolverConfig {
    Method method = Method::ipbf;
    SpaceKind space = SpaceKind::tensor_product;
    std::array<int, 3> degrees{4, 4, 4};  ///< type5 uses degrees[0]
    int m = 5;
    double lambda = 0.01;
    double lambda_s = 0.01;
    int nb = 1000;
    int m_c = 3;
    int d_c = 3;
    int box_quad_points = 0;  ///< per axis; 0 means degree + 2
    int tet_quad_degree = 0;  ///< 0 means min(2d rounded up to even, 12)
    std::uint64_t seed = 42;

    /// Throws InvalidArgument on an inconsistent configuration.
    void validate() const;
    std::array<int, 3> box_quadrature_points() const;
    int tet_quadrature_degree() const;
};

using SplineSpace = std::variant<TensorProductSpace, S0dSpace>;

SplineSpace build_space(const Box& box, const SolverConfig& config);
int space_dimension(const SplineSpace& space);
double space_mesh_size(const SplineSpace& space);
double eval_spline(const SplineSpace& space, const Eigen::VectorXd& c, const Point3& p, Deriv d = deriv::value);
std::vector<double> eval_spline(const SplineSpace& space, const Eigen::VectorXd& c, const std::vector<Point3>& pts);

enum class Block { galerkin, collocation, boundary, smoothness };

std::string to_string(Block b);

struct RowBlock {
    Block kind;
    Eigen::Index begin;
    Eigen::Index end;

    Eigen::Index size() const { return end - begin; }
};

struct LinearSystem {
    SparseRowMatrix H;
    Eigen::VectorXd r;
    std::vector<RowBlock> blocks;

    Eigen::Index rows() const { return H.rows(); }
    Eigen::Index cols() const { return H.cols(); }
    /// Nullptr when the block is absent.
    const RowBlock* block(Block kind) const;
};

/// Per subbox the m_c^3 lattice including subbox corners, merged across shared faces.
PointSet collocation_points_tp(const TensorProductSpace& space, int m_c);

/// Union of the degree-d_c domain points of every tetrahedron, merged.
PointSet collocation_points_tet(const TetPartition& partition, int d_c);

/// Collocation set for the configured space.
PointSet collocation_points(const SplineSpace& space, const SolverConfig& config);

LinearSystem assemble_ipbf(const SplineSpace& space, const BVPDefinition& bvp, const PointSet& B,
                           const SolverConfig& config);

LinearSystem assemble_ipbc(const SplineSpace& space, const BVPDefinition& bvp, const PointSet& gamma,
                           const PointSet& B, const SolverConfig& config);

/// Element (cell or tetrahedron) Galerkin contributions before the row gather.
struct ElementMatrices {
    std::vector<std::vector<int>> dofs;  ///< global indices per element
    std::vector<Eigen::MatrixXd> K;      ///< K(i, j) = sum_q w_q phi_i(q) (L phi_j)(q)
    std::vector<Eigen::VectorXd> b;      ///< b(i) = sum_q w_q phi_i(q) f(q)
};

ElementMatrices galerkin_elements(const SplineSpace& space, const BVPDefinition& bvp, const SolverConfig& config);

/// Text dump: "rows cols nnz" header, then "row col value" lines, then one "rhs row value" line per row.
void write_system_triplets(const LinearSystem& sys, std::ostream& out);

}  // namespace ipbm
