#pragma once

/**
 * @file reference.hpp
 * @brief Serial, brute-force versions of the parallel kernels.
 *
 * Nothing here is fast. Every routine loops over the full basis or the full
 * triangle list so the parallel code paths have something independent to be
 * compared against in tests and benchmarks.
 */

#include "ipbm/assembly.hpp"
#include "ipbm/geometry.hpp"
#include "ipbm/solver.hpp"

#include <Eigen/Core>

#include <vector>

namespace ipbm::reference {

struct DenseSystem {
    Eigen::MatrixXd H;
    Eigen::VectorXd r;
};

/// Ray parity against every triangle, three fixed rays, majority vote.
std::vector<char> mesh_inside_flags(const TriangleMesh& mesh, const std::vector<Point3>& points);

/// O(n nb) greedy max-min selection; ties go to the lowest index.
PointSet farthest_point_downsample_from(const PointSet& cloud, std::size_t nb, std::size_t start);

/// Spline value (or one derivative) summed over the whole basis.
double eval_spline(const SplineSpace& space, const Eigen::VectorXd& c, const Point3& p, Deriv d = deriv::value);
std::vector<double> eval_spline(const SplineSpace& space, const Eigen::VectorXd& c, const std::vector<Point3>& pts);

ErrorSummary evaluate_errors(const SplineSpace& space, const Eigen::VectorXd& c,
                             const std::function<double(const Point3&)>& u, const PointSet& pts);

/// Galerkin rows computed basis function by basis function over every element.
DenseSystem assemble_ipbf(const SplineSpace& space, const BVPDefinition& bvp, const PointSet& B,
                          const SolverConfig& config);

DenseSystem assemble_ipbc(const SplineSpace& space, const BVPDefinition& bvp, const PointSet& gamma,
                          const PointSet& B, const SolverConfig& config);

}  // namespace ipbm::reference
