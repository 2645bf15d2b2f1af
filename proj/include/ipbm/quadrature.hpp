#pragma once

/**
 * @file quadrature.hpp
 * @brief Gauss-Legendre rules, tensor rules on boxes, symmetric rules on tetrahedra.
 */

#include "ipbm/core.hpp"

#include <array>
#include <vector>

namespace ipbm {

struct QuadratureRule1D {
    std::vector<double> nodes;
    std::vector<double> weights;
    int degree = 0;  ///< polynomial exactness

    std::size_t size() const { return nodes.size(); }
};

struct QuadratureRule {
    std::vector<Point3> nodes;
    std::vector<double> weights;
    int degree = 0;

    std::size_t size() const { return nodes.size(); }
};

/// n-point Gauss-Legendre rule on [-1, 1], 1 <= n <= 30.
QuadratureRule1D gauss_legendre(int n);

/// Gauss-Legendre rule mapped to [a, b].
QuadratureRule1D gauss_legendre(int n, double a, double b);

/// Tensor product of Gauss-Legendre rules with (nx, ny, nz) points.
QuadratureRule box_rule(const Box& box, std::array<int, 3> points_per_dim);

/// Rule exact to even degree mq on the reference simplex {x, y, z >= 0, x + y + z <= 1}.
QuadratureRule reference_tet_rule(int mq);

/// reference_tet_rule(mq) mapped affinely onto the tetrahedron with vertices v.
QuadratureRule tet_rule(const std::array<Point3, 4>& v, int mq);

/// Collapsed (Duffy) Gauss rule on the reference simplex exact to `degree`.
QuadratureRule collapsed_tet_rule(int degree);

/// Largest mq with an embedded symmetric table; higher orders use the collapsed rule.
inline constexpr int kMaxTabulatedTetDegree = 12;

}  // namespace ipbm
