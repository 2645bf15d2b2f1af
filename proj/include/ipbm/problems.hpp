#pragma once

/**
 * @file problems.hpp
 * @brief Manufactured-solution boundary value problems for L u = f in Omega, u = g on its boundary.
 *
 * L u = a1 u_xx + a2 u_yy + a3 u_zz + 2 a4 u_xy + 2 a5 u_xz + 2 a6 u_yz.
 * Second derivatives and coefficients are always stored in the order
 * (xx, yy, zz, xy, xz, yz).
 */

#include "ipbm/core.hpp"

#include <array>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace ipbm {

using Second = std::array<double, 6>;
using Coefficients = std::array<double, 6>;

struct TrueSolution {
    std::string id;
    std::function<double(const Point3&)> value;
    std::function<Point3(const Point3&)> gradient;
    std::function<Second(const Point3&)> hessian;
    /// Per-axis polynomial degree when u is a polynomial (tensor-product reproducibility).
    std::optional<std::array<int, 3>> axis_degrees;
    /// Total polynomial degree when u is a polynomial (type-5 reproducibility).
    std::optional<int> total_degree;
};

struct OperatorPreset {
    std::string id;
    std::function<Coefficients(const Point3&)> coefficients;
    bool constant = true;
};

struct BVPDefinition {
    TrueSolution u;
    OperatorPreset op;

    Coefficients a(const Point3& p) const { return op.coefficients(p); }
    /// f = L u from the stored Hessian.
    double f(const Point3& p) const;
    double g(const Point3& p) const { return u.value(p); }
};

const std::vector<std::string>& solution_ids();
const std::vector<std::string>& operator_ids();

TrueSolution make_solution(const std::string& id);
OperatorPreset make_operator(const std::string& id);
/// Throws InvalidArgument naming the valid ids on an unknown id.
BVPDefinition make_preset(const std::string& solution, const std::string& op);

/// sum a_i * second_i with the cross terms doubled.
double apply_operator(const Coefficients& a, const Second& second);
double apply_operator(const BVPDefinition& bvp, const Second& second, const Point3& p);

/// Eigenvalues (ascending) of [[a1, a4, a5], [a4, a2, a6], [a5, a6, a3]].
std::array<double, 3> ellipticity_eigenvalues(const Coefficients& a);

enum class Ellipticity { elliptic, weakly_elliptic, non_elliptic };

std::string to_string(Ellipticity e);

struct EllipticityReport {
    std::vector<Point3> points;
    std::vector<std::array<double, 3>> eigenvalues;
    Ellipticity classification = Ellipticity::elliptic;
};

/// Eigenvalues with |lambda| <= zero_tol * max|lambda| count as zero.
EllipticityReport classify_ellipticity(const OperatorPreset& op, const std::vector<Point3>& points,
                                       double zero_tol = 1e-12);

}  // namespace ipbm
