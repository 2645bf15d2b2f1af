#pragma once

/**
 * @file tp_spline.hpp
 * @brief Univariate B-splines and trivariate tensor-product spline spaces.
 *
 * Knot vectors are clamped: the end knots are stacked to multiplicity d+1, so a
 * grid with m lines (k = m-2 interior knots) carries n = k + d + 1 basis
 * functions. Basis functions are indexed lexicographically with the z index
 * running fastest.
 */

#include "ipbm/core.hpp"

#include <Eigen/Core>

#include <array>
#include <vector>

namespace ipbm {

/// Partial derivative multi-index (order along x, y, z).
struct Deriv {
    int x = 0;
    int y = 0;
    int z = 0;

    int order() const { return x + y + z; }
    bool operator==(const Deriv&) const = default;
};

namespace deriv {
inline constexpr Deriv value{0, 0, 0};
inline constexpr Deriv dx{1, 0, 0};
inline constexpr Deriv dy{0, 1, 0};
inline constexpr Deriv dz{0, 0, 1};
inline constexpr Deriv dxx{2, 0, 0};
inline constexpr Deriv dyy{0, 2, 0};
inline constexpr Deriv dzz{0, 0, 2};
inline constexpr Deriv dxy{1, 1, 0};
inline constexpr Deriv dxz{1, 0, 1};
inline constexpr Deriv dyz{0, 1, 1};

/// The ten supported multi-indices, in the order used by ActiveBasis.
inline constexpr std::array<Deriv, 10> all = {value, dx, dy, dz, dxx, dyy, dzz, dxy, dxz, dyz};
/// Second derivatives in operator order (xx, yy, zz, xy, xz, yz).
inline constexpr std::array<Deriv, 6> second = {dxx, dyy, dzz, dxy, dxz, dyz};
}  // namespace deriv

/// Position of d in deriv::all; throws for unsupported multi-indices.
int deriv_slot(Deriv d);

inline constexpr int kMaxSplineDegree = 15;

class KnotVector {
public:
    /// m equally spaced grid lines on [a, b], end knots of multiplicity degree+1.
    static KnotVector uniform(double a, double b, int m, int degree);

    /// Arbitrary strictly increasing interior knots in (a, b).
    KnotVector(double a, double b, int degree, std::vector<double> interior);

    double a() const { return a_; }
    double b() const { return b_; }
    int degree() const { return degree_; }
    int interior_count() const { return static_cast<int>(knots_.size()) - 2 * degree_ - 2; }
    int dimension() const { return interior_count() + degree_ + 1; }
    int span_count() const { return interior_count() + 1; }
    const std::vector<double>& knots() const { return knots_; }

    /// Index s with t_s <= x < t_{s+1}; x == b maps into the last nonempty span.
    int span(double x) const;

    /// Greville abscissae (knot averages), one per basis function.
    std::vector<double> greville() const;

private:
    double a_ = 0.0;
    double b_ = 1.0;
    int degree_ = 1;
    std::vector<double> knots_;
};

KnotVector make_knots(double a, double b, int m, int d);

/// Values of the d+1 nonzero B-splines at x and their derivatives up to order 2.
struct UnivariateBasis {
    int first = 0;  ///< global index of the first active function
    int count = 0;  ///< d + 1
    std::array<std::array<double, kMaxSplineDegree + 1>, 3> ders{};
};

/// Fills `out` with derivative orders 0..max_deriv at x (Cox-de Boor with derivative recurrence).
void eval_basis_ders(const KnotVector& kv, double x, int max_deriv, UnivariateBasis& out);

struct BasisValues {
    int first = 0;
    std::vector<double> values;
};

/// The d+1 active basis values (deriv 0, 1 or 2) at x in [a, b].
BasisValues eval_bspline_basis(const KnotVector& kv, double x, int deriv);

/// Active basis functions at one point, with the ten derivative combinations.
struct ActiveBasis {
    std::vector<int> index;
    std::array<std::vector<double>, 10> ders;  ///< indexed by deriv_slot

    std::size_t size() const { return index.size(); }
    const std::vector<double>& operator[](Deriv d) const { return ders[deriv_slot(d)]; }
};

class TensorProductSpace {
public:
    TensorProductSpace(const Box& box, std::array<KnotVector, 3> axes, int grid_lines);

    const Box& box() const { return box_; }
    const KnotVector& axis(int a) const { return axes_[a]; }
    std::array<int, 3> degrees() const;
    std::array<int, 3> dims() const { return dims_; }
    int dimension() const { return dims_[0] * dims_[1] * dims_[2]; }
    int grid_lines() const { return grid_lines_; }
    /// h = 1 / (m - 1) on the unit-edge box.
    double mesh_size() const { return 1.0 / (grid_lines_ - 1); }
    int local_count() const;

    int index(int i, int j, int k) const { return (i * dims_[1] + j) * dims_[2] + k; }
    std::array<int, 3> triple(int idx) const;

    /// Active basis at p; derivatives above max_order are left empty.
    void active_basis(const Point3& p, int max_order, ActiveBasis& out) const;

    /// Single basis function (or derivative) at p, evaluated from scratch.
    double basis_function(int idx, const Point3& p, Deriv d) const;

private:
    Box box_;
    std::array<KnotVector, 3> axes_;
    std::array<int, 3> dims_{};
    int grid_lines_ = 2;
};

/// m grid lines per axis over the box, degrees (dx, dy, dz).
TensorProductSpace build_tp_space(const Box& box, int m, std::array<int, 3> degrees);

double eval_tp_spline(const TensorProductSpace& space, const Eigen::VectorXd& c, const Point3& p,
                      Deriv d = deriv::value);

/// Batch evaluation (values only), parallel over points.
std::vector<double> eval_tp_spline(const TensorProductSpace& space, const Eigen::VectorXd& c,
                                   const std::vector<Point3>& points);

}  // namespace ipbm
