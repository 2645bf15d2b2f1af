#include "ipbm/tp_spline.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <omp.h>

namespace ipbm {

int deriv_slot(Deriv d)
{
    for (int s = 0; s < static_cast<int>(deriv::all.size()); ++s) {
        if (deriv::all[s] == d) return s;
    }
    throw InvalidArgument("unsupported derivative multi-index (" + std::to_string(d.x) + "," +
                          std::to_string(d.y) + "," + std::to_string(d.z) + ")");
}

KnotVector::KnotVector(double a, double b, int degree, std::vector<double> interior)
    : a_(a), b_(b), degree_(degree)
{
    IPBM_REQUIRE(a < b, "KnotVector: need a < b");
    IPBM_REQUIRE(degree >= 1 && degree <= kMaxSplineDegree, "KnotVector: degree out of range");
    double prev = a;
    for (double x : interior) {
        IPBM_REQUIRE(x > prev && x < b, "KnotVector: interior knots must increase strictly inside (a, b)");
        prev = x;
    }
    knots_.reserve(interior.size() + 2 * degree + 2);
    knots_.insert(knots_.end(), degree + 1, a);
    knots_.insert(knots_.end(), interior.begin(), interior.end());
    knots_.insert(knots_.end(), degree + 1, b);
}

KnotVector KnotVector::uniform(double a, double b, int m, int degree)
{
    IPBM_REQUIRE(m >= 2, "make_knots: need at least 2 grid lines");
    std::vector<double> interior;
    interior.reserve(m - 2);
    for (int i = 1; i < m - 1; ++i) interior.push_back(a + (b - a) * i / (m - 1));
    return KnotVector(a, b, degree, std::move(interior));
}

KnotVector make_knots(double a, double b, int m, int d) { return KnotVector::uniform(a, b, m, d); }

int KnotVector::span(double x) const
{
    const int n = dimension();
    if (x >= knots_[n]) return n - 1;
    const auto it = std::upper_bound(knots_.begin() + degree_, knots_.begin() + n, x);
    return static_cast<int>(it - knots_.begin()) - 1;
}

std::vector<double> KnotVector::greville() const
{
    std::vector<double> g(dimension());
    for (int i = 0; i < dimension(); ++i) {
        double s = 0.0;
        for (int j = 1; j <= degree_; ++j) s += knots_[i + j];
        g[i] = s / degree_;
    }
    return g;
}

void eval_basis_ders(const KnotVector& kv, double x, int max_deriv, UnivariateBasis& out)
{
    const int p = kv.degree();
    const auto& t = kv.knots();
    const int s = kv.span(x);
    out.first = s - p;
    out.count = p + 1;

    constexpr int N = kMaxSplineDegree + 1;
    double ndu[N][N];
    double left[N];
    double right[N];
    ndu[0][0] = 1.0;
    for (int j = 1; j <= p; ++j) {
        left[j] = x - t[s + 1 - j];
        right[j] = t[s + j] - x;
        double saved = 0.0;
        for (int r = 0; r < j; ++r) {
            ndu[j][r] = right[r + 1] + left[j - r];
            const double temp = ndu[r][j - 1] / ndu[j][r];
            ndu[r][j] = saved + right[r + 1] * temp;
            saved = left[j - r] * temp;
        }
        ndu[j][j] = saved;
    }
    for (int j = 0; j <= p; ++j) out.ders[0][j] = ndu[j][p];

    const int top = std::min(max_deriv, 2);
    for (int k = 1; k <= top; ++k) std::fill_n(out.ders[k].begin(), p + 1, 0.0);
    const int n = std::min(top, p);
    double a[2][N];
    for (int r = 0; r <= p; ++r) {
        int s1 = 0;
        int s2 = 1;
        a[0][0] = 1.0;
        for (int k = 1; k <= n; ++k) {
            double d = 0.0;
            const int rk = r - k;
            const int pk = p - k;
            if (r >= k) {
                a[s2][0] = a[s1][0] / ndu[pk + 1][rk];
                d = a[s2][0] * ndu[rk][pk];
            }
            const int j1 = rk >= -1 ? 1 : -rk;
            const int j2 = (r - 1 <= pk) ? k - 1 : p - r;
            for (int j = j1; j <= j2; ++j) {
                a[s2][j] = (a[s1][j] - a[s1][j - 1]) / ndu[pk + 1][rk + j];
                d += a[s2][j] * ndu[rk + j][pk];
            }
            if (r <= pk) {
                a[s2][k] = -a[s1][k - 1] / ndu[pk + 1][r];
                d += a[s2][k] * ndu[r][pk];
            }
            out.ders[k][r] = d;
            std::swap(s1, s2);
        }
    }
    double factor = p;
    for (int k = 1; k <= n; ++k) {
        for (int j = 0; j <= p; ++j) out.ders[k][j] *= factor;
        factor *= (p - k);
    }
}

BasisValues eval_bspline_basis(const KnotVector& kv, double x, int deriv)
{
    IPBM_REQUIRE(deriv >= 0 && deriv <= 2, "eval_bspline_basis: derivative order must be 0, 1 or 2");
    if (!(x >= kv.a() - kBoxTolerance && x <= kv.b() + kBoxTolerance)) {
        throw InvalidArgument("eval_bspline_basis: x = " + std::to_string(x) + " outside [" +
                              std::to_string(kv.a()) + ", " + std::to_string(kv.b()) + "]");
    }
    UnivariateBasis ub;
    eval_basis_ders(kv, std::clamp(x, kv.a(), kv.b()), deriv, ub);
    BasisValues out;
    out.first = ub.first;
    out.values.assign(ub.ders[deriv].begin(), ub.ders[deriv].begin() + ub.count);
    return out;
}

TensorProductSpace::TensorProductSpace(const Box& box, std::array<KnotVector, 3> axes, int grid_lines)
    : box_(box), axes_(std::move(axes)), grid_lines_(grid_lines)
{
    for (int a = 0; a < 3; ++a) dims_[a] = axes_[a].dimension();
}

std::array<int, 3> TensorProductSpace::degrees() const
{
    return {axes_[0].degree(), axes_[1].degree(), axes_[2].degree()};
}

int TensorProductSpace::local_count() const
{
    return (axes_[0].degree() + 1) * (axes_[1].degree() + 1) * (axes_[2].degree() + 1);
}

std::array<int, 3> TensorProductSpace::triple(int idx) const
{
    const int k = idx % dims_[2];
    const int j = (idx / dims_[2]) % dims_[1];
    const int i = idx / (dims_[1] * dims_[2]);
    return {i, j, k};
}

namespace {

Point3 checked_point(const Box& box, const Point3& p)
{
    if (!box.contains(p, kBoxTolerance)) {
        throw InvalidArgument("spline evaluation point (" + std::to_string(p.x()) + ", " + std::to_string(p.y()) +
                              ", " + std::to_string(p.z()) + ") outside the bounding box");
    }
    return box.clamp(p);
}

}  // namespace

void TensorProductSpace::active_basis(const Point3& p_in, int max_order, ActiveBasis& out) const
{
    const Point3 p = checked_point(box_, p_in);
    UnivariateBasis bx, by, bz;
    eval_basis_ders(axes_[0], p.x(), max_order, bx);
    eval_basis_ders(axes_[1], p.y(), max_order, by);
    eval_basis_ders(axes_[2], p.z(), max_order, bz);

    const std::size_t count = static_cast<std::size_t>(bx.count) * by.count * bz.count;
    out.index.resize(count);
    for (int s = 0; s < 10; ++s) {
        if (deriv::all[s].order() <= max_order) {
            out.ders[s].resize(count);
        } else {
            out.ders[s].clear();
        }
    }
    std::size_t q = 0;
    for (int i = 0; i < bx.count; ++i) {
        for (int j = 0; j < by.count; ++j) {
            for (int k = 0; k < bz.count; ++k, ++q) {
                out.index[q] = index(bx.first + i, by.first + j, bz.first + k);
                for (int s = 0; s < 10; ++s) {
                    const Deriv d = deriv::all[s];
                    if (d.order() > max_order) continue;
                    out.ders[s][q] = bx.ders[d.x][i] * by.ders[d.y][j] * bz.ders[d.z][k];
                }
            }
        }
    }
}

double TensorProductSpace::basis_function(int idx, const Point3& p_in, Deriv d) const
{
    IPBM_REQUIRE(idx >= 0 && idx < dimension(), "basis_function: index out of range");
    deriv_slot(d);
    const Point3 p = checked_point(box_, p_in);
    const auto ijk = triple(idx);
    const int orders[3] = {d.x, d.y, d.z};
    double value = 1.0;
    for (int a = 0; a < 3; ++a) {
        UnivariateBasis ub;
        eval_basis_ders(axes_[a], p[a], orders[a], ub);
        const int local = ijk[a] - ub.first;
        if (local < 0 || local >= ub.count) return 0.0;
        value *= ub.ders[orders[a]][local];
    }
    return value;
}

TensorProductSpace build_tp_space(const Box& box, int m, std::array<int, 3> degrees)
{
    IPBM_REQUIRE(m >= 2, "build_tp_space: need at least 2 grid lines");
    for (int d : degrees) IPBM_REQUIRE(d >= 1, "build_tp_space: degrees must be >= 1");
    return TensorProductSpace(box,
                              {KnotVector::uniform(box.lo.x(), box.hi.x(), m, degrees[0]),
                               KnotVector::uniform(box.lo.y(), box.hi.y(), m, degrees[1]),
                               KnotVector::uniform(box.lo.z(), box.hi.z(), m, degrees[2])},
                              m);
}

double eval_tp_spline(const TensorProductSpace& space, const Eigen::VectorXd& c, const Point3& p, Deriv d)
{
    IPBM_REQUIRE(c.size() == space.dimension(), "eval_tp_spline: coefficient count does not match the space");
    const int slot = deriv_slot(d);
    ActiveBasis basis;
    space.active_basis(p, d.order(), basis);
    double s = 0.0;
    for (std::size_t q = 0; q < basis.size(); ++q) s += c[basis.index[q]] * basis.ders[slot][q];
    return s;
}

std::vector<double> eval_tp_spline(const TensorProductSpace& space, const Eigen::VectorXd& c,
                                   const std::vector<Point3>& points)
{
    IPBM_REQUIRE(c.size() == space.dimension(), "eval_tp_spline: coefficient count does not match the space");
    for (const auto& p : points) checked_point(space.box(), p);  // no throwing inside the parallel region
    std::vector<double> out(points.size());
    const auto n = static_cast<std::int64_t>(points.size());
#pragma omp parallel
    {
        ActiveBasis basis;
#pragma omp for schedule(static)
        for (std::int64_t i = 0; i < n; ++i) {
            space.active_basis(points[i], 0, basis);
            double s = 0.0;
            for (std::size_t q = 0; q < basis.size(); ++q) s += c[basis.index[q]] * basis.ders[0][q];
            out[i] = s;
        }
    }
    return out;
}

}  // namespace ipbm
