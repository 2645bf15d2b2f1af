#include "ipbm/tet_spline.hpp"

#include "ipbm/geometry.hpp"

#include <Eigen/Dense>
#include <Eigen/LU>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <limits>

namespace ipbm {

Tetrahedron::Tetrahedron(const std::array<Point3, 4>& vertices) : v_(vertices)
{
    Eigen::Matrix3d J;
    J.col(0) = v_[1] - v_[0];
    J.col(1) = v_[2] - v_[0];
    J.col(2) = v_[3] - v_[0];
    const double det = J.determinant();
    const double scale = std::max({J.col(0).norm(), J.col(1).norm(), J.col(2).norm()});
    if (!(std::abs(det) > 1e-14 * scale * scale * scale)) {
        throw InvalidArgument("Tetrahedron: degenerate (zero volume)");
    }
    volume_ = std::abs(det) / 6.0;
    inverse_ = J.inverse();
    grad_.row(0) = -(inverse_.row(0) + inverse_.row(1) + inverse_.row(2));
    grad_.bottomRows<3>() = inverse_;
}

Eigen::Vector4d Tetrahedron::barycentric(const Point3& p) const
{
    const Point3 b = inverse_ * (p - v_[0]);
    return {1.0 - b.sum(), b.x(), b.y(), b.z()};
}

bool Tetrahedron::contains(const Point3& p, double tol) const { return barycentric(p).minCoeff() >= -tol; }

BernsteinIndexSet::BernsteinIndexSet(int degree) : degree_(degree)
{
    if (degree < 0) return;
    const int n1 = degree + 1;
    lookup_.assign(static_cast<std::size_t>(n1) * n1 * n1, -1);
    for (int i = degree; i >= 0; --i) {
        for (int j = degree - i; j >= 0; --j) {
            for (int k = degree - i - j; k >= 0; --k) {
                lookup_[(static_cast<std::size_t>(i) * n1 + j) * n1 + k] = static_cast<int>(indices_.size());
                indices_.push_back({i, j, k, degree - i - j - k});
            }
        }
    }
}

int BernsteinIndexSet::position(int i, int j, int k) const
{
    if (i < 0 || j < 0 || k < 0 || i + j + k > degree_) return -1;
    const int n1 = degree_ + 1;
    return lookup_[(static_cast<std::size_t>(i) * n1 + j) * n1 + k];
}

std::vector<std::array<int, 4>> bernstein_indices(int d)
{
    IPBM_REQUIRE(d >= 0, "bernstein_indices: negative degree");
    return BernsteinIndexSet(d).indices();
}

std::vector<Point3> domain_points(const Tetrahedron& tet, int d)
{
    IPBM_REQUIRE(d >= 1, "domain_points: degree must be >= 1");
    std::vector<Point3> pts;
    for (const auto& a : bernstein_indices(d)) {
        Point3 p = Point3::Zero();
        for (int m = 0; m < 4; ++m) p += a[m] * tet.vertex(m);
        pts.push_back(p / d);
    }
    return pts;
}

double TetPartition::total_volume() const
{
    double v = 0.0;
    for (const auto& t : geometry_) v += t.volume();
    return v;
}

int TetPartition::locate(const Point3& p) const
{
    if (!bbox_.contains(p, kBoxTolerance)) {
        throw InvalidArgument("locate: point (" + std::to_string(p.x()) + ", " + std::to_string(p.y()) + ", " +
                              std::to_string(p.z()) + ") outside the bounding box");
    }
    const int cells = m_ - 1;
    std::array<int, 3> s{};
    for (int a = 0; a < 3; ++a) {
        const double u = (p[a] - bbox_.lo[a]) / (bbox_.hi[a] - bbox_.lo[a]) * cells;
        s[a] = std::clamp(static_cast<int>(std::floor(u)), 0, cells - 1);
    }
    const int sub = (s[0] * cells + s[1]) * cells + s[2];
    int best = 5 * sub;
    double best_min = -std::numeric_limits<double>::infinity();
    for (int t = 5 * sub; t < 5 * sub + 5; ++t) {
        const double b = geometry_[t].barycentric(p).minCoeff();
        if (b > best_min) {
            best_min = b;
            best = t;
        }
    }
    return best;
}

TetPartition build_type5_partition(const Box& bbox, int m)
{
    IPBM_REQUIRE(m >= 2, "build_type5_partition: need m >= 2");
    for (int a = 0; a < 3; ++a) IPBM_REQUIRE(bbox.hi[a] > bbox.lo[a], "build_type5_partition: empty box");
    TetPartition part;
    part.bbox_ = bbox;
    part.m_ = m;
    const auto vid = [m](int i, int j, int k) { return (i * m + j) * m + k; };
    part.vertices_.resize(static_cast<std::size_t>(m) * m * m);
    for (int i = 0; i < m; ++i) {
        for (int j = 0; j < m; ++j) {
            for (int k = 0; k < m; ++k) {
                const Point3 u(double(i) / (m - 1), double(j) / (m - 1), double(k) / (m - 1));
                part.vertices_[vid(i, j, k)] = bbox.lo + bbox.edges().cwiseProduct(u);
            }
        }
    }

    const int cells = m - 1;
    for (int a = 0; a < cells; ++a) {
        for (int b = 0; b < cells; ++b) {
            for (int c = 0; c < cells; ++c) {
                std::array<int, 4> central{};
                int nc = 0;
                for (int corner = 0; corner < 8; ++corner) {
                    const int i = a + (corner >> 2 & 1);
                    const int j = b + (corner >> 1 & 1);
                    const int k = c + (corner & 1);
                    if ((i + j + k) % 2 == 0) {
                        central[nc++] = vid(i, j, k);
                        continue;
                    }
                    // Odd corner and its three edge neighbours inside the subbox.
                    const int ni = (i == a) ? a + 1 : a;
                    const int nj = (j == b) ? b + 1 : b;
                    const int nk = (k == c) ? c + 1 : c;
                    part.tets_.push_back({vid(i, j, k), vid(ni, j, k), vid(i, nj, k), vid(i, j, nk)});
                }
                part.tets_.push_back(central);
            }
        }
    }

    part.geometry_.reserve(part.tets_.size());
    for (auto& t : part.tets_) {
        const auto& V = part.vertices_;
        const double det = (V[t[1]] - V[t[0]]).cross(V[t[2]] - V[t[0]]).dot(V[t[3]] - V[t[0]]);
        if (det < 0) std::swap(t[2], t[3]);
        part.geometry_.emplace_back(std::array<Point3, 4>{V[t[0]], V[t[1]], V[t[2]], V[t[3]]});
    }

    struct FaceRecord {
        std::array<int, 3> key;
        int tet;
        int opposite;
    };
    std::vector<FaceRecord> records;
    records.reserve(part.tets_.size() * 4);
    for (int t = 0; t < part.tet_count(); ++t) {
        const auto& tv = part.tets_[t];
        for (int skip = 0; skip < 4; ++skip) {
            std::array<int, 3> key{};
            int n = 0;
            for (int r = 0; r < 4; ++r) {
                if (r != skip) key[n++] = tv[r];
            }
            std::sort(key.begin(), key.end());
            records.push_back({key, t, tv[skip]});
        }
    }
    std::sort(records.begin(), records.end(), [](const FaceRecord& x, const FaceRecord& y) {
        return x.key != y.key ? x.key < y.key : x.tet < y.tet;
    });
    for (std::size_t r = 0; r < records.size();) {
        std::size_t e = r;
        while (e < records.size() && records[e].key == records[r].key) ++e;
        if (e - r == 1) {
            ++part.boundary_faces_;
        } else if (e - r == 2) {
            part.faces_.push_back({records[r].key, {records[r].tet, records[r + 1].tet},
                                   {records[r].opposite, records[r + 1].opposite}});
        } else {
            throw Error("build_type5_partition: face shared by more than two tetrahedra");
        }
        r = e;
    }
    return part;
}

S0dSpace build_s0d_space(const TetPartition& partition, int d)
{
    IPBM_REQUIRE(d >= 1, "build_s0d_space: degree must be >= 1");
    IPBM_REQUIRE(partition.tet_count() > 0, "build_s0d_space: empty partition");
    S0dSpace space(partition, d);
    const int nloc = space.local_count();
    const Box& box = partition.bbox();
    PointDeduplicator dedup(box.lo, box.max_edge(), 1e-10);
    space.local_to_global_.resize(static_cast<std::size_t>(partition.tet_count()) * nloc);
    for (int t = 0; t < partition.tet_count(); ++t) {
        const auto& tet = partition.tet(t);
        for (int n = 0; n < nloc; ++n) {
            const auto& a = space.indices_[n];
            Point3 p = Point3::Zero();
            for (int r = 0; r < 4; ++r) p += a[r] * tet.vertex(r);
            p /= d;
            space.local_to_global_[static_cast<std::size_t>(t) * nloc + n] = static_cast<int>(dedup.insert(p));
        }
    }
    space.points_ = dedup.points();
    return space;
}

namespace {

std::vector<double> multinomials(const BernsteinIndexSet& set)
{
    std::vector<double> f(std::max(set.degree(), 0) + 1, 1.0);
    for (std::size_t i = 1; i < f.size(); ++i) f[i] = f[i - 1] * static_cast<double>(i);
    std::vector<double> c;
    c.reserve(set.size());
    for (const auto& a : set.indices()) c.push_back(f[set.degree()] / (f[a[0]] * f[a[1]] * f[a[2]] * f[a[3]]));
    return c;
}

/// Unordered barycentric pairs (m <= n) in a fixed order.
constexpr std::array<std::array<int, 2>, 10> kPairs = {
    {{0, 0}, {1, 1}, {2, 2}, {3, 3}, {0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}}};

void bernstein_values(const BernsteinIndexSet& set, const std::vector<double>& coef, const Eigen::Vector4d& b,
                      std::vector<double>& out)
{
    const int d = set.degree();
    out.resize(set.size());
    if (d < 0) return;
    std::array<std::array<double, kMaxSplineDegree + 2>, 4> pw;
    for (int m = 0; m < 4; ++m) {
        pw[m][0] = 1.0;
        for (int e = 1; e <= d; ++e) pw[m][e] = pw[m][e - 1] * b[m];
    }
    for (int n = 0; n < set.size(); ++n) {
        const auto& a = set[n];
        out[n] = coef[n] * pw[0][a[0]] * pw[1][a[1]] * pw[2][a[2]] * pw[3][a[3]];
    }
}

}  // namespace

BernsteinEvaluator::BernsteinEvaluator(int degree)
    : d_(degree), set_d_(degree), set_d1_(degree - 1), set_d2_(degree - 2)
{
    IPBM_REQUIRE(degree >= 1 && degree <= kMaxSplineDegree, "BernsteinEvaluator: degree out of range");
    coef_d_ = multinomials(set_d_);
    coef_d1_ = multinomials(set_d1_);
    coef_d2_ = multinomials(set_d2_);
    down1_.resize(set_d_.size());
    down2_.resize(set_d_.size());
    for (int n = 0; n < set_d_.size(); ++n) {
        const auto& a = set_d_[n];
        for (int m = 0; m < 4; ++m) {
            auto b = a;
            --b[m];
            down1_[n][m] = b[m] < 0 ? -1 : set_d1_.position(b);
        }
        for (int q = 0; q < 10; ++q) {
            auto b = a;
            --b[kPairs[q][0]];
            --b[kPairs[q][1]];
            const bool ok = *std::min_element(b.begin(), b.end()) >= 0;
            down2_[n][q] = ok ? set_d2_.position(b) : -1;
        }
    }
}

void BernsteinEvaluator::evaluate(const Tetrahedron& tet, const Point3& p, int max_order, ActiveBasis& out) const
{
    const int n = set_d_.size();
    const Eigen::Vector4d b = tet.barycentric(p);
    out.index.resize(n);
    for (int i = 0; i < n; ++i) out.index[i] = i;
    for (int s = 0; s < 10; ++s) {
        if (deriv::all[s].order() <= max_order) {
            out.ders[s].assign(n, 0.0);
        } else {
            out.ders[s].clear();
        }
    }
    bernstein_values(set_d_, coef_d_, b, out.ders[0]);
    if (max_order < 1) return;

    const auto& G = tet.barycentric_gradients();
    thread_local std::vector<double> lower;
    bernstein_values(set_d1_, coef_d1_, b, lower);
    for (int i = 0; i < n; ++i) {
        for (int m = 0; m < 4; ++m) {
            const int pos = down1_[i][m];
            if (pos < 0) continue;
            const double v = d_ * lower[pos];
            for (int a = 0; a < 3; ++a) out.ders[1 + a][i] += G(m, a) * v;
        }
    }
    if (max_order < 2 || d_ < 2) return;

    // Weight of pair q in the second derivative slot s: sum over both orderings of (m, n).
    constexpr std::array<std::array<int, 2>, 6> axes = {{{0, 0}, {1, 1}, {2, 2}, {0, 1}, {0, 2}, {1, 2}}};
    double w[6][10];
    for (int s = 0; s < 6; ++s) {
        const int a = axes[s][0];
        const int c = axes[s][1];
        for (int q = 0; q < 10; ++q) {
            const int m = kPairs[q][0];
            const int k = kPairs[q][1];
            const double sym = (m == k) ? G(m, a) * G(m, c) : G(m, a) * G(k, c) + G(k, a) * G(m, c);
            w[s][q] = d_ * (d_ - 1) * sym;
        }
    }
    bernstein_values(set_d2_, coef_d2_, b, lower);
    for (int i = 0; i < n; ++i) {
        for (int q = 0; q < 10; ++q) {
            const int pos = down2_[i][q];
            if (pos < 0) continue;
            const double v = lower[pos];
            for (int s = 0; s < 6; ++s) out.ders[4 + s][i] += w[s][q] * v;
        }
    }
}

std::vector<double> eval_bernstein(const Tetrahedron& tet, int d, const Point3& p, Deriv deriv)
{
    const int slot = deriv_slot(deriv);
    if (!tet.contains(p, 1e-12)) throw InvalidArgument("eval_bernstein: point outside the tetrahedron");
    BernsteinEvaluator ev(d);
    ActiveBasis out;
    ev.evaluate(tet, p, deriv.order(), out);
    return out.ders[slot];
}

double eval_s0d_on_tet(const S0dSpace& space, const Eigen::VectorXd& c, int t, const Point3& p, Deriv d)
{
    IPBM_REQUIRE(c.size() == space.dimension(), "eval_s0d_spline: coefficient count does not match the space");
    IPBM_REQUIRE(t >= 0 && t < space.partition().tet_count(), "eval_s0d_on_tet: tetrahedron index out of range");
    const int slot = deriv_slot(d);
    const BernsteinEvaluator ev(space.degree());
    ActiveBasis basis;
    ev.evaluate(space.partition().tet(t), p, d.order(), basis);
    const int* dofs = space.tet_dofs(t);
    double s = 0.0;
    for (int n = 0; n < ev.size(); ++n) s += c[dofs[n]] * basis.ders[slot][n];
    return s;
}

double eval_s0d_spline(const S0dSpace& space, const Eigen::VectorXd& c, const Point3& p, Deriv d)
{
    return eval_s0d_on_tet(space, c, space.partition().locate(p), p, d);
}

std::vector<double> eval_s0d_spline(const S0dSpace& space, const Eigen::VectorXd& c,
                                    const std::vector<Point3>& points)
{
    IPBM_REQUIRE(c.size() == space.dimension(), "eval_s0d_spline: coefficient count does not match the space");
    const auto& part = space.partition();
    std::vector<int> owner(points.size());
    for (std::size_t i = 0; i < points.size(); ++i) owner[i] = part.locate(points[i]);
    const BernsteinEvaluator ev(space.degree());
    std::vector<double> out(points.size());
    const auto n = static_cast<std::int64_t>(points.size());
#pragma omp parallel
    {
        ActiveBasis basis;
#pragma omp for schedule(static)
        for (std::int64_t i = 0; i < n; ++i) {
            ev.evaluate(part.tet(owner[i]), points[i], 0, basis);
            const int* dofs = space.tet_dofs(owner[i]);
            double s = 0.0;
            for (int q = 0; q < ev.size(); ++q) s += c[dofs[q]] * basis.ders[0][q];
            out[i] = s;
        }
    }
    return out;
}

Eigen::VectorXd interpolate_polynomial(const S0dSpace& space, const std::function<double(const Point3&)>& u)
{
    // The Bernstein collocation matrix at domain points is affine invariant: factor it once.
    const int d = space.degree();
    const int nloc = space.local_count();
    const Tetrahedron ref({Point3(0, 0, 0), Point3(1, 0, 0), Point3(0, 1, 0), Point3(0, 0, 1)});
    const auto ref_pts = domain_points(ref, d);
    const BernsteinEvaluator ev(d);
    Eigen::MatrixXd A(nloc, nloc);
    ActiveBasis basis;
    for (int p = 0; p < nloc; ++p) {
        ev.evaluate(ref, ref_pts[p], 0, basis);
        for (int n = 0; n < nloc; ++n) A(p, n) = basis.ders[0][n];
    }
    const Eigen::PartialPivLU<Eigen::MatrixXd> lu(A);

    Eigen::VectorXd c = Eigen::VectorXd::Zero(space.dimension());
    const auto& part = space.partition();
    Eigen::VectorXd f(nloc);
    for (int t = 0; t < part.tet_count(); ++t) {
        const auto pts = domain_points(part.tet(t), d);
        for (int p = 0; p < nloc; ++p) f[p] = u(pts[p]);
        const Eigen::VectorXd local = lu.solve(f);
        const int* dofs = space.tet_dofs(t);
        for (int n = 0; n < nloc; ++n) c[dofs[n]] = local[n];
    }
    return c;
}

SparseRowMatrix build_smoothness_matrix(const S0dSpace& space)
{
    const auto& part = space.partition();
    const auto& faces = part.interior_faces();
    const int d = space.degree();
    const auto& set = space.indices();

    std::vector<std::array<int, 3>> ijk;
    for (int i = d - 1; i >= 0; --i) {
        for (int j = d - 1 - i; j >= 0; --j) ijk.push_back({i, j, d - 1 - i - j});
    }
    const int per_face = static_cast<int>(ijk.size());
    const auto nfaces = static_cast<std::int64_t>(faces.size());

    std::vector<std::array<Eigen::Triplet<double>, 5>> entries(static_cast<std::size_t>(nfaces) * per_face);
    std::vector<int> entry_count(entries.size(), 0);

#pragma omp parallel for schedule(static)
    for (std::int64_t f = 0; f < nfaces; ++f) {
        const auto& face = faces[f];
        // role r in {f1, f2, f3, opposite} -> local vertex slot in each tetrahedron
        std::array<std::array<int, 4>, 2> slot{};
        for (int s = 0; s < 2; ++s) {
            const auto& tv = part.tets()[face.tets[s]];
            for (int r = 0; r < 4; ++r) {
                const int vid = r < 3 ? face.vertices[r] : face.opposite[s];
                slot[s][r] = static_cast<int>(std::find(tv.begin(), tv.end(), vid) - tv.begin());
            }
        }
        const auto local = [&](int s, int i, int j, int k, int l) {
            std::array<int, 4> a{};
            a[slot[s][0]] = i;
            a[slot[s][1]] = j;
            a[slot[s][2]] = k;
            a[slot[s][3]] = l;
            return space.global_index(face.tets[s], set.position(a));
        };
        const Eigen::Vector4d bt = part.tet(face.tets[0]).barycentric(part.vertices()[face.opposite[1]]);
        const std::array<double, 4> b = {bt[slot[0][0]], bt[slot[0][1]], bt[slot[0][2]], bt[slot[0][3]]};

        for (int r = 0; r < per_face; ++r) {
            const auto [i, j, k] = ijk[r];
            const std::size_t row = static_cast<std::size_t>(f) * per_face + r;
            auto& e = entries[row];
            int n = 0;
            const auto add = [&](int col, double v) {
                if (std::abs(v) > 1e-15) e[n++] = Eigen::Triplet<double>(static_cast<int>(row), col, v);
            };
            add(local(1, i, j, k, 1), -1.0);
            add(local(0, i + 1, j, k, 0), b[0]);
            add(local(0, i, j + 1, k, 0), b[1]);
            add(local(0, i, j, k + 1, 0), b[2]);
            add(local(0, i, j, k, 1), b[3]);
            entry_count[row] = n;
        }
    }

    std::vector<Eigen::Triplet<double>> triplets;
    triplets.reserve(entries.size() * 5);
    for (std::size_t r = 0; r < entries.size(); ++r) {
        triplets.insert(triplets.end(), entries[r].begin(), entries[r].begin() + entry_count[r]);
    }
    SparseRowMatrix E(static_cast<Eigen::Index>(entries.size()), space.dimension());
    E.setFromTriplets(triplets.begin(), triplets.end());
    return E;
}

}  // namespace ipbm
