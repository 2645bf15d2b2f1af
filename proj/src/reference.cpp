#include "ipbm/reference.hpp"

#include "ipbm/quadrature.hpp"

#include <cmath>
#include <limits>

namespace ipbm::reference {

namespace {

bool crosses(const Point3& p, const Point3& dir, const Point3& a, const Point3& b, const Point3& c)
{
    // Solve p + t dir = a + u (b - a) + v (c - a) by Cramer's rule.
    Eigen::Matrix3d M;
    M.col(0) = -dir;
    M.col(1) = b - a;
    M.col(2) = c - a;
    const double det = M.determinant();
    if (std::abs(det) < 1e-14) return false;
    const Point3 rhs = p - a;
    Eigen::Matrix3d Mt = M;
    Mt.col(0) = rhs;
    const double t = Mt.determinant() / det;
    Mt = M;
    Mt.col(1) = rhs;
    const double u = Mt.determinant() / det;
    Mt = M;
    Mt.col(2) = rhs;
    const double v = Mt.determinant() / det;
    return t > 1e-14 && u >= 0.0 && v >= 0.0 && u + v <= 1.0;
}

/// All n basis functions (value or one derivative) at p.
Eigen::VectorXd full_basis(const SplineSpace& space, const Point3& p, Deriv d)
{
    const int n = space_dimension(space);
    Eigen::VectorXd out = Eigen::VectorXd::Zero(n);
    if (const auto* tp = std::get_if<TensorProductSpace>(&space)) {
        for (int j = 0; j < n; ++j) out[j] = tp->basis_function(j, p, d);
        return out;
    }
    const auto& s = std::get<S0dSpace>(space);
    const int t = s.partition().locate(p);
    const auto vals = eval_bernstein(s.partition().tet(t), s.degree(), p, d);
    for (int l = 0; l < s.local_count(); ++l) out[s.global_index(t, l)] = vals[l];
    return out;
}

/// Same, restricted to one tetrahedron (quadrature nodes may sit on shared faces).
Eigen::VectorXd tet_basis(const S0dSpace& s, int t, const Point3& p, Deriv d)
{
    Eigen::VectorXd out = Eigen::VectorXd::Zero(s.dimension());
    const auto vals = eval_bernstein(s.partition().tet(t), s.degree(), p, d);
    for (int l = 0; l < s.local_count(); ++l) out[s.global_index(t, l)] = vals[l];
    return out;
}

Eigen::VectorXd apply_l(const BVPDefinition& bvp, const Point3& p, const std::array<Eigen::VectorXd, 6>& second)
{
    const Coefficients a = bvp.a(p);
    Eigen::VectorXd out = Eigen::VectorXd::Zero(second[0].size());
    const double w[6] = {1.0, 1.0, 1.0, 2.0, 2.0, 2.0};
    for (int k = 0; k < 6; ++k) out += w[k] * a[k] * second[k];
    return out;
}

/// Lphi_j at p for all j, with the derivatives taken from `basis`.
template <class Basis>
Eigen::VectorXd operator_row(const BVPDefinition& bvp, const Point3& p, Basis basis)
{
    std::array<Eigen::VectorXd, 6> second;
    for (int k = 0; k < 6; ++k) second[k] = basis(deriv::second[k]);
    return apply_l(bvp, p, second);
}

void append_boundary(const SplineSpace& space, const BVPDefinition& bvp, const PointSet& B, double lambda,
                     Eigen::Index first_row, DenseSystem& sys)
{
    for (std::size_t i = 0; i < B.size(); ++i) {
        const Point3& p = B[i];
        sys.H.row(first_row + i) = lambda * full_basis(space, p, deriv::value).transpose();
        sys.r[first_row + i] = lambda * bvp.g(p);
    }
}

void append_smoothness(const SplineSpace& space, double lambda_s, Eigen::Index first_row, DenseSystem& sys)
{
    const auto* s = std::get_if<S0dSpace>(&space);
    if (!s) return;
    const Eigen::MatrixXd E(build_smoothness_matrix(*s));
    sys.H.middleRows(first_row, E.rows()) = lambda_s * E;
}

Eigen::Index smoothness_count(const SplineSpace& space)
{
    const auto* s = std::get_if<S0dSpace>(&space);
    return s ? build_smoothness_matrix(*s).rows() : 0;
}

}  // namespace

std::vector<char> mesh_inside_flags(const TriangleMesh& mesh, const std::vector<Point3>& points)
{
    mesh.validate();
    const auto dirs = parity_ray_directions();
    std::vector<char> inside(points.size(), 0);
    for (std::size_t i = 0; i < points.size(); ++i) {
        int votes = 0;
        for (const auto& dir : dirs) {
            int hits = 0;
            for (const auto& tri : mesh.triangles) {
                hits += crosses(points[i], dir, mesh.vertices[tri[0]], mesh.vertices[tri[1]], mesh.vertices[tri[2]]);
            }
            votes += hits % 2;
        }
        inside[i] = votes >= 2 ? 1 : 0;
    }
    return inside;
}

PointSet farthest_point_downsample_from(const PointSet& cloud, std::size_t nb, std::size_t start)
{
    IPBM_REQUIRE(nb >= 1 && nb <= cloud.size() && start < cloud.size(), "reference FPS: bad arguments");
    PointSet out;
    out.role = cloud.role;
    std::vector<std::size_t> chosen{start};
    while (chosen.size() < nb) {
        double best = -1.0;
        std::size_t best_index = 0;
        for (std::size_t i = 0; i < cloud.size(); ++i) {
            double d2 = std::numeric_limits<double>::infinity();
            for (std::size_t c : chosen) d2 = std::min(d2, (cloud[i] - cloud[c]).squaredNorm());
            if (d2 > best) {
                best = d2;
                best_index = i;
            }
        }
        chosen.push_back(best_index);
    }
    for (std::size_t c : chosen) out.points.push_back(cloud[c]);
    return out;
}

double eval_spline(const SplineSpace& space, const Eigen::VectorXd& c, const Point3& p, Deriv d)
{
    return full_basis(space, p, d).dot(c);
}

std::vector<double> eval_spline(const SplineSpace& space, const Eigen::VectorXd& c, const std::vector<Point3>& pts)
{
    std::vector<double> out;
    out.reserve(pts.size());
    for (const auto& p : pts) out.push_back(reference::eval_spline(space, c, p));
    return out;
}

ErrorSummary evaluate_errors(const SplineSpace& space, const Eigen::VectorXd& c,
                             const std::function<double(const Point3&)>& u, const PointSet& pts)
{
    std::vector<double> errors;
    for (const auto& p : pts.points) errors.push_back(reference::eval_spline(space, c, p) - u(p));
    return summarize_errors(errors);
}

DenseSystem assemble_ipbf(const SplineSpace& space, const BVPDefinition& bvp, const PointSet& B,
                          const SolverConfig& config)
{
    config.validate();
    const int n = space_dimension(space);
    const Eigen::Index ns = smoothness_count(space);
    DenseSystem sys;
    sys.H = Eigen::MatrixXd::Zero(n + static_cast<Eigen::Index>(B.size()) + ns, n);
    sys.r = Eigen::VectorXd::Zero(sys.H.rows());

    auto add_node = [&](const Point3& p, double w, const Eigen::VectorXd& phi, const Eigen::VectorXd& lphi) {
        const double f = bvp.f(p);
        for (int i = 0; i < n; ++i) {
            if (phi[i] == 0.0) continue;
            sys.H.row(i) += (w * phi[i]) * lphi.transpose();
            sys.r[i] += w * phi[i] * f;
        }
    };

    if (const auto* tp = std::get_if<TensorProductSpace>(&space)) {
        const int cells = tp->grid_lines() - 1;
        const Point3 h = tp->box().edges() / cells;
        for (int i = 0; i < cells; ++i) {
            for (int j = 0; j < cells; ++j) {
                for (int k = 0; k < cells; ++k) {
                    const Point3 lo = tp->box().lo + h.cwiseProduct(Point3(i, j, k));
                    const auto rule = box_rule(Box{lo, lo + h}, config.box_quadrature_points());
                    for (std::size_t q = 0; q < rule.size(); ++q) {
                        const Point3& p = rule.nodes[q];
                        const auto basis = [&](Deriv d) { return full_basis(space, p, d); };
                        add_node(p, rule.weights[q], basis(deriv::value), operator_row(bvp, p, basis));
                    }
                }
            }
        }
    } else {
        const auto& s = std::get<S0dSpace>(space);
        for (int t = 0; t < s.partition().tet_count(); ++t) {
            const auto rule = tet_rule(s.partition().tet(t).vertices(), config.tet_quadrature_degree());
            for (std::size_t q = 0; q < rule.size(); ++q) {
                const Point3& p = rule.nodes[q];
                const auto basis = [&](Deriv d) { return tet_basis(s, t, p, d); };
                add_node(p, rule.weights[q], basis(deriv::value), operator_row(bvp, p, basis));
            }
        }
    }
    append_boundary(space, bvp, B, config.lambda, n, sys);
    append_smoothness(space, config.lambda_s, n + static_cast<Eigen::Index>(B.size()), sys);
    return sys;
}

DenseSystem assemble_ipbc(const SplineSpace& space, const BVPDefinition& bvp, const PointSet& gamma,
                          const PointSet& B, const SolverConfig& config)
{
    config.validate();
    const int n = space_dimension(space);
    const auto nc = static_cast<Eigen::Index>(gamma.size());
    const auto nbnd = static_cast<Eigen::Index>(B.size());
    DenseSystem sys;
    sys.H = Eigen::MatrixXd::Zero(nc + nbnd + smoothness_count(space), n);
    sys.r = Eigen::VectorXd::Zero(sys.H.rows());
    for (Eigen::Index i = 0; i < nc; ++i) {
        const Point3& p = gamma[static_cast<std::size_t>(i)];
        sys.H.row(i) = operator_row(bvp, p, [&](Deriv d) { return full_basis(space, p, d); }).transpose();
        sys.r[i] = bvp.f(p);
    }
    append_boundary(space, bvp, B, config.lambda, nc, sys);
    append_smoothness(space, config.lambda_s, nc + nbnd, sys);
    return sys;
}

}  // namespace ipbm::reference
