#include "ipbm/assembly.hpp"

#include "ipbm/quadrature.hpp"

#include <algorithm>
#include <cstdint>
#include <iomanip>
#include <numeric>
#include <ostream>

namespace ipbm {

std::string to_string(Method m) { return m == Method::ipbf ? "IPBF" : "IPBC"; }

std::string to_string(SpaceKind s) { return s == SpaceKind::tensor_product ? "tensor-product" : "type5"; }

std::string to_string(Block b)
{
    switch (b) {
        case Block::galerkin: return "galerkin";
        case Block::collocation: return "collocation";
        case Block::boundary: return "boundary";
        case Block::smoothness: return "smoothness";
    }
    return "unknown";
}

Method parse_method(const std::string& s)
{
    if (s == "IPBF" || s == "ipbf") return Method::ipbf;
    if (s == "IPBC" || s == "ipbc") return Method::ipbc;
    throw InvalidArgument("unknown method '" + s + "' (expected IPBF or IPBC)");
}

SpaceKind parse_space_kind(const std::string& s)
{
    if (s == "tensor-product" || s == "tp") return SpaceKind::tensor_product;
    if (s == "type5") return SpaceKind::type5;
    throw InvalidArgument("unknown space '" + s + "' (expected tensor-product or type5)");
}

void SolverConfig::validate() const
{
    IPBM_REQUIRE(m >= 2, "config: m must be >= 2");
    IPBM_REQUIRE(lambda > 0.0, "config: lambda must be > 0");
    IPBM_REQUIRE(nb >= 1, "config: nb must be >= 1");
    for (int d : degrees) IPBM_REQUIRE(d >= 1 && d <= kMaxSplineDegree, "config: degree out of range [1, 15]");
    if (space == SpaceKind::type5) {
        IPBM_REQUIRE(lambda_s > 0.0, "config: lambda_s must be > 0 for type5 spaces");
        IPBM_REQUIRE(degrees[0] == degrees[1] && degrees[1] == degrees[2],
                     "config: type5 spaces take a single degree d");
        if (method == Method::ipbc) IPBM_REQUIRE(d_c >= 2, "config: d_c must be >= 2");
    } else if (method == Method::ipbc) {
        IPBM_REQUIRE(m_c >= 2, "config: m_c must be >= 2");
    }
    IPBM_REQUIRE(box_quad_points >= 0 && box_quad_points <= 30, "config: box quadrature points out of range");
    IPBM_REQUIRE(tet_quad_degree == 0 || (tet_quad_degree >= 4 && tet_quad_degree <= 20 && tet_quad_degree % 2 == 0),
                 "config: tet quadrature degree must be even in [4, 20]");
}

std::array<int, 3> SolverConfig::box_quadrature_points() const
{
    if (box_quad_points > 0) return {box_quad_points, box_quad_points, box_quad_points};
    return {degrees[0] + 2, degrees[1] + 2, degrees[2] + 2};
}

int SolverConfig::tet_quadrature_degree() const
{
    if (tet_quad_degree > 0) return tet_quad_degree;
    const int twice = 2 * degrees[0];
    return std::min(std::max(twice + twice % 2, 4), 12);
}

SplineSpace build_space(const Box& box, const SolverConfig& config)
{
    config.validate();
    if (config.space == SpaceKind::tensor_product) return build_tp_space(box, config.m, config.degrees);
    return build_s0d_space(build_type5_partition(box, config.m), config.degrees[0]);
}

int space_dimension(const SplineSpace& space)
{
    return std::visit([](const auto& s) { return s.dimension(); }, space);
}

double space_mesh_size(const SplineSpace& space)
{
    return std::visit([](const auto& s) { return s.mesh_size(); }, space);
}

double eval_spline(const SplineSpace& space, const Eigen::VectorXd& c, const Point3& p, Deriv d)
{
    if (const auto* tp = std::get_if<TensorProductSpace>(&space)) return eval_tp_spline(*tp, c, p, d);
    return eval_s0d_spline(std::get<S0dSpace>(space), c, p, d);
}

std::vector<double> eval_spline(const SplineSpace& space, const Eigen::VectorXd& c, const std::vector<Point3>& pts)
{
    if (const auto* tp = std::get_if<TensorProductSpace>(&space)) return eval_tp_spline(*tp, c, pts);
    return eval_s0d_spline(std::get<S0dSpace>(space), c, pts);
}

const RowBlock* LinearSystem::block(Block kind) const
{
    for (const auto& b : blocks) {
        if (b.kind == kind) return &b;
    }
    return nullptr;
}

PointSet collocation_points_tp(const TensorProductSpace& space, int m_c)
{
    IPBM_REQUIRE(m_c >= 2, "collocation_points_tp: m_c must be >= 2");
    // Subbox lattices that include their corners coincide on shared faces, so their
    // union is one global lattice with (m-1)(m_c-1)+1 points per axis.
    const int n = (space.grid_lines() - 1) * (m_c - 1) + 1;
    PointSet out = grid_points(space.box(), n);
    out.role = PointRole::collocation;
    return out;
}

PointSet collocation_points_tet(const TetPartition& partition, int d_c)
{
    IPBM_REQUIRE(d_c >= 2, "collocation_points_tet: d_c must be >= 2");
    PointDeduplicator dedup(partition.bbox().lo, partition.bbox().max_edge(), 1e-10);
    for (int t = 0; t < partition.tet_count(); ++t) {
        for (const auto& p : domain_points(partition.tet(t), d_c)) dedup.insert(p);
    }
    return PointSet{dedup.points(), PointRole::collocation};
}

PointSet collocation_points(const SplineSpace& space, const SolverConfig& config)
{
    if (const auto* tp = std::get_if<TensorProductSpace>(&space)) return collocation_points_tp(*tp, config.m_c);
    return collocation_points_tet(std::get<S0dSpace>(space).partition(), config.d_c);
}

namespace {

struct SparseRow {
    std::vector<int> cols;
    std::vector<double> vals;
};

void sort_row(SparseRow& row)
{
    std::vector<int> order(row.cols.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) { return row.cols[a] < row.cols[b]; });
    SparseRow sorted;
    sorted.cols.reserve(order.size());
    sorted.vals.reserve(order.size());
    for (int k : order) {
        if (!sorted.cols.empty() && sorted.cols.back() == row.cols[k]) {
            sorted.vals.back() += row.vals[k];
        } else {
            sorted.cols.push_back(row.cols[k]);
            sorted.vals.push_back(row.vals[k]);
        }
    }
    row = std::move(sorted);
}

SparseRowMatrix rows_to_matrix(const std::vector<SparseRow>& rows, int ncols)
{
    SparseRowMatrix H(static_cast<Eigen::Index>(rows.size()), ncols);
    Eigen::VectorXi nnz(static_cast<Eigen::Index>(rows.size()));
    for (std::size_t r = 0; r < rows.size(); ++r) nnz[static_cast<Eigen::Index>(r)] = static_cast<int>(rows[r].cols.size());
    H.reserve(nnz);
    for (std::size_t r = 0; r < rows.size(); ++r) {
        for (std::size_t k = 0; k < rows[r].cols.size(); ++k) {
            H.insert(static_cast<Eigen::Index>(r), rows[r].cols[k]) = rows[r].vals[k];
        }
    }
    H.makeCompressed();
    return H;
}

void require_in_box(const Box& box, const PointSet& pts, const char* what)
{
    for (const auto& p : pts.points) {
        if (!box.contains(p, kBoxTolerance)) {
            throw InvalidArgument(std::string(what) + " point (" + std::to_string(p.x()) + ", " +
                                  std::to_string(p.y()) + ", " + std::to_string(p.z()) +
                                  ") outside the bounding box");
        }
    }
}

const Box& space_box(const SplineSpace& space)
{
    if (const auto* tp = std::get_if<TensorProductSpace>(&space)) return tp->box();
    return std::get<S0dSpace>(space).partition().bbox();
}

/// Basis functions active at p with their values (max_order 0) or the operator applied (max_order 2).
class PointBasis {
public:
    explicit PointBasis(const SplineSpace& space) : space_(space)
    {
        if (const auto* s = std::get_if<S0dSpace>(&space)) evaluator_.emplace(s->degree());
    }

    void evaluate(const Point3& p, int max_order)
    {
        if (const auto* tp = std::get_if<TensorProductSpace>(&space_)) {
            tp->active_basis(p, max_order, basis);
            return;
        }
        const auto& s = std::get<S0dSpace>(space_);
        const int t = s.partition().locate(p);
        evaluator_->evaluate(s.partition().tet(t), p, max_order, basis);
        const int* dofs = s.tet_dofs(t);
        for (auto& i : basis.index) i = dofs[i];
    }

    ActiveBasis basis;

private:
    const SplineSpace& space_;
    std::optional<BernsteinEvaluator> evaluator_;
};

std::vector<SparseRow> boundary_rows(const SplineSpace& space, const BVPDefinition& bvp, const PointSet& B,
                                     double lambda, std::vector<double>& rhs)
{
    const auto n = static_cast<std::int64_t>(B.size());
    std::vector<SparseRow> rows(B.size());
    rhs.assign(B.size(), 0.0);
#pragma omp parallel
    {
        PointBasis pb(space);
#pragma omp for schedule(static)
        for (std::int64_t i = 0; i < n; ++i) {
            const Point3& p = B.points[i];
            pb.evaluate(p, 0);
            auto& row = rows[i];
            row.cols = pb.basis.index;
            row.vals = pb.basis.ders[0];
            for (auto& v : row.vals) v *= lambda;
            sort_row(row);
            rhs[i] = lambda * bvp.g(p);
        }
    }
    return rows;
}

std::vector<SparseRow> collocation_rows(const SplineSpace& space, const BVPDefinition& bvp, const PointSet& gamma,
                                        std::vector<double>& rhs)
{
    const auto n = static_cast<std::int64_t>(gamma.size());
    std::vector<SparseRow> rows(gamma.size());
    rhs.assign(gamma.size(), 0.0);
#pragma omp parallel
    {
        PointBasis pb(space);
#pragma omp for schedule(static)
        for (std::int64_t i = 0; i < n; ++i) {
            const Point3& p = gamma.points[i];
            pb.evaluate(p, 2);
            const Coefficients a = bvp.a(p);
            auto& row = rows[i];
            row.cols = pb.basis.index;
            row.vals.resize(row.cols.size());
            for (std::size_t q = 0; q < row.cols.size(); ++q) {
                const Second s = {pb.basis.ders[4][q], pb.basis.ders[5][q], pb.basis.ders[6][q],
                                  pb.basis.ders[7][q], pb.basis.ders[8][q], pb.basis.ders[9][q]};
                row.vals[q] = apply_operator(a, s);
            }
            sort_row(row);
            rhs[i] = bvp.f(p);
        }
    }
    return rows;
}

std::vector<SparseRow> smoothness_rows(const SplineSpace& space, double lambda_s)
{
    const auto* s = std::get_if<S0dSpace>(&space);
    if (!s) return {};
    const SparseRowMatrix E = build_smoothness_matrix(*s);
    std::vector<SparseRow> rows(static_cast<std::size_t>(E.rows()));
    for (Eigen::Index r = 0; r < E.rows(); ++r) {
        for (SparseRowMatrix::InnerIterator it(E, r); it; ++it) {
            rows[r].cols.push_back(static_cast<int>(it.col()));
            rows[r].vals.push_back(lambda_s * it.value());
        }
    }
    return rows;
}

/// Sum of element contributions per global basis function, in ascending element order.
std::vector<SparseRow> gather_galerkin(const ElementMatrices& el, int n, std::vector<double>& rhs)
{
    std::vector<std::vector<std::pair<int, int>>> owners(n);
    for (std::size_t e = 0; e < el.dofs.size(); ++e) {
        for (std::size_t l = 0; l < el.dofs[e].size(); ++l) owners[el.dofs[e][l]].emplace_back(int(e), int(l));
    }
    std::vector<SparseRow> rows(n);
    rhs.assign(n, 0.0);
#pragma omp parallel
    {
        std::vector<double> acc(n, 0.0);
        std::vector<char> seen(n, 0);
        std::vector<int> touched;
#pragma omp for schedule(dynamic, 16)
        for (int i = 0; i < n; ++i) {
            double b = 0.0;
            touched.clear();
            for (const auto& [e, l] : owners[i]) {
                const auto& dofs = el.dofs[e];
                const auto& K = el.K[e];
                for (std::size_t j = 0; j < dofs.size(); ++j) {
                    const int col = dofs[j];
                    if (!seen[col]) {
                        seen[col] = 1;
                        touched.push_back(col);
                    }
                    acc[col] += K(l, static_cast<Eigen::Index>(j));
                }
                b += el.b[e][l];
            }
            std::sort(touched.begin(), touched.end());
            auto& row = rows[i];
            row.cols = touched;
            row.vals.resize(touched.size());
            for (std::size_t k = 0; k < touched.size(); ++k) {
                row.vals[k] = acc[touched[k]];
                acc[touched[k]] = 0.0;
                seen[touched[k]] = 0;
            }
            rhs[i] = b;
        }
    }
    return rows;
}

LinearSystem stack(int ncols, std::vector<std::pair<Block, std::vector<SparseRow>>> parts,
                   const std::vector<std::vector<double>>& rhs_parts)
{
    LinearSystem sys;
    std::vector<SparseRow> all;
    std::vector<double> rhs;
    for (std::size_t k = 0; k < parts.size(); ++k) {
        auto& [kind, rows] = parts[k];
        if (rows.empty() && kind == Block::smoothness) continue;
        const auto begin = static_cast<Eigen::Index>(all.size());
        all.insert(all.end(), std::make_move_iterator(rows.begin()), std::make_move_iterator(rows.end()));
        if (rhs_parts[k].empty()) {
            rhs.resize(all.size(), 0.0);
        } else {
            rhs.insert(rhs.end(), rhs_parts[k].begin(), rhs_parts[k].end());
        }
        sys.blocks.push_back({kind, begin, static_cast<Eigen::Index>(all.size())});
    }
    sys.H = rows_to_matrix(all, ncols);
    sys.r = Eigen::Map<const Eigen::VectorXd>(rhs.data(), static_cast<Eigen::Index>(rhs.size()));
    return sys;
}

}  // namespace

ElementMatrices galerkin_elements(const SplineSpace& space, const BVPDefinition& bvp, const SolverConfig& config)
{
    ElementMatrices el;
    // Per element: quadrature nodes/weights and a way to evaluate the local basis at a node.
    std::vector<QuadratureRule> rules;
    if (const auto* tp = std::get_if<TensorProductSpace>(&space)) {
        const int cells = tp->grid_lines() - 1;
        const Box& box = tp->box();
        const Point3 h = box.edges() / cells;
        for (int i = 0; i < cells; ++i) {
            for (int j = 0; j < cells; ++j) {
                for (int k = 0; k < cells; ++k) {
                    const Point3 lo = box.lo + h.cwiseProduct(Point3(i, j, k));
                    const Point3 hi = box.lo + h.cwiseProduct(Point3(i + 1, j + 1, k + 1));
                    rules.push_back(box_rule(Box{lo, hi}, config.box_quadrature_points()));
                }
            }
        }
    } else {
        const auto& part = std::get<S0dSpace>(space).partition();
        for (int t = 0; t < part.tet_count(); ++t) {
            rules.push_back(tet_rule(part.tet(t).vertices(), config.tet_quadrature_degree()));
        }
    }

    const auto ne = static_cast<std::int64_t>(rules.size());
    el.dofs.resize(rules.size());
    el.K.resize(rules.size());
    el.b.resize(rules.size());
    const auto* s0d = std::get_if<S0dSpace>(&space);
#pragma omp parallel
    {
        ActiveBasis basis;
        std::optional<BernsteinEvaluator> ev;
        if (s0d) ev.emplace(s0d->degree());
#pragma omp for schedule(dynamic)
        for (std::int64_t e = 0; e < ne; ++e) {
            const auto& rule = rules[e];
            const auto nq = static_cast<Eigen::Index>(rule.size());
            Eigen::MatrixXd phi;
            Eigen::MatrixXd lphi;
            Eigen::VectorXd f(nq);
            for (Eigen::Index q = 0; q < nq; ++q) {
                const Point3& p = rule.nodes[q];
                if (s0d) {
                    ev->evaluate(s0d->partition().tet(static_cast<int>(e)), p, 2, basis);
                } else {
                    std::get<TensorProductSpace>(space).active_basis(p, 2, basis);
                }
                const auto nloc = static_cast<Eigen::Index>(basis.size());
                if (q == 0) {
                    phi.resize(nq, nloc);
                    lphi.resize(nq, nloc);
                    if (s0d) {
                        const int* dofs = s0d->tet_dofs(static_cast<int>(e));
                        el.dofs[e].assign(dofs, dofs + nloc);
                    } else {
                        el.dofs[e] = basis.index;
                    }
                }
                const Coefficients a = bvp.a(p);
                const double w = rule.weights[q];
                for (Eigen::Index l = 0; l < nloc; ++l) {
                    const Second s = {basis.ders[4][l], basis.ders[5][l], basis.ders[6][l],
                                      basis.ders[7][l], basis.ders[8][l], basis.ders[9][l]};
                    phi(q, l) = w * basis.ders[0][l];
                    lphi(q, l) = apply_operator(a, s);
                }
                f[q] = bvp.f(p);
            }
            el.K[e].noalias() = phi.transpose() * lphi;
            el.b[e].noalias() = phi.transpose() * f;
        }
    }
    return el;
}

LinearSystem assemble_ipbf(const SplineSpace& space, const BVPDefinition& bvp, const PointSet& B,
                           const SolverConfig& config)
{
    config.validate();
    IPBM_REQUIRE(!B.empty(), "assemble_ipbf: empty boundary point set");
    require_in_box(space_box(space), B, "boundary");
    const int n = space_dimension(space);
    std::vector<std::vector<double>> rhs(3);
    auto galerkin = gather_galerkin(galerkin_elements(space, bvp, config), n, rhs[0]);
    auto boundary = boundary_rows(space, bvp, B, config.lambda, rhs[1]);
    auto smooth = smoothness_rows(space, config.lambda_s);
    return stack(n, {{Block::galerkin, std::move(galerkin)}, {Block::boundary, std::move(boundary)},
                     {Block::smoothness, std::move(smooth)}},
                 rhs);
}

LinearSystem assemble_ipbc(const SplineSpace& space, const BVPDefinition& bvp, const PointSet& gamma,
                           const PointSet& B, const SolverConfig& config)
{
    config.validate();
    IPBM_REQUIRE(!gamma.empty(), "assemble_ipbc: empty collocation point set");
    IPBM_REQUIRE(!B.empty(), "assemble_ipbc: empty boundary point set");
    require_in_box(space_box(space), gamma, "collocation");
    require_in_box(space_box(space), B, "boundary");
    const int n = space_dimension(space);
    std::vector<std::vector<double>> rhs(3);
    auto colloc = collocation_rows(space, bvp, gamma, rhs[0]);
    auto boundary = boundary_rows(space, bvp, B, config.lambda, rhs[1]);
    auto smooth = smoothness_rows(space, config.lambda_s);
    return stack(n, {{Block::collocation, std::move(colloc)}, {Block::boundary, std::move(boundary)},
                     {Block::smoothness, std::move(smooth)}},
                 rhs);
}

void write_system_triplets(const LinearSystem& sys, std::ostream& out)
{
    out << std::setprecision(17);
    out << "# rows cols nnz\n" << sys.rows() << ' ' << sys.cols() << ' ' << sys.H.nonZeros() << '\n';
    out << "# row col value (0-based)\n";
    for (Eigen::Index r = 0; r < sys.H.outerSize(); ++r) {
        for (SparseRowMatrix::InnerIterator it(sys.H, r); it; ++it) out << r << ' ' << it.col() << ' ' << it.value() << '\n';
    }
    out << "# rhs row value\n";
    for (Eigen::Index r = 0; r < sys.r.size(); ++r) out << "rhs " << r << ' ' << sys.r[r] << '\n';
}

}  // namespace ipbm
