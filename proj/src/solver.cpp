#include "ipbm/solver.hpp"

#include <Eigen/Dense>
#include <Eigen/QR>
#include <Eigen/SVD>
#include <Eigen/SparseCholesky>

#include <chrono>
#include <cmath>
#include <limits>

namespace ipbm {

std::string to_string(SolvePath p)
{
    switch (p) {
        case SolvePath::automatic: return "automatic";
        case SolvePath::dense: return "dense-qr";
        case SolvePath::iterative: return "cgls";
    }
    return "unknown";
}

bool numerically_rank_deficient(double sigma_min, double sigma_max, Eigen::Index n)
{
    const double eps = std::numeric_limits<double>::epsilon();
    return !(sigma_min > static_cast<double>(n) * eps * sigma_max);
}

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0)
{
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

constexpr int kPowerIterations = 200;
constexpr double kPowerTolerance = 1e-8;

/// Largest eigenvalue of the SPD operator `apply` by power iteration.
template <class Apply>
double power_iteration(Eigen::Index n, Apply apply)
{
    Eigen::VectorXd v = Eigen::VectorXd::Ones(n).normalized();
    double lambda = 0.0;
    for (int it = 0; it < kPowerIterations; ++it) {
        Eigen::VectorXd w = apply(v);
        const double next = v.dot(w);
        const double norm = w.norm();
        if (norm == 0.0) return 0.0;
        v = w / norm;
        if (it > 0 && std::abs(next - lambda) <= kPowerTolerance * std::abs(next)) return next;
        lambda = next;
    }
    return lambda;
}

/// Condition of R'R from the upper-triangular factor R.
ConditionEstimate condition_from_r(const Eigen::MatrixXd& R, const SolveOptions& options)
{
    const Eigen::Index n = R.cols();
    ConditionEstimate est;
    if (n <= options.exact_condition_limit) {
        const Eigen::BDCSVD<Eigen::MatrixXd> svd(R);
        const auto& s = svd.singularValues();
        est.exact = true;
        est.rank_deficient = numerically_rank_deficient(s[n - 1], s[0], n);
        est.value = est.rank_deficient ? std::numeric_limits<double>::infinity() : std::pow(s[0] / s[n - 1], 2);
        return est;
    }
    const auto tri = R.triangularView<Eigen::Upper>();
    const double lmax = power_iteration(n, [&](const Eigen::VectorXd& v) {
        const Eigen::VectorXd w = tri * v;
        return Eigen::VectorXd(tri.transpose() * w);
    });
    const double rmax = R.diagonal().cwiseAbs().maxCoeff();
    const double rmin = R.diagonal().cwiseAbs().minCoeff();
    if (numerically_rank_deficient(rmin, rmax, n)) {
        est.rank_deficient = true;
        est.value = std::numeric_limits<double>::infinity();
        return est;
    }
    const double inv_lmin = power_iteration(n, [&](const Eigen::VectorXd& v) {
        const Eigen::VectorXd w = tri.transpose().solve(v);
        return Eigen::VectorXd(tri.solve(w));
    });
    const double lmin = 1.0 / inv_lmin;
    est.rank_deficient = numerically_rank_deficient(std::sqrt(std::max(lmin, 0.0)), std::sqrt(lmax), n);
    est.value = est.rank_deficient ? std::numeric_limits<double>::infinity() : lmax / lmin;
    return est;
}

SolveResult solve_dense(const LinearSystem& sys, const SolveOptions& options)
{
    SolveResult res;
    res.path = SolvePath::dense;
    const Eigen::Index n = sys.cols();
    const Eigen::MatrixXd Hd(sys.H);
    const Eigen::HouseholderQR<Eigen::MatrixXd> qr(Hd);
    const Eigen::VectorXd qtr = qr.householderQ().adjoint() * sys.r;
    const Eigen::MatrixXd R = qr.matrixQR().topRows(n).triangularView<Eigen::Upper>();

    ConditionEstimate est;
    if (options.compute_condition) {
        est = condition_from_r(R, options);
        res.gram_condition = est.value;
        res.condition_exact = est.exact;
        res.rank_deficient = est.rank_deficient;
    } else {
        res.gram_condition = std::numeric_limits<double>::quiet_NaN();
    }

    if (!res.rank_deficient) {
        res.c = R.triangularView<Eigen::Upper>().solve(qtr.head(n));
        if (!res.c.allFinite()) res.rank_deficient = true;
    }
    if (res.rank_deficient) {
        // Minimum-norm solution of R c = Q'r; R carries all the rank information of H.
        if (n <= options.exact_condition_limit) {
            Eigen::BDCSVD<Eigen::MatrixXd> svd(R, Eigen::ComputeThinU | Eigen::ComputeThinV);
            svd.setThreshold(static_cast<double>(n) * std::numeric_limits<double>::epsilon());
            res.c = svd.solve(qtr.head(n));
        } else {
            Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(R);
            cod.setThreshold(static_cast<double>(n) * std::numeric_limits<double>::epsilon());
            res.c = cod.solve(qtr.head(n));
        }
        res.gram_condition = std::numeric_limits<double>::infinity();
    }
    return res;
}

SolveResult solve_iterative(const LinearSystem& sys, const SolveOptions& options)
{
    SolveResult res;
    res.path = SolvePath::iterative;
    const Eigen::Index n = sys.cols();
    const SparseRowMatrix& H = sys.H;

    // Column scaling D = diag(1 / ||H e_j||): CGLS on H D is diagonally preconditioned CG on G.
    Eigen::VectorXd dscale = Eigen::VectorXd::Zero(n);
    for (Eigen::Index r = 0; r < H.outerSize(); ++r) {
        for (SparseRowMatrix::InnerIterator it(H, r); it; ++it) dscale[it.col()] += it.value() * it.value();
    }
    bool empty_column = false;
    for (Eigen::Index j = 0; j < n; ++j) {
        if (dscale[j] > 0.0) {
            dscale[j] = 1.0 / std::sqrt(dscale[j]);
        } else {
            dscale[j] = 0.0;
            empty_column = true;
        }
    }

    const int max_it = options.max_iterations > 0 ? options.max_iterations : static_cast<int>(10 * n);
    Eigen::VectorXd y = Eigen::VectorXd::Zero(n);
    Eigen::VectorXd s = sys.r;
    Eigen::VectorXd t = dscale.cwiseProduct(H.transpose() * s);
    Eigen::VectorXd p = t;
    const double t0_norm = t.norm();
    double gamma = t.squaredNorm();
    res.converged = t0_norm == 0.0;
    int it = 0;
    while (!res.converged && it < max_it) {
        const Eigen::VectorXd q = H * dscale.cwiseProduct(p);
        const double qq = q.squaredNorm();
        if (qq == 0.0) break;
        const double alpha = gamma / qq;
        y += alpha * p;
        s -= alpha * q;
        t = dscale.cwiseProduct(H.transpose() * s);
        const double gamma_next = t.squaredNorm();
        ++it;
        if (std::sqrt(gamma_next) <= options.cg_tolerance * t0_norm) {
            res.converged = true;
            gamma = gamma_next;
            break;
        }
        p = t + (gamma_next / gamma) * p;
        gamma = gamma_next;
    }
    res.iterations = it;
    res.c = dscale.cwiseProduct(y);

    if (options.compute_condition) {
        const auto est = gram_condition(H, options);
        res.gram_condition = est.value;
        res.condition_exact = est.exact;
        res.rank_deficient = est.rank_deficient || empty_column;
        if (empty_column) res.gram_condition = std::numeric_limits<double>::infinity();
    } else {
        res.gram_condition = std::numeric_limits<double>::quiet_NaN();
        res.rank_deficient = empty_column;
    }
    return res;
}

}  // namespace

ConditionEstimate gram_condition(const SparseRowMatrix& H, const SolveOptions& options)
{
    const Eigen::Index n = H.cols();
    IPBM_REQUIRE(n >= 1, "gram_condition: empty matrix");
    if (n <= options.dense_limit) {
        const Eigen::MatrixXd Hd(H);
        const Eigen::HouseholderQR<Eigen::MatrixXd> qr(Hd);
        const Eigen::MatrixXd R = qr.matrixQR().topRows(std::min<Eigen::Index>(n, H.rows()))
                                      .triangularView<Eigen::Upper>();
        if (H.rows() < n) return {std::numeric_limits<double>::infinity(), true, true};
        return condition_from_r(R, options);
    }
    // Large sparse case: power iteration on G for the top eigenvalue, inverse
    // iteration with a sparse LDL' factorization of G for the bottom one.
    const Eigen::SparseMatrix<double> G = (H.transpose() * H).pruned();
    ConditionEstimate est;
    const double lmax = power_iteration(n, [&](const Eigen::VectorXd& v) { return Eigen::VectorXd(G * v); });
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt(G);
    if (ldlt.info() != Eigen::Success || !(ldlt.vectorD().minCoeff() > 0.0)) {
        return {std::numeric_limits<double>::infinity(), false, true};
    }
    const double inv_lmin = power_iteration(n, [&](const Eigen::VectorXd& v) { return Eigen::VectorXd(ldlt.solve(v)); });
    const double lmin = 1.0 / inv_lmin;
    est.rank_deficient = numerically_rank_deficient(std::sqrt(std::max(lmin, 0.0)), std::sqrt(lmax), n);
    est.value = est.rank_deficient ? std::numeric_limits<double>::infinity() : lmax / lmin;
    return est;
}

double condition_number(const LinearSystem& sys, const SolveOptions& options)
{
    return gram_condition(sys.H, options).value;
}

SolveResult solve_least_squares(const LinearSystem& sys, const SolveOptions& options)
{
    IPBM_REQUIRE(sys.rows() >= sys.cols(), "solve_least_squares: fewer rows than unknowns");
    IPBM_REQUIRE(sys.r.size() == sys.rows(), "solve_least_squares: right-hand side size mismatch");
    const auto t0 = Clock::now();
    SolvePath path = options.path;
    if (path == SolvePath::automatic) path = sys.cols() <= options.dense_limit ? SolvePath::dense : SolvePath::iterative;
    SolveResult res = path == SolvePath::dense ? solve_dense(sys, options) : solve_iterative(sys, options);
    res.residual_norm = (sys.H * res.c - sys.r).norm();
    res.solve_seconds = seconds_since(t0);
    return res;
}

ErrorSummary summarize_errors(const std::vector<double>& errors)
{
    ErrorSummary s;
    s.count = errors.size();
    if (errors.empty()) return s;
    double sum = 0.0;
    for (double e : errors) {
        s.emax = std::max(s.emax, std::abs(e));
        sum += e * e;
    }
    s.rms = std::sqrt(sum / static_cast<double>(errors.size()));
    return s;
}

ErrorSummary evaluate_errors(const SplineSpace& space, const Eigen::VectorXd& c,
                             const std::function<double(const Point3&)>& u, const PointSet& pts)
{
    IPBM_REQUIRE(!pts.empty(), "evaluate_errors: empty point set");
    const auto values = eval_spline(space, c, pts.points);
    std::vector<double> errors(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) errors[i] = values[i] - u(pts.points[i]);
    return summarize_errors(errors);
}

std::optional<double> convergence_rate(double e_coarse, double e_fine, int m_coarse, int m_fine)
{
    IPBM_REQUIRE(m_coarse >= 2 && m_fine > m_coarse, "convergence_rate: need m_fine > m_coarse >= 2");
    IPBM_REQUIRE(e_coarse >= 0.0 && e_fine >= 0.0, "convergence_rate: errors must be non-negative");
    if (e_coarse == 0.0 || e_fine == 0.0) return std::nullopt;
    const double h_coarse = 1.0 / (m_coarse - 1);
    const double h_fine = 1.0 / (m_fine - 1);
    return std::log(e_coarse / e_fine) / std::log(h_coarse / h_fine);
}

}  // namespace ipbm
