#include "ipbm/problems.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>

namespace ipbm {

double apply_operator(const Coefficients& a, const Second& s)
{
    return a[0] * s[0] + a[1] * s[1] + a[2] * s[2] + 2.0 * (a[3] * s[3] + a[4] * s[4] + a[5] * s[5]);
}

double apply_operator(const BVPDefinition& bvp, const Second& second, const Point3& p)
{
    return apply_operator(bvp.a(p), second);
}

double BVPDefinition::f(const Point3& p) const { return apply_operator(op.coefficients(p), u.hessian(p)); }

const std::vector<std::string>& solution_ids()
{
    static const std::vector<std::string> ids = {"sin5",   "mono123", "quintic", "sin8-12-14",
                                                 "sinsum", "abs3",    "sin5sum", "zero"};
    return ids;
}

const std::vector<std::string>& operator_ids()
{
    static const std::vector<std::string> ids = {"laplace", "var-diag", "var-full", "weak", "nonelliptic"};
    return ids;
}

namespace {

std::string joined(const std::vector<std::string>& ids)
{
    std::string s;
    for (const auto& id : ids) s += (s.empty() ? "" : ", ") + id;
    return s;
}

/// u = sin(a x) sin(b y) sin(c z)
TrueSolution sine_product(std::string id, double a, double b, double c)
{
    TrueSolution u;
    u.id = std::move(id);
    u.value = [=](const Point3& p) { return std::sin(a * p.x()) * std::sin(b * p.y()) * std::sin(c * p.z()); };
    u.gradient = [=](const Point3& p) {
        const double sx = std::sin(a * p.x()), sy = std::sin(b * p.y()), sz = std::sin(c * p.z());
        const double cx = std::cos(a * p.x()), cy = std::cos(b * p.y()), cz = std::cos(c * p.z());
        return Point3(a * cx * sy * sz, b * sx * cy * sz, c * sx * sy * cz);
    };
    u.hessian = [=](const Point3& p) {
        const double sx = std::sin(a * p.x()), sy = std::sin(b * p.y()), sz = std::sin(c * p.z());
        const double cx = std::cos(a * p.x()), cy = std::cos(b * p.y()), cz = std::cos(c * p.z());
        return Second{-a * a * sx * sy * sz, -b * b * sx * sy * sz, -c * c * sx * sy * sz,
                      a * b * cx * cy * sz,  a * c * cx * sy * cz,  b * c * sx * cy * cz};
    };
    return u;
}

/// u = sin(a x) + sin(b y) + sin(c z)
TrueSolution sine_sum(std::string id, double a, double b, double c)
{
    TrueSolution u;
    u.id = std::move(id);
    u.value = [=](const Point3& p) { return std::sin(a * p.x()) + std::sin(b * p.y()) + std::sin(c * p.z()); };
    u.gradient = [=](const Point3& p) {
        return Point3(a * std::cos(a * p.x()), b * std::cos(b * p.y()), c * std::cos(c * p.z()));
    };
    u.hessian = [=](const Point3& p) {
        return Second{-a * a * std::sin(a * p.x()), -b * b * std::sin(b * p.y()), -c * c * std::sin(c * p.z()),
                      0.0, 0.0, 0.0};
    };
    return u;
}

}  // namespace

TrueSolution make_solution(const std::string& id)
{
    if (id == "sin5") return sine_product(id, 5, 5, 5);
    if (id == "sin8-12-14") return sine_product(id, 8, 12, 14);
    if (id == "sinsum") return sine_sum(id, 8, 12, 14);
    if (id == "sin5sum") return sine_sum(id, 5, 5, 5);

    TrueSolution u;
    u.id = id;
    if (id == "mono123") {
        u.value = [](const Point3& p) { return p.x() * p.y() * p.y() * p.z() * p.z() * p.z(); };
        u.gradient = [](const Point3& p) {
            const double x = p.x(), y = p.y(), z = p.z();
            return Point3(y * y * z * z * z, 2 * x * y * z * z * z, 3 * x * y * y * z * z);
        };
        u.hessian = [](const Point3& p) {
            const double x = p.x(), y = p.y(), z = p.z();
            return Second{0.0, 2 * x * z * z * z, 6 * x * y * y * z, 2 * y * z * z * z, 3 * y * y * z * z,
                          6 * x * y * z * z};
        };
        u.axis_degrees = std::array<int, 3>{1, 2, 3};
        u.total_degree = 6;
        return u;
    }
    if (id == "quintic") {
        u.value = [](const Point3& p) {
            return std::pow(p.x(), 5) + 2 * std::pow(p.y(), 5) + 3 * std::pow(p.z(), 5);
        };
        u.gradient = [](const Point3& p) {
            return Point3(5 * std::pow(p.x(), 4), 10 * std::pow(p.y(), 4), 15 * std::pow(p.z(), 4));
        };
        u.hessian = [](const Point3& p) {
            return Second{20 * std::pow(p.x(), 3), 40 * std::pow(p.y(), 3), 60 * std::pow(p.z(), 3), 0.0, 0.0, 0.0};
        };
        u.axis_degrees = std::array<int, 3>{5, 5, 5};
        u.total_degree = 5;
        return u;
    }
    if (id == "abs3") {
        // u = |t|^3 with t = x + y - z; second derivatives 6|t| times the sign pattern of (1, 1, -1).
        u.value = [](const Point3& p) { return std::pow(std::abs(p.x() + p.y() - p.z()), 3); };
        u.gradient = [](const Point3& p) {
            const double t = p.x() + p.y() - p.z();
            const double g = 3 * t * std::abs(t);
            return Point3(g, g, -g);
        };
        u.hessian = [](const Point3& p) {
            const double h = 6 * std::abs(p.x() + p.y() - p.z());
            return Second{h, h, h, h, -h, -h};
        };
        return u;
    }
    if (id == "zero") {
        u.value = [](const Point3&) { return 0.0; };
        u.gradient = [](const Point3&) { return Point3::Zero().eval(); };
        u.hessian = [](const Point3&) { return Second{}; };
        u.axis_degrees = std::array<int, 3>{0, 0, 0};
        u.total_degree = 0;
        return u;
    }
    throw InvalidArgument("unknown solution '" + id + "' (expected one of: " + joined(solution_ids()) + ")");
}

OperatorPreset make_operator(const std::string& id)
{
    OperatorPreset op;
    op.id = id;
    if (id == "laplace") {
        op.coefficients = [](const Point3&) { return Coefficients{1, 1, 1, 0, 0, 0}; };
    } else if (id == "weak") {
        op.coefficients = [](const Point3&) { return Coefficients{1, 1, 1, 1, 1, 1}; };
    } else if (id == "nonelliptic") {
        op.coefficients = [](const Point3&) { return Coefficients{1, 1, 1, 10, 10, 10}; };
    } else if (id == "var-diag") {
        op.constant = false;
        op.coefficients = [](const Point3& p) {
            return Coefficients{10 + std::cos(p.x()), std::exp(p.y()), 10 + std::sin(p.x()), 0, 0, 0};
        };
    } else if (id == "var-full") {
        op.constant = false;
        op.coefficients = [](const Point3& p) {
            return Coefficients{10 + std::cos(p.x()), std::exp(p.y()), 10 + std::sin(p.x()),
                                std::cos(p.x()),      std::cos(p.y()), std::cos(p.z())};
        };
    } else {
        throw InvalidArgument("unknown operator '" + id + "' (expected one of: " + joined(operator_ids()) + ")");
    }
    return op;
}

BVPDefinition make_preset(const std::string& solution, const std::string& op)
{
    return BVPDefinition{make_solution(solution), make_operator(op)};
}

std::array<double, 3> ellipticity_eigenvalues(const Coefficients& a)
{
    for (double v : a) IPBM_REQUIRE(std::isfinite(v), "ellipticity_eigenvalues: non-finite coefficient");
    Eigen::Matrix3d A;
    A << a[0], a[3], a[4], a[3], a[1], a[5], a[4], a[5], a[2];
    const Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(A, Eigen::EigenvaluesOnly);
    const Eigen::Vector3d ev = es.eigenvalues();
    return {ev[0], ev[1], ev[2]};
}

std::string to_string(Ellipticity e)
{
    switch (e) {
        case Ellipticity::elliptic: return "elliptic";
        case Ellipticity::weakly_elliptic: return "weakly-elliptic";
        case Ellipticity::non_elliptic: return "non-elliptic";
    }
    return "unknown";
}

EllipticityReport classify_ellipticity(const OperatorPreset& op, const std::vector<Point3>& points, double zero_tol)
{
    EllipticityReport report;
    report.points = points;
    bool any_zero = false;
    bool any_negative = false;
    for (const auto& p : points) {
        const auto ev = ellipticity_eigenvalues(op.coefficients(p));
        report.eigenvalues.push_back(ev);
        const double scale = std::max(std::abs(ev[0]), std::abs(ev[2]));
        for (double l : ev) {
            if (std::abs(l) <= zero_tol * scale) {
                any_zero = true;
            } else if (l < 0) {
                any_negative = true;
            }
        }
    }
    report.classification = any_negative ? Ellipticity::non_elliptic
                            : any_zero   ? Ellipticity::weakly_elliptic
                                         : Ellipticity::elliptic;
    return report;
}

}  // namespace ipbm
