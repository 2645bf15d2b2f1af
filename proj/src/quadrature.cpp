#include "ipbm/quadrature.hpp"

#include <Eigen/LU>

#include <algorithm>
#include <cmath>
#include <iterator>
#include <map>
#include <mutex>
#include <numbers>
#include <span>
#include <string>
#include <vector>

namespace ipbm {

namespace {

struct TetTableEntry {
    double x, y, z, w;
};

struct TetTable {
    int degree;
    const TetTableEntry* data;
    std::size_t size;
};

#include "tet_rule_tables.inc"

std::span<const TetTableEntry> table_for(int mq)
{
    for (const auto& t : kTetTables) {
        if (t.degree == mq) return {t.data, t.size};
    }
    return {};
}

/// Throws unless the rule integrates every monomial up to rule.degree on the reference simplex.
void verify_simplex_exactness(const QuadratureRule& rule)
{
    const int p = rule.degree;
    std::vector<double> factorial(p + 4, 1.0);
    for (int i = 1; i < p + 4; ++i) factorial[i] = factorial[i - 1] * i;
    std::vector<std::array<std::vector<double>, 3>> powers(rule.size());
    for (std::size_t q = 0; q < rule.size(); ++q) {
        for (int a = 0; a < 3; ++a) {
            auto& pw = powers[q][a];
            pw.assign(p + 1, 1.0);
            for (int e = 1; e <= p; ++e) pw[e] = pw[e - 1] * rule.nodes[q][a];
        }
    }
    for (int i = 0; i <= p; ++i) {
        for (int j = 0; i + j <= p; ++j) {
            for (int k = 0; i + j + k <= p; ++k) {
                double s = 0.0;
                for (std::size_t q = 0; q < rule.size(); ++q) {
                    s += rule.weights[q] * powers[q][0][i] * powers[q][1][j] * powers[q][2][k];
                }
                const double exact = factorial[i] * factorial[j] * factorial[k] / factorial[i + j + k + 3];
                if (std::abs(s - exact) > 1e-12 * exact) {
                    throw Error("tet_rule: degree " + std::to_string(p) + " rule fails the moment x^" +
                                std::to_string(i) + " y^" + std::to_string(j) + " z^" + std::to_string(k));
                }
            }
        }
    }
}

}  // namespace

QuadratureRule1D gauss_legendre(int n)
{
    if (n < 1 || n > 30) throw InvalidArgument("gauss_legendre: point count " + std::to_string(n) + " outside [1, 30]");
    QuadratureRule1D rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    rule.degree = 2 * n - 1;
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0;
            double p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            if (n == 1) p0 = 1.0;
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        // Refresh the derivative at the converged node.
        double p0 = 1.0;
        double p1 = x;
        for (int k = 2; k <= n; ++k) {
            const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
            p0 = p1;
            p1 = p2;
        }
        dp = n * (x * p1 - p0) / (x * x - 1.0);
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        rule.nodes[i] = -x;
        rule.nodes[n - 1 - i] = x;
        rule.weights[i] = w;
        rule.weights[n - 1 - i] = w;
    }
    if (n % 2 == 1) rule.nodes[n / 2] = 0.0;
    return rule;
}

QuadratureRule1D gauss_legendre(int n, double a, double b)
{
    QuadratureRule1D rule = gauss_legendre(n);
    const double half = 0.5 * (b - a);
    const double mid = 0.5 * (a + b);
    for (std::size_t i = 0; i < rule.size(); ++i) {
        rule.nodes[i] = mid + half * rule.nodes[i];
        rule.weights[i] *= half;
    }
    return rule;
}

QuadratureRule box_rule(const Box& box, std::array<int, 3> points_per_dim)
{
    for (int a = 0; a < 3; ++a) {
        IPBM_REQUIRE(points_per_dim[a] >= 1, "box_rule: need at least one point per dimension");
        IPBM_REQUIRE(box.hi[a] > box.lo[a], "box_rule: empty box");
    }
    const auto rx = gauss_legendre(points_per_dim[0], box.lo.x(), box.hi.x());
    const auto ry = gauss_legendre(points_per_dim[1], box.lo.y(), box.hi.y());
    const auto rz = gauss_legendre(points_per_dim[2], box.lo.z(), box.hi.z());
    QuadratureRule rule;
    rule.degree = std::min({rx.degree, ry.degree, rz.degree});
    rule.nodes.reserve(rx.size() * ry.size() * rz.size());
    rule.weights.reserve(rule.nodes.capacity());
    for (std::size_t i = 0; i < rx.size(); ++i) {
        for (std::size_t j = 0; j < ry.size(); ++j) {
            for (std::size_t k = 0; k < rz.size(); ++k) {
                rule.nodes.emplace_back(rx.nodes[i], ry.nodes[j], rz.nodes[k]);
                rule.weights.push_back(rx.weights[i] * ry.weights[j] * rz.weights[k]);
            }
        }
    }
    return rule;
}

QuadratureRule collapsed_tet_rule(int degree)
{
    IPBM_REQUIRE(degree >= 0, "collapsed_tet_rule: negative degree");
    // x = u, y = (1-u) v, z = (1-u)(1-v) w with Jacobian (1-u)^2 (1-v).
    const int n = std::min(30, (degree + 4) / 2);
    const auto g = gauss_legendre(n, 0.0, 1.0);
    QuadratureRule rule;
    rule.degree = degree;
    for (int i = 0; i < n; ++i) {
        const double u = g.nodes[i];
        for (int j = 0; j < n; ++j) {
            const double v = g.nodes[j];
            for (int k = 0; k < n; ++k) {
                const double w = g.nodes[k];
                rule.nodes.emplace_back(u, (1 - u) * v, (1 - u) * (1 - v) * w);
                rule.weights.push_back(g.weights[i] * g.weights[j] * g.weights[k] * (1 - u) * (1 - u) * (1 - v));
            }
        }
    }
    return rule;
}

QuadratureRule reference_tet_rule(int mq)
{
    if (mq < 4 || mq > 20 || mq % 2 != 0) {
        throw InvalidArgument("tet_rule: exactness degree " + std::to_string(mq) + " must be even and in [4, 20]");
    }
    static std::mutex mutex;
    static std::map<int, QuadratureRule> cache;
    std::lock_guard lock(mutex);
    if (const auto it = cache.find(mq); it != cache.end()) return it->second;

    QuadratureRule rule;
    const auto table = table_for(mq);
    if (table.empty()) {
        rule = collapsed_tet_rule(mq);
    } else {
        rule.degree = mq;
        for (const auto& e : table) {
            if (!(e.w > 0.0)) throw Error("tet_rule: non-positive weight in table for degree " + std::to_string(mq));
            rule.nodes.emplace_back(e.x, e.y, e.z);
            rule.weights.push_back(e.w);
        }
    }
    verify_simplex_exactness(rule);
    cache.emplace(mq, rule);
    return rule;
}

QuadratureRule tet_rule(const std::array<Point3, 4>& v, int mq)
{
    QuadratureRule rule = reference_tet_rule(mq);
    Eigen::Matrix3d J;
    J.col(0) = v[1] - v[0];
    J.col(1) = v[2] - v[0];
    J.col(2) = v[3] - v[0];
    const double det = std::abs(J.determinant());
    IPBM_REQUIRE(det > 0.0, "tet_rule: degenerate tetrahedron");
    for (std::size_t q = 0; q < rule.size(); ++q) {
        rule.nodes[q] = v[0] + J * rule.nodes[q];
        rule.weights[q] *= det;
    }
    return rule;
}

}  // namespace ipbm
