#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

#include <algorithm>
#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace ipbm {

using Point3 = Eigen::Vector3d;

/// Base class for all errors raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
public:
    using Error::Error;
};

#define IPBM_REQUIRE(cond, msg)                                \
    do {                                                       \
        if (!(cond)) throw ::ipbm::InvalidArgument(msg);       \
    } while (false)

/// Axis-aligned box [lo.x, hi.x] x [lo.y, hi.y] x [lo.z, hi.z].
struct Box {
    Point3 lo = Point3::Zero();
    Point3 hi = Point3::Ones();

    static Box unit() { return Box{Point3::Zero(), Point3::Ones()}; }

    Point3 edges() const { return hi - lo; }
    double max_edge() const { return edges().maxCoeff(); }
    double volume() const
    {
        const Point3 e = edges();
        return e.x() * e.y() * e.z();
    }
    Point3 center() const { return 0.5 * (lo + hi); }

    bool contains(const Point3& p, double tol = 0.0) const
    {
        for (int a = 0; a < 3; ++a) {
            if (p[a] < lo[a] - tol || p[a] > hi[a] + tol) return false;
        }
        return true;
    }

    /// Clamps p into the box; used after checking containment with a tolerance.
    Point3 clamp(const Point3& p) const
    {
        Point3 q;
        for (int a = 0; a < 3; ++a) q[a] = std::clamp(p[a], lo[a], hi[a]);
        return q;
    }
};

/// Tolerance (absolute, bbox units) for deciding that a point is inside the box.
inline constexpr double kBoxTolerance = 1e-12;

}  // namespace ipbm
