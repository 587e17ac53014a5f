#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>

#include <Eigen/Core>
#include <Eigen/Geometry>

#include "aesa/errors.hpp"

namespace aesa {

/// Observer-centred Cartesian position in metres (x forward, y right, z up).
struct CartesianPosition {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    Eigen::Vector3d vec() const { return {x, y, z}; }
    static CartesianPosition from(const Eigen::Vector3d& v) { return {v.x(), v.y(), v.z()}; }
    double norm() const { return std::sqrt(x * x + y * y + z * z); }

    friend bool operator==(const CartesianPosition&, const CartesianPosition&) = default;
};

/// Beam or target direction: azimuth psi and elevation theta, radians.
struct Bearing {
    double psi = 0.0;
    double theta = 0.0;

    friend bool operator==(const Bearing&, const Bearing&) = default;
};

/// Body-spherical coordinates; psi in (-pi, pi], theta in [-pi/2, pi/2].
struct SphericalCoord {
    double psi = 0.0;
    double theta = 0.0;
    double r = 0.0;

    Bearing bearing() const { return {psi, theta}; }
    Eigen::Vector3d vec() const { return {psi, theta, r}; }
    static SphericalCoord from(const Eigen::Vector3d& v) { return {v(0), v(1), v(2)}; }

    friend bool operator==(const SphericalCoord&, const SphericalCoord&) = default;
};

/// Wraps an angle into (-pi, pi].
inline double wrap_angle(double a) {
    constexpr double pi = std::numbers::pi;
    a = std::remainder(a, 2.0 * pi);
    if (a <= -pi) a += 2.0 * pi;
    return a;
}

inline SphericalCoord cart_to_spherical(const CartesianPosition& p) {
    const double r = p.norm();
    if (!(r > 0.0)) throw DomainError("cart_to_spherical: zero-range position");
    return {std::atan2(p.y, p.x), std::asin(std::clamp(p.z / r, -1.0, 1.0)), r};
}

inline CartesianPosition spherical_to_cart(const SphericalCoord& s) {
    const double ct = std::cos(s.theta);
    return {s.r * ct * std::cos(s.psi), s.r * ct * std::sin(s.psi), s.r * std::sin(s.theta)};
}

inline Eigen::Vector3d unit_vector(const Bearing& b) {
    const double ct = std::cos(b.theta);
    return {ct * std::cos(b.psi), ct * std::sin(b.psi), std::sin(b.theta)};
}

/// Great-circle angle between two directions, in [0, pi].
///
/// atan2 of cross and dot products stays accurate for the small offsets the
/// beam containment test cares about, where acos of the dot product does not.
inline double angular_offset(const Bearing& boresight, const Bearing& target) {
    const Eigen::Vector3d a = unit_vector(boresight);
    const Eigen::Vector3d b = unit_vector(target);
    return std::atan2(a.cross(b).norm(), a.dot(b));
}

}  // namespace aesa
