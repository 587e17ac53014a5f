#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <vector>

#include <Eigen/Core>

#include "aesa/errors.hpp"
#include "aesa/geometry.hpp"
#include "aesa/rng.hpp"

namespace aesa {

struct TargetState {
    CartesianPosition position;
    Eigen::Vector3d velocity = Eigen::Vector3d::Zero();
    int id = 0;
};

/// One sensor return. `truth_id` is -1 for clutter and is never shown to
/// policies; it exists for metrics and tests.
struct Detection {
    SphericalCoord meas;
    std::int64_t t = 0;
    int truth_id = -1;
};

struct SensorModel {
    double beam_width = 9.0 * std::numbers::pi / 180.0;
    double sigma_psi = 1e-3;
    double sigma_theta = 1e-3;
    double sigma_r = 5.0;
    double p_detect = 1.0;
    /// Mean number of false alarms per dwell, uniform inside the beam.
    double clutter_rate = 0.0;

    Eigen::Matrix3d R() const {
        return Eigen::Vector3d(sigma_psi * sigma_psi, sigma_theta * sigma_theta, sigma_r * sigma_r)
            .asDiagonal();
    }
};

struct SpawnBounds {
    double half_extent = std::numbers::pi / 3.0;  ///< bearings in [-h, h] per axis
    double r_min = 20e3;
    double r_max = 90e3;
    double v_min = 10.0;
    double v_max = 100.0;

    void validate() const {
        if (!(half_extent > 0.0) || half_extent > std::numbers::pi / 2.0)
            throw ConfigError("spawn.half_extent", "must lie in (0, pi/2]");
        if (!(r_min > 0.0) || !(r_max >= r_min)) throw ConfigError("spawn.r_min", "need 0 < r_min <= r_max");
        if (!(v_min >= 0.0) || !(v_max >= v_min)) throw ConfigError("spawn.v_min", "need 0 <= v_min <= v_max");
    }
};

/// Targets with bearings uniform over the field of regard, range uniform in
/// [r_min, r_max], speed uniform in [v_min, v_max] and isotropic heading.
inline std::vector<TargetState> spawn_targets(int n, Rng& rng, const SpawnBounds& bounds) {
    if (n < 0) throw ConfigError("n_targets", "must be >= 0");
    bounds.validate();
    std::vector<TargetState> out;
    out.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        SphericalCoord s;
        s.psi = rng.uniform(-bounds.half_extent, bounds.half_extent);
        s.theta = rng.uniform(-bounds.half_extent, bounds.half_extent);
        s.r = rng.uniform(bounds.r_min, bounds.r_max);
        const double speed = rng.uniform(bounds.v_min, bounds.v_max);
        const double cz = rng.uniform(-1.0, 1.0);
        const double az = rng.uniform(-std::numbers::pi, std::numbers::pi);
        const double sz = std::sqrt(1.0 - cz * cz);
        out.push_back({spherical_to_cart(s),
                       speed * Eigen::Vector3d(sz * std::cos(az), sz * std::sin(az), cz), i});
    }
    return out;
}

inline std::vector<TargetState> spawn_targets(int n, std::uint64_t seed, const SpawnBounds& bounds) {
    Rng rng(seed);
    return spawn_targets(n, rng, bounds);
}

/// Noiseless constant-velocity propagation of the ground truth.
inline void propagate(std::vector<TargetState>& targets, double dt) {
    if (!(dt > 0.0)) throw DomainError("propagate: dt must be positive");
    for (auto& tgt : targets)
        tgt.position = CartesianPosition::from(tgt.position.vec() + tgt.velocity * dt);
}

/// Random streams consumed by the sensor, kept apart so that toggling
/// P_d or clutter leaves the measurement noise sequence unchanged.
struct SensorStreams {
    Rng noise;
    Rng detect;
    Rng clutter;
};

/// Detections for every target whose direction lies within half a beam
/// width of the boresight, plus optional clutter.
inline std::vector<Detection> sense(const std::vector<TargetState>& targets, const Bearing& boresight,
                                    const SensorModel& sensor, std::int64_t t, SensorStreams& rng) {
    const double half_beam = 0.5 * sensor.beam_width;
    std::vector<Detection> out;
    for (const auto& tgt : targets) {
        const SphericalCoord truth = cart_to_spherical(tgt.position);
        if (angular_offset(boresight, truth.bearing()) > half_beam) continue;
        if (!rng.detect.bernoulli(sensor.p_detect)) continue;
        SphericalCoord m;
        m.psi = wrap_angle(truth.psi + sensor.sigma_psi * rng.noise.normal());
        m.theta = truth.theta + sensor.sigma_theta * rng.noise.normal();
        m.r = truth.r + sensor.sigma_r * rng.noise.normal();
        out.push_back({m, t, tgt.id});
    }
    const std::uint64_t n_clutter = rng.clutter.poisson(sensor.clutter_rate);
    if (n_clutter > 0) {
        // Uniform over the beam cone, then placed at a uniform range.
        const Eigen::Vector3d axis = unit_vector(boresight);
        const Eigen::Vector3d ref = std::abs(axis.z()) < 0.9 ? Eigen::Vector3d::UnitZ() : Eigen::Vector3d::UnitX();
        const Eigen::Vector3d u = axis.cross(ref).normalized();
        const Eigen::Vector3d v = axis.cross(u);
        const double cos_half = std::cos(half_beam);
        for (std::uint64_t k = 0; k < n_clutter; ++k) {
            const double c = rng.clutter.uniform(cos_half, 1.0);
            const double phi = rng.clutter.uniform(0.0, 2.0 * std::numbers::pi);
            const double s = std::sqrt(1.0 - c * c);
            const Eigen::Vector3d dir = c * axis + s * (std::cos(phi) * u + std::sin(phi) * v);
            const double r = rng.clutter.uniform(1e3, 1e5);
            out.push_back({cart_to_spherical(CartesianPosition::from(r * dir)), t, -1});
        }
    }
    return out;
}

}  // namespace aesa
