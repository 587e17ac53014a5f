#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <string>
#include <vector>

#include "aesa/errors.hpp"
#include "aesa/geometry.hpp"
#include "aesa/mtt.hpp"
#include "aesa/scan_history.hpp"

namespace aesa {

inline constexpr std::size_t kMaxTracks = 15;
inline constexpr std::size_t kTrackFeatures = 7;
inline constexpr std::size_t kRasterSize = 48;
inline constexpr double kRangeScale = 100000.0;
inline constexpr double kSpeedScale = 100.0;
inline constexpr double kBearingScale = std::numbers::pi / 3.0;

/// Steps per axis so that circular beams on a square lattice leave no gaps:
/// lattice spacing is sqrt(2)/2 of the beam width.
inline int grid_size(double field_of_regard, double beam_width) {
    if (!(field_of_regard > 0.0) || !(beam_width > 0.0))
        throw DomainError("grid_size: field of regard and beam width must be positive");
    // The small slack keeps exact multiples from rounding up a whole step.
    const double ratio = field_of_regard / (std::numbers::sqrt2 / 2.0 * beam_width);
    const int n = static_cast<int>(std::ceil(ratio - 1e-9));
    if (n < 2) throw ConfigError("grid.field_of_regard", "action grid needs at least 2 steps per axis");
    return n;
}

struct BeamAction {
    int a_psi = 0;
    int a_theta = 0;

    friend bool operator==(const BeamAction&, const BeamAction&) = default;
};

struct ActionGrid {
    int n = 19;
    double half_extent = std::numbers::pi / 3.0;

    static ActionGrid make(double field_of_regard, double beam_width) {
        return {grid_size(field_of_regard, beam_width), field_of_regard / 2.0};
    }

    bool contains(const BeamAction& a) const {
        return a.a_psi >= 0 && a.a_psi < n && a.a_theta >= 0 && a.a_theta < n;
    }

    double axis_bearing(int k) const {
        return half_extent * (2.0 * static_cast<double>(k) / static_cast<double>(n - 1) - 1.0);
    }

    Bearing to_bearings(const BeamAction& a) const {
        if (!contains(a))
            throw DomainError("action (" + std::to_string(a.a_psi) + ", " + std::to_string(a.a_theta) +
                              ") outside the " + std::to_string(n) + "x" + std::to_string(n) + " grid");
        return {axis_bearing(a.a_psi), axis_bearing(a.a_theta)};
    }
};

inline Bearing action_to_bearings(const BeamAction& a, int n_a) {
    return ActionGrid{n_a, std::numbers::pi / 3.0}.to_bearings(a);
}

/// Normalised track row: range offset, bearings, velocity, covariance norm.
inline std::array<double, kTrackFeatures> encode_track(const TrackEstimate& track, double c_threshold) {
    const CartesianPosition p = track.position();
    const double r = p.norm();
    double psi = 0.0;
    double theta = 0.0;
    if (r > 0.0) {
        const SphericalCoord s = cart_to_spherical(p);
        psi = s.psi;
        theta = s.theta;
    }
    const Eigen::Vector3d v = track.velocity();
    return {r / kRangeScale - 1.0,        psi / kBearingScale,   theta / kBearingScale,
            v.x() / kSpeedScale,          v.y() / kSpeedScale,   v.z() / kSpeedScale,
            track.cov_norm() / c_threshold};
}

enum class OverflowPolicy { LowestCovariance, FirstById };

/// Fixed-shape observation: 15 x 7 track matrix and 1 x 48 x 48 raster,
/// both row-major float32.
struct Observation {
    std::array<float, kMaxTracks * kTrackFeatures> track_matrix{};
    std::vector<float> scan_raster = std::vector<float>(kRasterSize * kRasterSize, 0.0f);

    std::size_t populated_rows() const {
        std::size_t rows = 0;
        for (std::size_t i = 0; i < kMaxTracks; ++i)
            for (std::size_t j = 0; j < kTrackFeatures; ++j)
                if (track_matrix[i * kTrackFeatures + j] != 0.0f) {
                    rows = i + 1;
                    break;
                }
        return rows;
    }

    friend bool operator==(const Observation&, const Observation&) = default;
};

/// Tracks shown to the policy, ascending track_id. When more than
/// kMaxTracks exist the overflow policy decides which are kept.
inline std::vector<const TrackEstimate*> select_tracks(const std::vector<TrackEstimate>& tracks,
                                                       OverflowPolicy overflow) {
    std::vector<const TrackEstimate*> sel;
    sel.reserve(tracks.size());
    for (const auto& t : tracks) sel.push_back(&t);
    const auto by_id = [](const TrackEstimate* a, const TrackEstimate* b) { return a->track_id < b->track_id; };
    if (sel.size() > kMaxTracks) {
        if (overflow == OverflowPolicy::LowestCovariance) {
            std::stable_sort(sel.begin(), sel.end(), [](const TrackEstimate* a, const TrackEstimate* b) {
                const double na = a->cov_norm();
                const double nb = b->cov_norm();
                return na < nb || (na == nb && a->track_id < b->track_id);
            });
        } else {
            std::sort(sel.begin(), sel.end(), by_id);
        }
        sel.resize(kMaxTracks);
    }
    std::sort(sel.begin(), sel.end(), by_id);
    return sel;
}

inline Observation build_observation(const std::vector<TrackEstimate>& tracks, const ScanHistory& history,
                                     std::int64_t t, double c_threshold,
                                     OverflowPolicy overflow = OverflowPolicy::LowestCovariance,
                                     double half_extent = std::numbers::pi / 3.0) {
    Observation obs;
    const auto sel = select_tracks(tracks, overflow);
    for (std::size_t i = 0; i < sel.size(); ++i) {
        const auto row = encode_track(*sel[i], c_threshold);
        for (std::size_t j = 0; j < kTrackFeatures; ++j)
            obs.track_matrix[i * kTrackFeatures + j] = static_cast<float>(row[j]);
    }
    if (!history.empty()) {
        const ScanRaster raster = history.rasterize(t, kRasterSize, half_extent);
        for (std::size_t k = 0; k < raster.cells.size(); ++k) obs.scan_raster[k] = static_cast<float>(raster.cells[k]);
    }
    return obs;
}

}  // namespace aesa
