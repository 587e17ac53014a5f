#pragma once

#include <algorithm>
#include <cstdint>
#include <set>
#include <unordered_map>
#include <vector>

#include "aesa/mtt.hpp"
#include "aesa/scan_history.hpp"

namespace aesa {

struct RewardBreakdown {
    double r_sv = 0.0;
    double r_tl = 0.0;
    double r_total = 0.0;
};

/// Negative scaled scan value at the commanded beam. Call before the
/// current scan is pushed.
inline double search_reward(const ScanHistory& history, const Bearing& beam, std::int64_t t) {
    return -history.scaled_scan_value(beam, t);
}

/// Covariance-norm reduction summed over tracks associated with a detection
/// at this step or the previous one. Only tracks present in both lists
/// count, so tracks born or deleted this step contribute nothing.
/// `paper_literal_sign` flips the sign (growth rewarded).
inline double track_reward(const std::vector<TrackEstimate>& tracks_prev, const std::vector<TrackEstimate>& tracks_post,
                           const std::set<int>& detected_ids, bool paper_literal_sign = false) {
    if (detected_ids.empty()) return 0.0;
    std::unordered_map<int, double> prev_norm;
    for (const auto& t : tracks_prev) prev_norm.emplace(t.track_id, t.cov_norm());
    double sum = 0.0;
    for (const auto& t : tracks_post) {
        if (!detected_ids.contains(t.track_id)) continue;
        const auto it = prev_norm.find(t.track_id);
        if (it == prev_norm.end()) continue;
        const double reduction = it->second - t.cov_norm();
        sum += paper_literal_sign ? -reduction : reduction;
    }
    return sum;
}

inline RewardBreakdown total_reward(double r_sv, double r_tl) { return {r_sv, r_tl, r_sv + r_tl}; }

}  // namespace aesa
