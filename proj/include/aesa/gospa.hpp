#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <vector>

#include <Eigen/Core>

#include "aesa/errors.hpp"
#include "aesa/geometry.hpp"
#include "aesa/munkres.hpp"

namespace aesa {

struct GospaConfig {
    double c = 500.0;
    double p = 1.0;
    double alpha = 2.0;
    double switching_weight = 1.0;

    void validate() const {
        if (!(c > 0.0)) throw ConfigError("gospa.c", "must be positive");
        if (!(p >= 1.0)) throw ConfigError("gospa.p", "must be >= 1");
        if (alpha != 2.0) throw ConfigError("gospa.alpha", "only alpha = 2 admits the missed/false decomposition");
        if (!(switching_weight >= 0.0)) throw ConfigError("gospa.switching_weight", "must be >= 0");
    }
};

/// Components are in p-th power units, so with alpha = 2
/// distance^p = localisation + missed + false_comp (+ switching over time).
struct GospaResult {
    double distance = 0.0;
    double localisation = 0.0;
    double missed = 0.0;
    double false_comp = 0.0;
    double switching = 0.0;
    int n_missed = 0;
    int n_false = 0;
    std::vector<int> truth_to_track;  ///< index into the track set, -1 when missed
};

/// GOSPA for alpha = 2 between ground-truth and estimated point sets.
///
/// Pairs farther apart than c are never worth assigning (their cost c^p
/// equals one missed plus one false), so the cost matrix is capped at c^p
/// and capped pairs are reported as missed and false.
inline GospaResult gospa(const std::vector<CartesianPosition>& truths, const std::vector<CartesianPosition>& tracks,
                         const GospaConfig& cfg) {
    cfg.validate();
    GospaResult out;
    const double cp = std::pow(cfg.c, cfg.p);
    const double unassigned_cost = cp / cfg.alpha;
    out.truth_to_track.assign(truths.size(), -1);

    Eigen::MatrixXd cost(static_cast<Eigen::Index>(truths.size()), static_cast<Eigen::Index>(tracks.size()));
    Eigen::MatrixXd dist(cost.rows(), cost.cols());
    for (std::size_t i = 0; i < truths.size(); ++i)
        for (std::size_t j = 0; j < tracks.size(); ++j) {
            const double d = (truths[i].vec() - tracks[j].vec()).norm();
            dist(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = d;
            cost(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = std::pow(std::min(d, cfg.c), cfg.p);
        }

    const Assignment a = solve_assignment(cost);
    int n_pairs = 0;
    for (std::size_t i = 0; i < truths.size(); ++i) {
        const int j = a.row_to_col[i];
        if (j < 0) continue;
        const double d = dist(static_cast<Eigen::Index>(i), j);
        if (d < cfg.c) {
            out.truth_to_track[i] = j;
            out.localisation += std::pow(d, cfg.p);
            ++n_pairs;
        }
    }
    out.n_missed = static_cast<int>(truths.size()) - n_pairs;
    out.n_false = static_cast<int>(tracks.size()) - n_pairs;
    out.missed = unassigned_cost * out.n_missed;
    out.false_comp = unassigned_cost * out.n_false;
    out.distance = std::pow(out.localisation + out.missed + out.false_comp, 1.0 / cfg.p);
    return out;
}

/// truth id -> assigned track id at one step (absent when missed).
using StepAssignment = std::map<int, int>;

/// Number of times a truth moves directly from one track to a different
/// track between consecutive steps. Transitions to or from "missed" are
/// not counted.
inline int count_switches(const std::vector<StepAssignment>& history) {
    int events = 0;
    for (std::size_t k = 1; k < history.size(); ++k) {
        for (const auto& [truth, track] : history[k]) {
            const auto prev = history[k - 1].find(truth);
            if (prev != history[k - 1].end() && prev->second != track) ++events;
        }
    }
    return events;
}

inline double gospa_switching(const std::vector<StepAssignment>& history, const GospaConfig& cfg) {
    return cfg.switching_weight * count_switches(history);
}

}  // namespace aesa
