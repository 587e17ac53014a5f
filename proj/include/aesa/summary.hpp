#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "aesa/errors.hpp"
#include "aesa/gospa.hpp"
#include "aesa/trace.hpp"

namespace aesa {

/// Linear interpolation between closest ranks, q in [0, 1].
inline double percentile(std::vector<double> values, double q) {
    if (values.empty()) return std::numeric_limits<double>::quiet_NaN();
    std::sort(values.begin(), values.end());
    const double pos = q * static_cast<double>(values.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = std::min(lo + 1, values.size() - 1);
    return values[lo] + (pos - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

struct Stats {
    double mean = 0.0;
    double std = 0.0;  ///< population standard deviation
    double p05 = 0.0;
    double p95 = 0.0;

    static Stats of(const std::vector<double>& v) {
        Stats s;
        if (v.empty()) return s;
        double sum = 0.0;
        for (double x : v) sum += x;
        s.mean = sum / static_cast<double>(v.size());
        double ss = 0.0;
        for (double x : v) ss += (x - s.mean) * (x - s.mean);
        s.std = std::sqrt(ss / static_cast<double>(v.size()));
        s.p05 = percentile(v, 0.05);
        s.p95 = percentile(v, 0.95);
        return s;
    }
};

/// Per-step series derived from a trace, the input to the summary.
struct StepSeries {
    std::vector<double> search_reward;
    std::vector<double> cov_norm;  ///< mean over live tracks, steps with tracks only
    std::vector<GospaResult> gospa;
    std::vector<StepAssignment> assignments;
};

/// Mean covariance norm of the live tracks; nullopt for an empty list.
inline std::optional<double> step_cov_norm(const StepRecord& s) {
    if (s.tracks.empty()) return std::nullopt;
    double sum = 0.0;
    for (const auto& t : s.tracks) sum += t.cov_norm;
    return sum / static_cast<double>(s.tracks.size());
}

inline StepSeries step_series(const EpisodeTrace& trace) {
    StepSeries out;
    for (const auto& s : trace.steps) {
        out.search_reward.push_back(s.reward.r_sv);
        if (const auto c = step_cov_norm(s)) out.cov_norm.push_back(*c);
        std::vector<CartesianPosition> truths, tracks;
        for (const auto& g : s.truths) truths.push_back(g.position);
        for (const auto& t : s.tracks) tracks.push_back(t.position());
        GospaResult g = gospa(truths, tracks, trace.config.gospa);
        StepAssignment a;
        for (std::size_t i = 0; i < s.truths.size(); ++i)
            if (g.truth_to_track[i] >= 0) a[s.truths[i].id] = s.tracks[static_cast<std::size_t>(g.truth_to_track[i])].id;
        out.gospa.push_back(std::move(g));
        out.assignments.push_back(std::move(a));
    }
    return out;
}

struct EpisodeSummary {
    std::uint64_t seed = 0;
    std::string policy;
    std::int64_t n_steps = 0;
    double episode_return = 0.0;
    Stats search_reward;
    double track_reward_sum = 0.0;
    Stats cov_norm;
    double mean_track_count = 0.0;
    double gospa_distance = 0.0;  ///< all GOSPA fields summed over steps
    double gospa_localisation = 0.0;
    double gospa_missed = 0.0;
    double gospa_false = 0.0;
    double gospa_switching = 0.0;
    int switch_events = 0;
};

/// Summary statistics of a complete trace.
inline EpisodeSummary episode_summary(const EpisodeTrace& trace) {
    if (static_cast<std::int64_t>(trace.steps.size()) != trace.config.n_steps)
        throw IntegrityError("episode_summary: trace has " + std::to_string(trace.steps.size()) + " of " +
                             std::to_string(trace.config.n_steps) + " steps");
    const StepSeries series = step_series(trace);
    EpisodeSummary s;
    s.seed = trace.config.seed;
    s.policy = trace.policy;
    s.n_steps = trace.config.n_steps;
    s.episode_return = trace.episode_return;
    s.search_reward = Stats::of(series.search_reward);
    // An episode that never holds a track scores the deletion bound, the
    // largest norm a live track can carry.
    s.cov_norm = series.cov_norm.empty() ? Stats{trace.config.tracker.c_threshold, 0.0,
                                                 trace.config.tracker.c_threshold, trace.config.tracker.c_threshold}
                                         : Stats::of(series.cov_norm);
    double tracks = 0.0;
    for (const auto& step : trace.steps) {
        s.track_reward_sum += step.reward.r_tl;
        tracks += static_cast<double>(step.tracks.size());
    }
    s.mean_track_count = trace.steps.empty() ? 0.0 : tracks / static_cast<double>(trace.steps.size());
    for (const auto& g : series.gospa) {
        s.gospa_distance += g.distance;
        s.gospa_localisation += g.localisation;
        s.gospa_missed += g.missed;
        s.gospa_false += g.false_comp;
    }
    s.switch_events = count_switches(series.assignments);
    s.gospa_switching = gospa_switching(series.assignments, trace.config.gospa);
    return s;
}

inline const std::vector<std::string>& summary_columns() {
    static const std::vector<std::string> cols = {
        "seed",           "policy",         "n_steps",          "episode_return",     "search_reward_mean",
        "search_reward_std", "search_reward_p05", "search_reward_p95", "track_reward_sum", "cov_norm_mean",
        "cov_norm_std",   "cov_norm_p05",   "cov_norm_p95",     "mean_track_count",   "gospa_distance",
        "gospa_localisation", "gospa_missed", "gospa_false",    "gospa_switching",    "switch_events"};
    return cols;
}

inline nlohmann::json to_json(const EpisodeSummary& s) {
    return {{"seed", s.seed},
            {"policy", s.policy},
            {"n_steps", s.n_steps},
            {"episode_return", s.episode_return},
            {"search_reward_mean", s.search_reward.mean},
            {"search_reward_std", s.search_reward.std},
            {"search_reward_p05", s.search_reward.p05},
            {"search_reward_p95", s.search_reward.p95},
            {"track_reward_sum", s.track_reward_sum},
            {"cov_norm_mean", s.cov_norm.mean},
            {"cov_norm_std", s.cov_norm.std},
            {"cov_norm_p05", s.cov_norm.p05},
            {"cov_norm_p95", s.cov_norm.p95},
            {"mean_track_count", s.mean_track_count},
            {"gospa_distance", s.gospa_distance},
            {"gospa_localisation", s.gospa_localisation},
            {"gospa_missed", s.gospa_missed},
            {"gospa_false", s.gospa_false},
            {"gospa_switching", s.gospa_switching},
            {"switch_events", s.switch_events}};
}

inline void write_summary_csv_header(std::ostream& out) {
    const auto& cols = summary_columns();
    for (std::size_t i = 0; i < cols.size(); ++i) out << (i ? "," : "") << cols[i];
    out << '\n';
}

inline void write_summary_csv_row(std::ostream& out, const EpisodeSummary& s) {
    const nlohmann::json j = to_json(s);
    const auto& cols = summary_columns();
    for (std::size_t i = 0; i < cols.size(); ++i) {
        const auto& v = j.at(cols[i]);
        out << (i ? "," : "") << (v.is_string() ? v.get<std::string>() : v.dump());
    }
    out << '\n';
}

}  // namespace aesa
