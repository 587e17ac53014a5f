#pragma once

#include <algorithm>
#include <cstdint>
#include <set>
#include <vector>

#include "aesa/actions_obs.hpp"
#include "aesa/config.hpp"
#include "aesa/errors.hpp"
#include "aesa/mtt.hpp"
#include "aesa/policies.hpp"
#include "aesa/rewards.hpp"
#include "aesa/rng.hpp"
#include "aesa/scan_history.hpp"
#include "aesa/sim.hpp"
#include "aesa/trace.hpp"

namespace aesa {

struct StepResult {
    Observation observation;
    RewardBreakdown reward;
    bool done = false;
    StepRecord info;  ///< truths, tracks and detections for metrics
};

/// Search-and-track episode engine with a reset/step interface.
///
/// Step order: action -> bearing, search reward on the pre-scan history,
/// push scan, propagate truth, sense, track, track reward, observation.
class Environment {
public:
    explicit Environment(EpisodeConfig config) : config_(std::move(config)) {
        config_.validate();
        grid_ = config_.grid();
    }

    const EpisodeConfig& config() const { return config_; }
    const ActionGrid& grid() const { return grid_; }
    const std::vector<TargetState>& truths() const { return truths_; }
    const std::vector<TrackEstimate>& tracks() const { return tracker_.tracks(); }
    const ScanHistory& scan_history() const { return history_; }
    std::int64_t step_count() const { return step_; }
    bool done() const { return step_ >= config_.n_steps; }
    bool started() const { return started_; }

    Observation reset() {
        const std::uint64_t seed = config_.seed;
        Rng spawn_rng = Rng::stream(seed, "spawn");
        truths_ = spawn_targets(config_.n_targets, spawn_rng, config_.spawn);
        streams_ = {Rng::stream(seed, "measurement"), Rng::stream(seed, "detection"), Rng::stream(seed, "clutter")};
        history_ = ScanHistory(config_.scan_params());
        tracker_ = Tracker(config_.motion_model(), config_.sensor.R(), config_.tracker);
        detected_prev_.clear();
        step_ = 0;
        started_ = true;
        return build_observation(tracker_.tracks(), history_, 0, config_.tracker.c_threshold, config_.overflow,
                                 grid_.half_extent);
    }

    Observation reset(std::uint64_t seed) {
        config_.seed = seed;
        return reset();
    }

    StepResult step(const BeamAction& action) {
        if (!started_) throw ContractViolation("step called before reset");
        if (done()) throw ContractViolation("step called after the episode finished");
        const std::int64_t t = step_;

        StepResult out;
        StepRecord& rec = out.info;
        rec.t = t;
        rec.action = action;
        rec.bearing = grid_.to_bearings(action);

        const double r_sv = search_reward(history_, rec.bearing, t);
        history_.push(rec.bearing, t);

        propagate(truths_, config_.dt);
        rec.detections = sense(truths_, rec.bearing, config_.sensor, t, streams_);

        const std::vector<TrackEstimate> prev = tracker_.tracks();
        const TrackerStepReport report = tracker_.step(rec.detections);

        std::set<int> detected_now;
        for (const auto& [track_id, _] : report.updates) detected_now.insert(track_id);
        std::set<int> rewarded = detected_now;
        rewarded.insert(detected_prev_.begin(), detected_prev_.end());
        const double r_tl = track_reward(prev, tracker_.tracks(), rewarded, config_.rewards.paper_literal_sign);
        detected_prev_ = detected_now;

        out.reward = total_reward(r_sv, r_tl);
        rec.reward = out.reward;
        rec.detected_ids.assign(detected_now.begin(), detected_now.end());
        for (const auto& trk : tracker_.tracks()) rec.tracks.push_back(TrackSnapshot::of(trk));
        for (const auto& g : truths_) rec.truths.push_back({g.id, g.position});

        out.observation = build_observation(tracker_.tracks(), history_, t, config_.tracker.c_threshold,
                                            config_.overflow, grid_.half_extent);
        ++step_;
        out.done = done();
        return out;
    }

private:
    EpisodeConfig config_;
    ActionGrid grid_;
    std::vector<TargetState> truths_;
    SensorStreams streams_{Rng(), Rng(), Rng()};
    ScanHistory history_;
    Tracker tracker_;
    std::set<int> detected_prev_;
    std::int64_t step_ = 0;
    bool started_ = false;
};

/// Runs one full episode with `policy` and returns its trace.
inline EpisodeTrace run_episode(const EpisodeConfig& config, Policy& policy) {
    Environment env(config);
    EpisodeTrace trace;
    trace.config = env.config();
    trace.policy = policy.name();
    trace.steps.reserve(static_cast<std::size_t>(config.n_steps));
    Observation obs = env.reset();
    policy.reset(config.seed, env.grid());
    while (!env.done()) {
        const BeamAction a = policy.act(env.step_count(), obs);
        StepResult r = env.step(a);
        obs = std::move(r.observation);
        trace.episode_return += r.reward.r_total;
        trace.steps.push_back(std::move(r.info));
    }
    return trace;
}

}  // namespace aesa
