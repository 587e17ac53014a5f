#pragma once

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "aesa/actions_obs.hpp"
#include "aesa/config.hpp"
#include "aesa/errors.hpp"
#include "aesa/rewards.hpp"
#include "aesa/sim.hpp"

namespace aesa {

struct TrackSnapshot {
    int id = 0;
    StateVec mean = StateVec::Zero();
    double cov_norm = 0.0;
    std::optional<std::int64_t> last_detected;

    CartesianPosition position() const { return {mean(0), mean(2), mean(4)}; }

    static TrackSnapshot of(const TrackEstimate& t) { return {t.track_id, t.mean, t.cov_norm(), t.last_detected}; }
};

struct TruthSnapshot {
    int id = 0;
    CartesianPosition position;
};

/// Everything logged for one environment step.
struct StepRecord {
    std::int64_t t = 0;
    BeamAction action;
    Bearing bearing;
    std::vector<Detection> detections;
    std::vector<TrackSnapshot> tracks;
    std::vector<int> detected_ids;  ///< tracks updated by a detection this step
    RewardBreakdown reward;
    std::vector<TruthSnapshot> truths;
};

struct EpisodeTrace {
    EpisodeConfig config;
    std::string policy;
    std::vector<StepRecord> steps;
    double episode_return = 0.0;
};

inline std::string hex64(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

inline nlohmann::json to_json(const StepRecord& s) {
    nlohmann::json dets = nlohmann::json::array();
    for (const auto& d : s.detections)
        dets.push_back({{"psi", d.meas.psi}, {"theta", d.meas.theta}, {"r", d.meas.r}, {"truth_id", d.truth_id}});
    nlohmann::json tracks = nlohmann::json::array();
    for (const auto& t : s.tracks) {
        nlohmann::json mean = nlohmann::json::array();
        for (int k = 0; k < 6; ++k) mean.push_back(t.mean(k));
        tracks.push_back({{"id", t.id},
                          {"mean", mean},
                          {"cov_fro", t.cov_norm},
                          {"last_detected", t.last_detected ? nlohmann::json(*t.last_detected) : nlohmann::json()}});
    }
    nlohmann::json truths = nlohmann::json::array();
    for (const auto& g : s.truths)
        truths.push_back({{"id", g.id}, {"position", {g.position.x, g.position.y, g.position.z}}});
    return {{"type", "step"},
            {"t", s.t},
            {"action", {s.action.a_psi, s.action.a_theta}},
            {"bearing", {s.bearing.psi, s.bearing.theta}},
            {"detections", dets},
            {"tracks", tracks},
            {"detected_ids", s.detected_ids},
            {"reward", {{"r_sv", s.reward.r_sv}, {"r_tl", s.reward.r_tl}, {"r_total", s.reward.r_total}}},
            {"truths", truths}};
}

inline StepRecord step_from_json(const nlohmann::json& j) {
    StepRecord s;
    s.t = j.at("t").get<std::int64_t>();
    s.action = {j.at("action").at(0).get<int>(), j.at("action").at(1).get<int>()};
    s.bearing = {j.at("bearing").at(0).get<double>(), j.at("bearing").at(1).get<double>()};
    for (const auto& d : j.at("detections"))
        s.detections.push_back({{d.at("psi").get<double>(), d.at("theta").get<double>(), d.at("r").get<double>()},
                                s.t,
                                d.at("truth_id").get<int>()});
    for (const auto& t : j.at("tracks")) {
        TrackSnapshot snap;
        snap.id = t.at("id").get<int>();
        for (int k = 0; k < 6; ++k) snap.mean(k) = t.at("mean").at(k).get<double>();
        snap.cov_norm = t.at("cov_fro").get<double>();
        if (!t.at("last_detected").is_null()) snap.last_detected = t.at("last_detected").get<std::int64_t>();
        s.tracks.push_back(snap);
    }
    s.detected_ids = j.at("detected_ids").get<std::vector<int>>();
    const auto& r = j.at("reward");
    s.reward = {r.at("r_sv").get<double>(), r.at("r_tl").get<double>(), r.at("r_total").get<double>()};
    for (const auto& g : j.at("truths"))
        s.truths.push_back({g.at("id").get<int>(),
                            {g.at("position").at(0).get<double>(), g.at("position").at(1).get<double>(),
                             g.at("position").at(2).get<double>()}});
    return s;
}

inline nlohmann::json trace_header(const EpisodeTrace& trace) {
    return {{"type", "header"},
            {"policy", trace.policy},
            {"seed", trace.config.seed},
            {"n_steps", trace.config.n_steps},
            {"config", config_to_json(trace.config)},
            {"config_hash", hex64(config_hash(trace.config))},
            {"versions", {{"engine", kEngineVersion}, {"trace_format", kTraceFormatVersion}}}};
}

/// JSON-lines: one header line, one line per step, one footer line.
inline void write_trace(std::ostream& out, const EpisodeTrace& trace) {
    out << trace_header(trace).dump() << '\n';
    for (const auto& s : trace.steps) out << to_json(s).dump() << '\n';
    out << nlohmann::json{{"type", "footer"},
                          {"n_steps_recorded", trace.steps.size()},
                          {"episode_return", trace.episode_return}}
               .dump()
        << '\n';
}

inline std::string trace_to_string(const EpisodeTrace& trace) {
    std::ostringstream os;
    write_trace(os, trace);
    return os.str();
}

/// Parses a JSON-lines trace and checks its integrity: config hash, step
/// count, contiguous timesteps, footer.
inline EpisodeTrace read_trace(std::istream& in) {
    EpisodeTrace trace;
    std::string line;
    bool have_header = false;
    bool have_footer = false;
    std::string declared_hash;
    std::int64_t recorded = -1;
    try {
        while (std::getline(in, line)) {
            if (line.empty()) continue;
            if (have_footer) throw IntegrityError("trace: records after footer");
            const auto j = nlohmann::json::parse(line);
            const auto type = j.at("type").get<std::string>();
            if (type == "header") {
                if (have_header) throw IntegrityError("trace: duplicate header");
                trace.config = config_from_json(j.at("config"));
                trace.policy = j.at("policy").get<std::string>();
                declared_hash = j.at("config_hash").get<std::string>();
                have_header = true;
            } else if (type == "step") {
                if (!have_header) throw IntegrityError("trace: step before header");
                trace.steps.push_back(step_from_json(j));
            } else if (type == "footer") {
                recorded = j.at("n_steps_recorded").get<std::int64_t>();
                trace.episode_return = j.at("episode_return").get<double>();
                have_footer = true;
            } else {
                throw IntegrityError("trace: unknown record type '" + type + "'");
            }
        }
    } catch (const nlohmann::json::exception& e) {
        throw IntegrityError(std::string("trace: malformed record: ") + e.what());
    }
    if (!have_header) throw IntegrityError("trace: missing header");
    if (!have_footer) throw IntegrityError("trace: missing footer (truncated trace)");
    if (declared_hash != hex64(config_hash(trace.config))) throw IntegrityError("trace: config hash mismatch");
    if (recorded != static_cast<std::int64_t>(trace.steps.size()))
        throw IntegrityError("trace: footer step count disagrees with records");
    if (static_cast<std::int64_t>(trace.steps.size()) != trace.config.n_steps)
        throw IntegrityError("trace: " + std::to_string(trace.steps.size()) + " steps recorded, config expects " +
                             std::to_string(trace.config.n_steps));
    for (std::size_t k = 0; k < trace.steps.size(); ++k)
        if (trace.steps[k].t != static_cast<std::int64_t>(k)) throw IntegrityError("trace: non-contiguous timesteps");
    return trace;
}

inline EpisodeTrace read_trace_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IntegrityError("cannot open trace " + path);
    return read_trace(in);
}

}  // namespace aesa
