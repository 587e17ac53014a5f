#pragma once

#include <cmath>
#include <cstdint>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>
#include <string>

#include <json.hpp>

#include "aesa/actions_obs.hpp"
#include "aesa/errors.hpp"
#include "aesa/gospa.hpp"
#include "aesa/mtt.hpp"
#include "aesa/rng.hpp"
#include "aesa/scan_history.hpp"
#include "aesa/sim.hpp"

namespace aesa {

inline constexpr const char* kEngineVersion = "0.1.0";
inline constexpr int kTraceFormatVersion = 1;

struct ScanConfig {
    std::size_t n_sv = 64;
    double zeta = 0.01;
    double t_decay = 600.0;
    int p_max_steps = 4;
};

struct RewardConfig {
    bool paper_literal_sign = false;
};

/// Everything that, together with the policy, determines an episode.
/// Angles are radians, distances metres, times seconds.
struct EpisodeConfig {
    std::uint64_t seed = 0;
    double dt = 0.05;
    std::int64_t n_steps = 1200;
    int n_targets = 10;
    SensorModel sensor;
    double q_tilde = 1.0;
    TrackerConfig tracker;
    ScanConfig scan;
    double field_of_regard = 2.0 * std::numbers::pi / 3.0;
    SpawnBounds spawn;
    GospaConfig gospa;
    RewardConfig rewards;
    OverflowPolicy overflow = OverflowPolicy::LowestCovariance;

    ActionGrid grid() const { return ActionGrid::make(field_of_regard, sensor.beam_width); }

    ScanHistory::Params scan_params() const {
        return {scan.n_sv, sigma0_from_beamwidth(sensor.beam_width), gamma_from_decay(scan.zeta, scan.t_decay),
                scan.p_max_steps};
    }

    MotionModel motion_model() const { return {dt, q_tilde}; }

    void validate() const {
        auto require = [](bool ok, const char* field, const char* what) {
            if (!ok) throw ConfigError(field, what);
        };
        require(dt > 0.0 && std::isfinite(dt), "dt", "must be positive");
        require(n_steps >= 1, "n_steps", "must be >= 1");
        require(n_targets >= 0, "n_targets", "must be >= 0");
        require(sensor.beam_width > 0.0 && sensor.beam_width < std::numbers::pi, "sensor.beam_width",
                "must lie in (0, pi)");
        require(sensor.sigma_psi >= 0.0, "sensor.sigma_psi", "must be >= 0");
        require(sensor.sigma_theta >= 0.0, "sensor.sigma_theta", "must be >= 0");
        require(sensor.sigma_r >= 0.0, "sensor.sigma_r", "must be >= 0");
        require(sensor.p_detect >= 0.0 && sensor.p_detect <= 1.0, "sensor.p_detect", "must lie in [0, 1]");
        require(sensor.clutter_rate >= 0.0, "sensor.clutter_rate", "must be >= 0");
        require(q_tilde >= 0.0, "tracker.q_tilde", "must be >= 0");
        require(tracker.c_threshold > 0.0, "tracker.c_threshold", "must be positive");
        require(tracker.gate > 0.0, "tracker.gate", "must be positive");
        require(tracker.init_vel_var > 0.0, "tracker.init_vel_var", "must be positive");
        require(tracker.ukf.alpha > 0.0, "tracker.ukf.alpha", "must be positive");
        require(tracker.ukf.alpha * tracker.ukf.alpha * (3.0 + tracker.ukf.kappa) > 0.0, "tracker.ukf.kappa",
                "spread parameters give a non-positive sigma-point scale");
        require(scan.n_sv >= 1, "scan.n_sv", "must be >= 1");
        require(scan.zeta > 0.0 && scan.zeta <= 1.0, "scan.zeta", "must lie in (0, 1]");
        require(scan.t_decay >= 1.0, "scan.t_decay", "must be >= 1");
        require(scan.p_max_steps >= 0, "scan.p_max_steps", "must be >= 0");
        require(field_of_regard > 0.0 && field_of_regard <= std::numbers::pi, "grid.field_of_regard",
                "must lie in (0, pi]");
        grid();
        require(std::abs(spawn.half_extent - field_of_regard / 2.0) < 1e-12, "spawn.half_extent",
                "must equal half the field of regard");
        spawn.validate();
        gospa.validate();
    }
};

namespace detail {

/// Reads known keys from a JSON object and rejects anything else.
class ObjectReader {
public:
    ObjectReader(const nlohmann::json& j, std::string path) : j_(j), path_(std::move(path)) {
        if (!j_.is_object()) throw ConfigError(path_.empty() ? "<root>" : path_, "expected an object");
    }

    std::string field(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

    template <class T>
    void read(const std::string& key, T& out) {
        seen_.insert(key);
        const auto it = j_.find(key);
        if (it == j_.end()) return;
        try {
            if constexpr (std::is_same_v<T, bool>) {
                if (!it->is_boolean()) throw ConfigError(field(key), "expected a boolean");
            } else if constexpr (std::is_integral_v<T>) {
                if (!it->is_number_integer()) throw ConfigError(field(key), "expected an integer");
                if constexpr (std::is_unsigned_v<T>)
                    if (it->is_number_integer() && !it->is_number_unsigned())
                        throw ConfigError(field(key), "expected a non-negative integer");
            } else if constexpr (std::is_floating_point_v<T>) {
                if (!it->is_number()) throw ConfigError(field(key), "expected a number");
            }
            out = it->get<T>();
        } catch (const nlohmann::json::exception& e) {
            throw ConfigError(field(key), e.what());
        }
    }

    const nlohmann::json* child(const std::string& key) {
        seen_.insert(key);
        const auto it = j_.find(key);
        return it == j_.end() ? nullptr : &*it;
    }

    void finish() const {
        for (const auto& [key, _] : j_.items())
            if (!seen_.contains(key)) throw ConfigError(field(key), "unknown key");
    }

private:
    const nlohmann::json& j_;
    std::string path_;
    std::set<std::string> seen_;
};

}  // namespace detail

/// Parses a config; missing keys keep their defaults, unknown keys are
/// rejected with their full path.
inline EpisodeConfig config_from_json(const nlohmann::json& j) {
    EpisodeConfig c;
    detail::ObjectReader root(j, "");
    root.read("seed", c.seed);
    root.read("dt", c.dt);
    root.read("n_steps", c.n_steps);
    root.read("n_targets", c.n_targets);

    if (const auto* s = root.child("sensor")) {
        detail::ObjectReader r(*s, "sensor");
        r.read("beam_width", c.sensor.beam_width);
        r.read("sigma_psi", c.sensor.sigma_psi);
        r.read("sigma_theta", c.sensor.sigma_theta);
        r.read("sigma_r", c.sensor.sigma_r);
        r.read("p_detect", c.sensor.p_detect);
        r.read("clutter_rate", c.sensor.clutter_rate);
        r.finish();
    }
    if (const auto* s = root.child("tracker")) {
        detail::ObjectReader r(*s, "tracker");
        r.read("q_tilde", c.q_tilde);
        r.read("gate", c.tracker.gate);
        r.read("c_threshold", c.tracker.c_threshold);
        r.read("init_vel_var", c.tracker.init_vel_var);
        if (const auto* u = r.child("ukf")) {
            detail::ObjectReader ur(*u, "tracker.ukf");
            ur.read("alpha", c.tracker.ukf.alpha);
            ur.read("beta", c.tracker.ukf.beta);
            ur.read("kappa", c.tracker.ukf.kappa);
            ur.finish();
        }
        r.finish();
    }
    if (const auto* s = root.child("scan")) {
        detail::ObjectReader r(*s, "scan");
        r.read("n_sv", c.scan.n_sv);
        r.read("zeta", c.scan.zeta);
        r.read("t_decay", c.scan.t_decay);
        r.read("p_max_steps", c.scan.p_max_steps);
        r.finish();
    }
    if (const auto* s = root.child("grid")) {
        detail::ObjectReader r(*s, "grid");
        r.read("field_of_regard", c.field_of_regard);
        r.finish();
    }
    c.spawn.half_extent = c.field_of_regard / 2.0;
    if (const auto* s = root.child("spawn")) {
        detail::ObjectReader r(*s, "spawn");
        r.read("r_min", c.spawn.r_min);
        r.read("r_max", c.spawn.r_max);
        r.read("v_min", c.spawn.v_min);
        r.read("v_max", c.spawn.v_max);
        r.finish();
    }
    if (const auto* s = root.child("gospa")) {
        detail::ObjectReader r(*s, "gospa");
        r.read("c", c.gospa.c);
        r.read("p", c.gospa.p);
        r.read("alpha", c.gospa.alpha);
        r.read("switching_weight", c.gospa.switching_weight);
        r.finish();
    }
    if (const auto* s = root.child("rewards")) {
        detail::ObjectReader r(*s, "rewards");
        r.read("paper_literal_sign", c.rewards.paper_literal_sign);
        r.finish();
    }
    if (const auto* s = root.child("observation")) {
        detail::ObjectReader r(*s, "observation");
        std::string overflow = "lowest_covariance";
        r.read("overflow", overflow);
        if (overflow == "lowest_covariance")
            c.overflow = OverflowPolicy::LowestCovariance;
        else if (overflow == "first_by_id")
            c.overflow = OverflowPolicy::FirstById;
        else
            throw ConfigError("observation.overflow", "expected 'lowest_covariance' or 'first_by_id'");
        r.finish();
    }
    root.finish();
    c.validate();
    return c;
}

inline nlohmann::json config_to_json(const EpisodeConfig& c) {
    return {
        {"seed", c.seed},
        {"dt", c.dt},
        {"n_steps", c.n_steps},
        {"n_targets", c.n_targets},
        {"sensor",
         {{"beam_width", c.sensor.beam_width},
          {"sigma_psi", c.sensor.sigma_psi},
          {"sigma_theta", c.sensor.sigma_theta},
          {"sigma_r", c.sensor.sigma_r},
          {"p_detect", c.sensor.p_detect},
          {"clutter_rate", c.sensor.clutter_rate}}},
        {"tracker",
         {{"q_tilde", c.q_tilde},
          {"gate", c.tracker.gate},
          {"c_threshold", c.tracker.c_threshold},
          {"init_vel_var", c.tracker.init_vel_var},
          {"ukf", {{"alpha", c.tracker.ukf.alpha}, {"beta", c.tracker.ukf.beta}, {"kappa", c.tracker.ukf.kappa}}}}},
        {"scan",
         {{"n_sv", c.scan.n_sv},
          {"zeta", c.scan.zeta},
          {"t_decay", c.scan.t_decay},
          {"p_max_steps", c.scan.p_max_steps}}},
        {"grid", {{"field_of_regard", c.field_of_regard}}},
        {"spawn", {{"r_min", c.spawn.r_min}, {"r_max", c.spawn.r_max}, {"v_min", c.spawn.v_min}, {"v_max", c.spawn.v_max}}},
        {"gospa", {{"c", c.gospa.c}, {"p", c.gospa.p}, {"alpha", c.gospa.alpha}, {"switching_weight", c.gospa.switching_weight}}},
        {"rewards", {{"paper_literal_sign", c.rewards.paper_literal_sign}}},
        {"observation",
         {{"overflow", c.overflow == OverflowPolicy::LowestCovariance ? "lowest_covariance" : "first_by_id"}}},
    };
}

/// FNV-1a of the canonical (sorted-key) JSON dump.
inline std::uint64_t config_hash(const EpisodeConfig& c) { return fnv1a64(config_to_json(c).dump()); }

inline EpisodeConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("<file>", "cannot open " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("<file>", std::string("malformed JSON: ") + e.what());
    }
    return config_from_json(j);
}

}  // namespace aesa
