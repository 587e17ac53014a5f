#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <utility>

#include "aesa/actions_obs.hpp"
#include "aesa/errors.hpp"
#include "aesa/rng.hpp"

namespace aesa {

/// Beam-scheduling policy. `reset` is called once per episode with the
/// episode's master seed; `act` once per step.
class Policy {
public:
    virtual ~Policy() = default;
    virtual std::string name() const = 0;
    virtual void reset(std::uint64_t seed, const ActionGrid& grid) = 0;
    virtual BeamAction act(std::int64_t step, const Observation& obs) = 0;
};

inline BeamAction random_action(Rng& rng, const ActionGrid& grid) {
    const auto n = static_cast<std::uint64_t>(grid.n);
    const int a_psi = static_cast<int>(rng.uniform_index(n));
    const int a_theta = static_cast<int>(rng.uniform_index(n));
    return {a_psi, a_theta};
}

/// Row-major raster: column index advances every step, row every n steps.
inline BeamAction coverage_action(std::int64_t step, int n) {
    const std::int64_t k = step % (static_cast<std::int64_t>(n) * n);
    return {static_cast<int>(k % n), static_cast<int>(k / n)};
}

/// Samples one action uniformly at the first step and holds it.
class StaticPolicy final : public Policy {
public:
    std::string name() const override { return "static"; }

    void reset(std::uint64_t seed, const ActionGrid& grid) override {
        rng_ = Rng::stream(seed, "policy");
        grid_ = grid;
        held_.reset();
    }

    BeamAction act(std::int64_t, const Observation&) override {
        if (!held_) held_ = random_action(rng_, grid_);
        return *held_;
    }

private:
    Rng rng_;
    ActionGrid grid_;
    std::optional<BeamAction> held_;
};

/// Independent uniform action every step.
class RandomPolicy final : public Policy {
public:
    std::string name() const override { return "random"; }

    void reset(std::uint64_t seed, const ActionGrid& grid) override {
        rng_ = Rng::stream(seed, "policy");
        grid_ = grid;
    }

    BeamAction act(std::int64_t, const Observation&) override { return random_action(rng_, grid_); }

private:
    Rng rng_;
    ActionGrid grid_;
};

class CoveragePolicy final : public Policy {
public:
    std::string name() const override { return "coverage"; }
    void reset(std::uint64_t, const ActionGrid& grid) override { grid_ = grid; }
    BeamAction act(std::int64_t step, const Observation&) override { return coverage_action(step, grid_.n); }

private:
    ActionGrid grid_;
};

/// Actions supplied by an outside agent through a callback.
class ExternalPolicy final : public Policy {
public:
    using Callback = std::function<BeamAction(std::int64_t step, const Observation& obs)>;

    explicit ExternalPolicy(Callback cb) : cb_(std::move(cb)) {}
    std::string name() const override { return "external"; }
    void reset(std::uint64_t, const ActionGrid&) override {}
    BeamAction act(std::int64_t step, const Observation& obs) override { return cb_(step, obs); }

private:
    Callback cb_;
};

/// Built-in policies by name: static, random, coverage.
inline std::unique_ptr<Policy> make_policy(const std::string& name) {
    if (name == "static") return std::make_unique<StaticPolicy>();
    if (name == "random") return std::make_unique<RandomPolicy>();
    if (name == "coverage") return std::make_unique<CoveragePolicy>();
    throw ConfigError("policy", "unknown policy '" + name + "'");
}

}  // namespace aesa
