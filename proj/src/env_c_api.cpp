#include "aesa/env_c_api.h"

#include <algorithm>
#include <cstring>
#include <optional>
#include <string>

#include "aesa/env.hpp"

struct aesa_env {
    aesa::Environment env;
    std::string last_error;
};

namespace {

void copy_string(const std::string& s, char* out, size_t len) {
    if (out == nullptr || len == 0) return;
    const size_t n = std::min(s.size(), len - 1);
    std::memcpy(out, s.data(), n);
    out[n] = '\0';
}

void copy_observation(const aesa::Observation& obs, float* track_matrix, float* scan_raster) {
    std::copy(obs.track_matrix.begin(), obs.track_matrix.end(), track_matrix);
    std::copy(obs.scan_raster.begin(), obs.scan_raster.end(), scan_raster);
}

template <class F>
int guarded(aesa_env* env, F&& f) {
    try {
        return f();
    } catch (const aesa::ConfigError& e) {
        env->last_error = e.what();
        return AESA_ERR_CONFIG;
    } catch (const aesa::ContractViolation& e) {
        env->last_error = e.what();
        return AESA_ERR_CONTRACT;
    } catch (const aesa::DomainError& e) {
        env->last_error = e.what();
        return AESA_ERR_DOMAIN;
    } catch (const std::exception& e) {
        env->last_error = e.what();
        return AESA_ERR_INTERNAL;
    }
}

}  // namespace

extern "C" {

aesa_env* aesa_env_create(const char* config_json, char* err, size_t err_len) {
    try {
        aesa::EpisodeConfig cfg;
        if (config_json != nullptr && config_json[0] != '\0') {
            nlohmann::json j;
            try {
                j = nlohmann::json::parse(config_json);
            } catch (const nlohmann::json::exception& e) {
                throw aesa::ConfigError("<root>", std::string("malformed JSON: ") + e.what());
            }
            cfg = aesa::config_from_json(j);
        }
        return new aesa_env{aesa::Environment(cfg), {}};
    } catch (const std::exception& e) {
        copy_string(e.what(), err, err_len);
        return nullptr;
    }
}

void aesa_env_destroy(aesa_env* env) { delete env; }

const char* aesa_env_last_error(const aesa_env* env) { return env ? env->last_error.c_str() : "null handle"; }

int aesa_env_grid_size(const aesa_env* env) { return env ? env->env.grid().n : AESA_ERR_CONTRACT; }

int64_t aesa_env_max_steps(const aesa_env* env) { return env ? env->env.config().n_steps : AESA_ERR_CONTRACT; }

int aesa_env_config_json(const aesa_env* env, char* out, size_t out_len) {
    if (env == nullptr) return AESA_ERR_CONTRACT;
    const std::string s = aesa::config_to_json(env->env.config()).dump();
    if (out == nullptr || out_len <= s.size()) return AESA_ERR_BUFFER;
    copy_string(s, out, out_len);
    return AESA_OK;
}

int aesa_env_reset(aesa_env* env, uint64_t seed, float* track_matrix, float* scan_raster) {
    if (env == nullptr) return AESA_ERR_CONTRACT;
    return guarded(env, [&] {
        if (track_matrix == nullptr || scan_raster == nullptr) {
            env->last_error = "reset: observation buffers must not be null";
            return static_cast<int>(AESA_ERR_BUFFER);
        }
        copy_observation(env->env.reset(seed), track_matrix, scan_raster);
        return static_cast<int>(AESA_OK);
    });
}

int aesa_env_step(aesa_env* env, int32_t a_psi, int32_t a_theta, float* track_matrix, float* scan_raster,
                  double reward[3], int* done, char* info_json, size_t info_len) {
    if (env == nullptr) return AESA_ERR_CONTRACT;
    return guarded(env, [&] {
        if (track_matrix == nullptr || scan_raster == nullptr || reward == nullptr || done == nullptr) {
            env->last_error = "step: output buffers must not be null";
            return static_cast<int>(AESA_ERR_BUFFER);
        }
        std::optional<std::string> info;
        const aesa::StepResult r = env->env.step({a_psi, a_theta});
        if (info_json != nullptr && info_len > 0) {
            info = aesa::to_json(r.info).dump();
            if (info->size() >= info_len) {
                env->last_error = "step: info buffer too small (" + std::to_string(info->size() + 1) + " bytes needed)";
                copy_observation(r.observation, track_matrix, scan_raster);
                reward[0] = r.reward.r_sv;
                reward[1] = r.reward.r_tl;
                reward[2] = r.reward.r_total;
                *done = r.done ? 1 : 0;
                return static_cast<int>(AESA_ERR_BUFFER);
            }
            copy_string(*info, info_json, info_len);
        }
        copy_observation(r.observation, track_matrix, scan_raster);
        reward[0] = r.reward.r_sv;
        reward[1] = r.reward.r_tl;
        reward[2] = r.reward.r_total;
        *done = r.done ? 1 : 0;
        return static_cast<int>(AESA_OK);
    });
}

}  // extern "C"
