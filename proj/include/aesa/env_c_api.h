/* C ABI over the episode engine, for foreign-language environment wrappers.
 *
 * Observation buffers are caller-owned float32 arrays of AESA_TRACK_MATRIX_LEN
 * (15 x 7, row-major) and AESA_SCAN_RASTER_LEN (1 x 48 x 48, row-major).
 * Functions return AESA_OK or a negative status; aesa_env_last_error gives
 * the message of the most recent failure on that handle.
 */
#ifndef AESA_ENV_C_API_H
#define AESA_ENV_C_API_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define AESA_API __declspec(dllexport)
#else
#define AESA_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

#define AESA_TRACK_ROWS 15
#define AESA_TRACK_FEATURES 7
#define AESA_RASTER_SIZE 48
#define AESA_TRACK_MATRIX_LEN (AESA_TRACK_ROWS * AESA_TRACK_FEATURES)
#define AESA_SCAN_RASTER_LEN (AESA_RASTER_SIZE * AESA_RASTER_SIZE)

enum aesa_status {
    AESA_OK = 0,
    AESA_ERR_CONFIG = -1,
    AESA_ERR_CONTRACT = -2,
    AESA_ERR_DOMAIN = -3,
    AESA_ERR_BUFFER = -4,
    AESA_ERR_INTERNAL = -5
};

typedef struct aesa_env aesa_env;

/* config_json may be NULL or "" for defaults. On failure returns NULL and
 * copies the message (field path first) into err when err_len > 0. */
AESA_API aesa_env* aesa_env_create(const char* config_json, char* err, size_t err_len);
AESA_API void aesa_env_destroy(aesa_env* env);

AESA_API const char* aesa_env_last_error(const aesa_env* env);
AESA_API int aesa_env_grid_size(const aesa_env* env);
AESA_API int64_t aesa_env_max_steps(const aesa_env* env);

/* Canonical JSON of the effective configuration (config echo). */
AESA_API int aesa_env_config_json(const aesa_env* env, char* out, size_t out_len);

AESA_API int aesa_env_reset(aesa_env* env, uint64_t seed, float* track_matrix, float* scan_raster);

/* reward receives {r_sv, r_tl, r_total}. info_json (optional) receives the
 * step record: bearing, detections, tracks, truths. */
AESA_API int aesa_env_step(aesa_env* env, int32_t a_psi, int32_t a_theta, float* track_matrix, float* scan_raster,
                           double reward[3], int* done, char* info_json, size_t info_len);

#ifdef __cplusplus
}
#endif

#endif
