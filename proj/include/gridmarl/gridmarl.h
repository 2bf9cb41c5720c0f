// Copyright 2026 The gridmarl Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


/* C interface of libgridmarl. Every call that can fail returns a gm_status
 * and leaves a module-tagged message in its context (gm_last_error). Handles
 * are opaque; a context must outlive the handles created with it. */
#ifndef GRIDMARL_GRIDMARL_H
#define GRIDMARL_GRIDMARL_H

#include <stddef.h>
#include <stdint.h>

#if defined(GRIDMARL_BUILDING_LIBRARY)
#define GM_API __attribute__((visibility("default")))
#else
#define GM_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum gm_status {
  GM_OK = 0,
  GM_ERR_INVALID_ARGUMENT = 1,
  GM_ERR_DIMENSION = 2,
  GM_ERR_NUMERIC = 3,
  GM_ERR_STATE = 4,
  GM_ERR_INSUFFICIENT_DATA = 5,
  GM_ERR_PARSE = 6,
  GM_ERR_IO = 7,
  GM_ERR_TRAINING = 8,
  GM_ERR_NOT_FOUND = 9,
  GM_ERR_CONFIG = 10,
  GM_ERR_INTERNAL = 11
} gm_status;

typedef struct gm_context gm_context;
typedef struct gm_options gm_options;
typedef struct gm_env gm_env;

typedef void (*gm_log_fn)(void* user, const char* line);

GM_API const char* gm_version(void);
GM_API const char* gm_status_name(gm_status status);

GM_API gm_status gm_context_create(gm_context** out);
GM_API void gm_context_destroy(gm_context* ctx);
/* Message of the last failed call on ctx; empty after a success. */
GM_API const char* gm_last_error(const gm_context* ctx);
/* Progress lines of long-running commands. NULL disables logging. */
GM_API void gm_set_log(gm_context* ctx, gm_log_fn fn, void* user);

/* ---- commands ---- */

GM_API size_t gm_command_count(void);
GM_API const char* gm_command_name(size_t index);

GM_API gm_status gm_options_create(gm_context* ctx, gm_options** out);
GM_API void gm_options_destroy(gm_options* opts);
/* Keys: config, preset, seed, out, data, scale, model, checkpoint, scenario,
 * scenarios (comma-separated), from (repeatable), days, threads. */
GM_API gm_status gm_options_set(gm_context* ctx, gm_options* opts, const char* key, const char* value);

/* Runs a subcommand; on success gm_result holds the manifest as JSON. */
GM_API gm_status gm_run(gm_context* ctx, const char* command, const gm_options* opts);
GM_API const char* gm_result(const gm_context* ctx);

/* Resolved configuration of a preset as JSON, in gm_result. */
GM_API gm_status gm_preset_config(gm_context* ctx, const char* preset);

/* ---- wholesale market ---- */

/* Real-time dispatch on the reference market (two thermal units, 50 MW wind).
 * Any output pointer may be NULL. outputs receives one MW value per thermal
 * unit and needs n_outputs >= 2. */
GM_API gm_status gm_dispatch(gm_context* ctx, double demand_mw, double wind_mw, double* lmp, double* total_cost,
                             double* wind_dispatched, double* outputs, size_t n_outputs);

/* ---- environment ---- */

/* env_json: environment config document, or NULL for defaults. Wind comes
 * from the synthetic generator and forecasts are perfect. */
GM_API gm_status gm_env_create(gm_context* ctx, const char* env_json, uint64_t seed, gm_env** out);
GM_API void gm_env_destroy(gm_env* env);
GM_API gm_status gm_env_dims(gm_context* ctx, const gm_env* env, size_t* prosumers, size_t* steps,
                             size_t* lsa_obs_dim, size_t* pa_obs_dim);
/* Starts day `day`; the day-ahead bid is the previous day's idle load. */
GM_API gm_status gm_env_reset(gm_context* ctx, gm_env* env, int64_t day);
GM_API gm_status gm_env_lsa_observation(gm_context* ctx, const gm_env* env, double* out, size_t n);
/* Row-major prosumers x pa_obs_dim observations for the given price. */
GM_API gm_status gm_env_pa_observations(gm_context* ctx, const gm_env* env, double price, double* out, size_t n);
/* One step at the net-metering price with per-prosumer battery requests (kW).
 * pa_rewards receives one value per prosumer; done is set to 1 at the end. */
GM_API gm_status gm_env_step(gm_context* ctx, gm_env* env, double price, const double* b, size_t n_b,
                             double* lsa_reward, double* pa_rewards, size_t n_rewards, int* done);
/* Peak-to-average ratio and LSE profit of the episode so far. */
GM_API gm_status gm_env_summary(gm_context* ctx, const gm_env* env, double* par, double* lse_profit);

#ifdef __cplusplus
}
#endif

#endif /* GRIDMARL_GRIDMARL_H */
