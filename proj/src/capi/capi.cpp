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


#include "gridmarl/gridmarl.h"

#include <cmath>
#include <memory>
#include <new>
#include <string>

#include "gridmarl/commands.hpp"
#include "gridmarl/config.hpp"
#include "gridmarl/data.hpp"
#include "gridmarl/env.hpp"
#include "gridmarl/errors.hpp"
#include "gridmarl/market.hpp"
#include "gridmarl/text.hpp"

using namespace gridmarl;

struct gm_context {
  std::string error;
  std::string result;
  gm_log_fn log = nullptr;
  void* log_user = nullptr;
};

struct gm_options {
  data::CommandOptions options;
};

struct gm_env {
  env::EnvConfig config;
  std::shared_ptr<const env::ExogenousSource> source;
  std::unique_ptr<env::MarketEnv> env;
  std::uint64_t seed = 0;
};

namespace {

template <class F>
gm_status guarded(gm_context* ctx, F&& f) {
  if (ctx == nullptr) return GM_ERR_INVALID_ARGUMENT;
  ctx->error.clear();
  try {
    f();
    return GM_OK;
  } catch (const Error& e) {
    ctx->error = e.what();
    return static_cast<gm_status>(static_cast<int>(e.code()));
  } catch (const nlohmann::json::exception& e) {
    ctx->error = std::string("cli_data: ") + e.what();
    return GM_ERR_PARSE;
  } catch (const std::bad_alloc&) {
    ctx->error = "out of memory";
    return GM_ERR_INTERNAL;
  } catch (const std::exception& e) {
    ctx->error = std::string("internal: ") + e.what();
    return GM_ERR_INTERNAL;
  } catch (...) {
    ctx->error = "internal: unknown exception";
    return GM_ERR_INTERNAL;
  }
}

void require(bool ok, const std::string& what) {
  if (!ok) throw InvalidArgument(what);
}

std::size_t parse_count(const std::string& value, const std::string& key) {
  const long long v = text::parse_int(value, key);
  if (v < 0) throw InvalidArgument(key + " must be non-negative");
  return static_cast<std::size_t>(v);
}

}  // namespace

extern "C" {

GM_API const char* gm_version(void) { return "0.1.0"; }

GM_API const char* gm_status_name(gm_status status) {
  switch (status) {
    case GM_OK: return "ok";
    case GM_ERR_INVALID_ARGUMENT: return "invalid_argument";
    case GM_ERR_DIMENSION: return "dimension";
    case GM_ERR_NUMERIC: return "numeric";
    case GM_ERR_STATE: return "state";
    case GM_ERR_INSUFFICIENT_DATA: return "insufficient_data";
    case GM_ERR_PARSE: return "parse";
    case GM_ERR_IO: return "io";
    case GM_ERR_TRAINING: return "training";
    case GM_ERR_NOT_FOUND: return "not_found";
    case GM_ERR_CONFIG: return "config";
    case GM_ERR_INTERNAL: return "internal";
  }
  return "unknown";
}

GM_API gm_status gm_context_create(gm_context** out) {
  if (out == nullptr) return GM_ERR_INVALID_ARGUMENT;
  *out = new (std::nothrow) gm_context();
  return *out == nullptr ? GM_ERR_INTERNAL : GM_OK;
}

GM_API void gm_context_destroy(gm_context* ctx) { delete ctx; }

GM_API const char* gm_last_error(const gm_context* ctx) { return ctx == nullptr ? "" : ctx->error.c_str(); }

GM_API void gm_set_log(gm_context* ctx, gm_log_fn fn, void* user) {
  if (ctx == nullptr) return;
  ctx->log = fn;
  ctx->log_user = user;
}

GM_API size_t gm_command_count(void) { return data::command_names().size(); }

GM_API const char* gm_command_name(size_t index) {
  const auto& names = data::command_names();
  return index < names.size() ? names[index].c_str() : nullptr;
}

GM_API gm_status gm_options_create(gm_context* ctx, gm_options** out) {
  return guarded(ctx, [&] {
    require(out != nullptr, "gm_options_create: null output");
    *out = new gm_options();
  });
}

GM_API void gm_options_destroy(gm_options* opts) { delete opts; }

GM_API gm_status gm_options_set(gm_context* ctx, gm_options* opts, const char* key, const char* value) {
  return guarded(ctx, [&] {
    require(opts != nullptr && key != nullptr && value != nullptr, "gm_options_set: null argument");
    auto& o = opts->options;
    const std::string k = key, v = value;
    if (k == "config") o.config_path = v;
    else if (k == "preset") o.preset = v;
    else if (k == "seed") {
      require(!v.empty() && v.find_first_not_of("0123456789") == std::string::npos, "seed must be a non-negative integer");
      o.seed = std::stoull(v);
    } else if (k == "out") o.out_dir = v;
    else if (k == "data") o.data_path = v;
    else if (k == "scale") o.data_scale = v;
    else if (k == "model") o.model_path = v;
    else if (k == "checkpoint") o.checkpoint_path = v;
    else if (k == "scenario") o.scenario = v;
    else if (k == "scenarios") {
      o.scenarios.clear();
      for (auto part : text::split(v, ',')) {
        require(!part.empty(), "scenarios: empty name in '" + v + "'");
        o.scenarios.emplace_back(part);
      }
    } else if (k == "from") o.from.push_back(v);
    else if (k == "days") o.days = parse_count(v, "days");
    else if (k == "threads") o.threads = parse_count(v, "threads");
    else throw InvalidArgument("gm_options_set: unknown option '" + k + "'");
  });
}

GM_API gm_status gm_run(gm_context* ctx, const char* command, const gm_options* opts) {
  return guarded(ctx, [&] {
    require(command != nullptr, "gm_run: null command");
    const data::CommandOptions o = opts ? opts->options : data::CommandOptions{};
    data::LogFn log;
    if (ctx->log != nullptr) {
      log = [ctx](const std::string& line) { ctx->log(ctx->log_user, line.c_str()); };
    }
    ctx->result = data::run_command(command, o, log).to_json().dump(2);
  });
}

GM_API const char* gm_result(const gm_context* ctx) { return ctx == nullptr ? "" : ctx->result.c_str(); }

GM_API gm_status gm_preset_config(gm_context* ctx, const char* preset) {
  return guarded(ctx, [&] {
    require(preset != nullptr, "gm_preset_config: null preset");
    ctx->result = data::to_json(data::preset_config(preset)).dump(2);
  });
}

GM_API gm_status gm_dispatch(gm_context* ctx, double demand_mw, double wind_mw, double* lmp, double* total_cost,
                             double* wind_dispatched, double* outputs, size_t n_outputs) {
  return guarded(ctx, [&] {
    static const market::MarketSpec spec = market::default_market();
    const auto r = market::economic_dispatch(demand_mw, wind_mw, spec);
    if (outputs != nullptr) {
      require(n_outputs >= r.outputs.size(), "gm_dispatch: outputs holds " + std::to_string(n_outputs) +
                                                  " values, need " + std::to_string(r.outputs.size()));
      for (std::size_t g = 0; g < r.outputs.size(); ++g) outputs[g] = r.outputs[g];
    }
    if (lmp != nullptr) *lmp = r.lmp;
    if (total_cost != nullptr) *total_cost = r.total_cost;
    if (wind_dispatched != nullptr) *wind_dispatched = r.wind;
  });
}

GM_API gm_status gm_env_create(gm_context* ctx, const char* env_json, uint64_t seed, gm_env** out) {
  return guarded(ctx, [&] {
    require(out != nullptr, "gm_env_create: null output");
    auto e = std::make_unique<gm_env>();
    if (env_json != nullptr) {
      try {
        e->config = env::env_config_from_json(nlohmann::json::parse(env_json));
      } catch (const nlohmann::json::parse_error& err) {
        throw ParseError(std::string("env: ") + err.what());
      }
    }
    e->config.validate();
    e->seed = seed;
    data::SyntheticProfileSpec spec;
    spec.days = 30;
    spec.households = e->config.profiles;
    const auto hourly = forecast::prepare_hourly(data::synthesize_wind(spec, seed), 5);
    env::WindCalendar wind(hourly, 24, 0, e->config.market.wind.p_max);
    e->source = std::make_shared<const env::ExogenousSource>(e->config, std::move(wind), seed,
                                                             env::ForecastMode::perfect, nullptr);
    e->env = std::make_unique<env::MarketEnv>(e->config);
    *out = e.release();
  });
}

GM_API void gm_env_destroy(gm_env* env) { delete env; }

GM_API gm_status gm_env_dims(gm_context* ctx, const gm_env* env, size_t* prosumers, size_t* steps,
                             size_t* lsa_obs_dim, size_t* pa_obs_dim) {
  return guarded(ctx, [&] {
    require(env != nullptr, "gm_env_dims: null env");
    if (prosumers != nullptr) *prosumers = env->config.profiles.prosumers;
    if (steps != nullptr) *steps = env->config.steps;
    if (lsa_obs_dim != nullptr) *lsa_obs_dim = env->config.lsa_obs_dim();
    if (pa_obs_dim != nullptr) *pa_obs_dim = env->config.pa_obs_dim();
  });
}

GM_API gm_status gm_env_reset(gm_context* ctx, gm_env* env, int64_t day) {
  return guarded(ctx, [&] {
    require(env != nullptr, "gm_env_reset: null env");
    require(day >= 1, "gm_env_reset: day must be at least 1");
    auto l_da = env::idle_net_load(env::make_day_profile(env->config.profiles, env->seed, day - 1, env->config.steps));
    env->env->reset(env->source->day(day), std::move(l_da));
  });
}

GM_API gm_status gm_env_lsa_observation(gm_context* ctx, const gm_env* env, double* out, size_t n) {
  return guarded(ctx, [&] {
    require(env != nullptr && out != nullptr, "gm_env_lsa_observation: null argument");
    const auto obs = env->env->lsa_observation();
    if (n != obs.size()) {
      throw DimensionError("gm_env_lsa_observation: buffer holds " + std::to_string(n) + " values, need " +
                           std::to_string(obs.size()));
    }
    std::copy(obs.begin(), obs.end(), out);
  });
}

GM_API gm_status gm_env_pa_observations(gm_context* ctx, const gm_env* env, double price, double* out, size_t n) {
  return guarded(ctx, [&] {
    require(env != nullptr && out != nullptr, "gm_env_pa_observations: null argument");
    const auto obs = env->env->pa_observations({price, price});
    std::size_t total = 0;
    for (const auto& o : obs) total += o.size();
    if (n != total) {
      throw DimensionError("gm_env_pa_observations: buffer holds " + std::to_string(n) + " values, need " +
                           std::to_string(total));
    }
    for (const auto& o : obs) out = std::copy(o.begin(), o.end(), out);
  });
}

GM_API gm_status gm_env_step(gm_context* ctx, gm_env* env, double price, const double* b, size_t n_b,
                             double* lsa_reward, double* pa_rewards, size_t n_rewards, int* done) {
  return guarded(ctx, [&] {
    require(env != nullptr, "gm_env_step: null env");
    const std::size_t np = env->config.profiles.prosumers;
    if (n_b != np || (np > 0 && b == nullptr)) {
      throw DimensionError("gm_env_step: expected " + std::to_string(np) + " battery actions, got " +
                           std::to_string(n_b));
    }
    if (pa_rewards != nullptr && n_rewards < np) {
      throw DimensionError("gm_env_step: reward buffer holds " + std::to_string(n_rewards) + " values, need " +
                           std::to_string(np));
    }
    const auto r = env->env->step({price, price}, std::vector<double>(b, b + n_b));
    if (lsa_reward != nullptr) *lsa_reward = r.lsa_reward;
    if (pa_rewards != nullptr) std::copy(r.pa_rewards.begin(), r.pa_rewards.end(), pa_rewards);
    if (done != nullptr) *done = env->env->done() ? 1 : 0;
  });
}

GM_API gm_status gm_env_summary(gm_context* ctx, const gm_env* env, double* par, double* lse_profit) {
  return guarded(ctx, [&] {
    require(env != nullptr, "gm_env_summary: null env");
    const auto s = env->env->summary();
    if (par != nullptr) *par = s.par;
    if (lse_profit != nullptr) *lse_profit = s.lse_profit;
  });
}

}  // extern "C"
