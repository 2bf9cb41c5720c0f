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


#include "gridmarl/config.hpp"

#include <algorithm>
#include <fstream>

#include "gridmarl/errors.hpp"

namespace gridmarl::data {

namespace {

// Agent fields the trainer derives from the environment.
const std::vector<std::string> kDerivedAgentKeys = {"obs_dim", "act_dim", "act_low", "act_high", "actor_output"};

void small_agent(ddpg::AgentConfig& c) {
  c.actor.hidden = {32, 32, 16};
  c.critic.hidden = {32, 32, 16};
  c.actor.batch_norm = false;
  c.critic.batch_norm = false;
  c.buffer_capacity = 100000;
  c.actor_optimizer = {nn::OptimizerKind::adam, 1e-3};
}

// Rejects keys of `doc` that `ref` does not have. Arrays of objects are
// checked element-wise against the first reference element; a null
// reference accepts anything.
void check_keys(const nlohmann::json& doc, const nlohmann::json& ref, const std::string& path) {
  if (ref.is_null()) return;
  if (doc.is_object() && ref.is_object()) {
    for (const auto& [key, value] : doc.items()) {
      const std::string where = path.empty() ? key : path + "." + key;
      if (!ref.contains(key)) throw ConfigError("config: unknown key '" + where + "'");
      check_keys(value, ref.at(key), where);
    }
  } else if (doc.is_array() && ref.is_array() && !ref.empty() && ref.front().is_object()) {
    for (std::size_t k = 0; k < doc.size(); ++k) {
      check_keys(doc[k], ref.front(), path + "[" + std::to_string(k) + "]");
    }
  }
}

}  // namespace

void RunConfig::validate() const {
  if (version != kConfigVersion) {
    throw ConfigError("config: version " + std::to_string(version) + " is not supported (expected " +
                      std::to_string(kConfigVersion) + ")");
  }
  if (data_days == 0) throw ConfigError("config: data_days must be at least 1");
  if (impute_k == 0) throw ConfigError("config: impute_k must be at least 1");
  if (!(train_fraction > 0.0 && train_fraction <= 1.0)) {
    throw ConfigError("config: train_fraction must lie in (0, 1]");
  }
  wind.validate();
  forecaster.validate();
  env.validate();
  for (const auto& name : compare) {
    const auto& known = scenarios::scenario_names();
    if (std::find(known.begin(), known.end(), name) == known.end()) {
      throw ConfigError("config: unknown scenario '" + name + "' in compare");
    }
  }
  if (training.eval_days == 0 || training.eval_days > training.episodes) {
    throw ConfigError("config: training.eval_days must lie in [1, episodes]");
  }
}

const std::vector<std::string>& preset_names() {
  static const std::vector<std::string> names = {"default", "test"};
  return names;
}

RunConfig preset_config(const std::string& name) {
  RunConfig c;
  c.preset = name;
  c.forecaster.hidden_sizes = {100, 100};
  c.forecaster.epochs = 100;
  if (name == "default") return c;
  if (name != "test") throw ConfigError("config: unknown preset '" + name + "'");
  c.data_days = 60;
  c.forecaster.hidden_sizes = {16, 16};
  c.forecaster.epochs = 20;
  c.env.pa_reward_scale = 0.1;
  c.training.episodes = 200;
  c.training.eval_days = 50;
  small_agent(c.training.lsa);
  small_agent(c.training.pa);
  c.training.lsa.critic_optimizer.learning_rate = 1e-3;
  return c;
}

nlohmann::json to_json(const RunConfig& c) {
  nlohmann::json training = env::to_json(c.training);
  for (const char* agent : {"lsa", "pa"}) {
    for (const auto& key : kDerivedAgentKeys) training[agent].erase(key);
  }
  return {{"version", c.version},
          {"preset", c.preset},
          {"seed", c.seed},
          {"data_days", c.data_days},
          {"wind", to_json(c.wind)},
          {"impute_k", c.impute_k},
          {"train_fraction", c.train_fraction},
          {"forecaster", forecast::to_json(c.forecaster)},
          {"env", env::to_json(c.env)},
          {"training", training},
          {"scenarios", scenarios::to_json(c.scenarios)},
          {"compare", c.compare}};
}

RunConfig run_config_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("config: document must be a JSON object");
  if (!j.contains("version")) throw ConfigError("config: missing 'version'");
  const nlohmann::json& v = j.at("version");
  if (!v.is_number_integer() || v.get<int>() != kConfigVersion) {
    throw ConfigError("config: version " + v.dump() + " is not supported (expected " +
                      std::to_string(kConfigVersion) + ")");
  }
  std::string preset = "default";
  if (j.contains("preset")) {
    if (!j.at("preset").is_string()) throw ConfigError("config: 'preset' must be a string");
    preset = j.at("preset").get<std::string>();
  }
  const nlohmann::json base = to_json(preset_config(preset));
  check_keys(j, base, "");
  nlohmann::json merged = base;
  merged.merge_patch(j);
  RunConfig c;
  try {
    c.version = merged.at("version").get<int>();
    c.preset = preset;
    c.seed = merged.at("seed").get<std::uint64_t>();
    c.data_days = merged.at("data_days").get<std::size_t>();
    c.wind = wind_model_from_json(merged.at("wind"));
    c.impute_k = merged.at("impute_k").get<std::size_t>();
    c.train_fraction = merged.at("train_fraction").get<double>();
    c.forecaster = forecast::forecaster_config_from_json(merged.at("forecaster"));
    c.env = env::env_config_from_json(merged.at("env"));
    c.training = env::training_config_from_json(merged.at("training"));
    c.scenarios = scenarios::scenario_settings_from_json(merged.at("scenarios"));
    c.compare = merged.at("compare").get<std::vector<std::string>>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  c.validate();
  return c;
}

RunConfig load_run_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw NotFound("config file '" + path + "' not found");
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(f);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(path + ": " + e.what());
  }
  return run_config_from_json(j);
}

SyntheticProfileSpec synthetic_spec(const RunConfig& c) {
  SyntheticProfileSpec s;
  s.days = c.data_days;
  s.wind = c.wind;
  s.households = c.env.profiles;
  return s;
}

}  // namespace gridmarl::data
