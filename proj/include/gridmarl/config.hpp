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


#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "gridmarl/data.hpp"
#include "gridmarl/env.hpp"
#include "gridmarl/forecast.hpp"
#include "gridmarl/scenarios.hpp"

namespace gridmarl::data {

inline constexpr int kConfigVersion = 1;

// Everything a CLI run depends on besides its input files and seed.
struct RunConfig {
  int version = kConfigVersion;
  std::string preset = "default";
  std::uint64_t seed = 1;
  std::size_t data_days = 120;
  WindModelSpec wind;
  std::size_t impute_k = 5;
  double train_fraction = 0.8;
  forecast::ForecasterConfig forecaster;
  env::EnvConfig env;
  env::TrainingConfig training;
  scenarios::ScenarioSettings scenarios;
  std::vector<std::string> compare = {"fixed", "tou_a", "tou_b", "dynamic", "dynamic_band"};

  void validate() const;
};

// "default" follows the reference hyperparameters; "test" shrinks networks,
// data and episode counts so the full pipeline runs in minutes.
RunConfig preset_config(const std::string& name);
const std::vector<std::string>& preset_names();

nlohmann::json to_json(const RunConfig& c);

// The document is laid over its preset (key "preset", default "default").
// Unknown keys at any depth and a version other than kConfigVersion are
// rejected.
RunConfig run_config_from_json(const nlohmann::json& j);
RunConfig load_run_config(const std::string& path);

SyntheticProfileSpec synthetic_spec(const RunConfig& c);

}  // namespace gridmarl::data
