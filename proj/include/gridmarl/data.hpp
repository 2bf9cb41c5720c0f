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
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "gridmarl/env.hpp"
#include "gridmarl/forecast.hpp"

namespace gridmarl::data {

// Hub-height wind speed: daily sinusoid plus AR(1) noise, sampled every
// 10 minutes and passed through a piecewise turbine power curve.
struct WindModelSpec {
  std::int64_t start_timestamp = 1577836800;  // 2020-01-01T00:00:00Z
  double mean_speed = 8.5;        // m/s
  double diurnal_amplitude = 2.5;  // m/s
  double diurnal_peak_hour = 15.0;
  double ar_coefficient = 0.98;   // per 10-minute step
  double noise_std = 0.4;         // innovation std, m/s
  double cut_in = 3.0;
  double rated_speed = 12.0;
  double cut_out = 25.0;
  double rated_power = 50.0;  // MW
  double direction_mean = 200.0;
  double direction_noise = 15.0;
  double temperature_mean = 12.0;
  double temperature_amplitude = 6.0;
  double temperature_noise = 0.5;

  void validate() const;
};

nlohmann::json to_json(const WindModelSpec& s);
WindModelSpec wind_model_from_json(const nlohmann::json& j);

struct SyntheticProfileSpec {
  std::size_t days = 120;
  WindModelSpec wind;
  env::ProfileSpec households;
};

nlohmann::json to_json(const SyntheticProfileSpec& s);
SyntheticProfileSpec synthetic_spec_from_json(const nlohmann::json& j);

inline constexpr std::int64_t kRecordSpacing = 600;  // seconds

double power_curve(const WindModelSpec& s, double speed);

std::vector<forecast::WindRecord> synthesize_wind(const SyntheticProfileSpec& spec, std::uint64_t seed);

// Columns: timestamp,wind_speed,wind_direction,temperature,active_power.
// Timestamps are ISO-8601 UTC (YYYY-MM-DDTHH:MM:SSZ) or integer Unix seconds;
// an empty field marks a missing value.
void write_wind_csv(const std::string& path, const std::vector<forecast::WindRecord>& records);
// Active power is multiplied by `scale` and clipped to [0, p_max] when a
// scale is given.
std::vector<forecast::WindRecord> load_wind_csv(const std::string& path, std::optional<double> scale = std::nullopt,
                                                double p_max = 50.0);
// Factor that maps the largest observed active power onto p_max.
double scale_to_capacity(const std::vector<forecast::WindRecord>& records, double p_max);

std::string format_timestamp(std::int64_t unix_seconds);
std::int64_t parse_timestamp(const std::string& s);

struct RunManifest {
  std::string command;
  std::string artifact_version;
  std::string config_hash;
  std::uint64_t seed = 0;
  std::string started_at;
  std::string finished_at;
  std::vector<std::string> artifacts;  // paths relative to the run directory
  nlohmann::json inputs = nlohmann::json::object();  // name -> path of each input file
  nlohmann::json metrics = nlohmann::json::object();
  nlohmann::json config;

  nlohmann::json to_json() const;
  static RunManifest from_json(const nlohmann::json& j);
};

std::string config_hash(const nlohmann::json& config);
// fnv1a64 of the file bytes, as 16 hex digits.
std::string file_hash(const std::string& path);
std::string utc_now();
void write_manifest(const std::string& run_dir, const RunManifest& m);
RunManifest read_manifest(const std::string& run_dir);

}  // namespace gridmarl::data
