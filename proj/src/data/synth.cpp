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


#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "gridmarl/data.hpp"
#include "gridmarl/errors.hpp"

namespace gridmarl::data {

void WindModelSpec::validate() const {
  if (!(mean_speed >= 0.0 && diurnal_amplitude >= 0.0 && noise_std >= 0.0)) {
    throw ConfigError("wind model: speeds and noise must be >= 0");
  }
  if (!(ar_coefficient >= 0.0 && ar_coefficient < 1.0)) throw ConfigError("wind model: ar_coefficient outside [0, 1)");
  if (!(cut_in >= 0.0 && cut_in < rated_speed && rated_speed < cut_out)) {
    throw ConfigError("wind model: need cut_in < rated_speed < cut_out");
  }
  if (!(rated_power > 0.0)) throw ConfigError("wind model: rated_power must be positive");
  if (!(direction_noise >= 0.0 && temperature_noise >= 0.0)) throw ConfigError("wind model: noise must be >= 0");
}

nlohmann::json to_json(const WindModelSpec& s) {
  return {{"start_timestamp", s.start_timestamp},
          {"mean_speed", s.mean_speed},
          {"diurnal_amplitude", s.diurnal_amplitude},
          {"diurnal_peak_hour", s.diurnal_peak_hour},
          {"ar_coefficient", s.ar_coefficient},
          {"noise_std", s.noise_std},
          {"cut_in", s.cut_in},
          {"rated_speed", s.rated_speed},
          {"cut_out", s.cut_out},
          {"rated_power", s.rated_power},
          {"direction_mean", s.direction_mean},
          {"direction_noise", s.direction_noise},
          {"temperature_mean", s.temperature_mean},
          {"temperature_amplitude", s.temperature_amplitude},
          {"temperature_noise", s.temperature_noise}};
}

WindModelSpec wind_model_from_json(const nlohmann::json& j) {
  WindModelSpec s;
  try {
#define GM_FIELD(name) s.name = j.value(#name, s.name)
    GM_FIELD(start_timestamp);
    GM_FIELD(mean_speed);
    GM_FIELD(diurnal_amplitude);
    GM_FIELD(diurnal_peak_hour);
    GM_FIELD(ar_coefficient);
    GM_FIELD(noise_std);
    GM_FIELD(cut_in);
    GM_FIELD(rated_speed);
    GM_FIELD(cut_out);
    GM_FIELD(rated_power);
    GM_FIELD(direction_mean);
    GM_FIELD(direction_noise);
    GM_FIELD(temperature_mean);
    GM_FIELD(temperature_amplitude);
    GM_FIELD(temperature_noise);
#undef GM_FIELD
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("wind model: ") + e.what());
  }
  s.validate();
  return s;
}

nlohmann::json to_json(const SyntheticProfileSpec& s) {
  return {{"days", s.days}, {"wind", to_json(s.wind)}, {"households", env::to_json(s.households)}};
}

SyntheticProfileSpec synthetic_spec_from_json(const nlohmann::json& j) {
  SyntheticProfileSpec s;
  try {
    s.days = j.value("days", s.days);
    if (j.contains("wind")) s.wind = wind_model_from_json(j.at("wind"));
    if (j.contains("households")) s.households = env::profile_spec_from_json(j.at("households"));
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("synthetic spec: ") + e.what());
  }
  if (s.days == 0) throw ConfigError("synthetic spec: days must be >= 1");
  return s;
}

double power_curve(const WindModelSpec& s, double v) {
  if (v < s.cut_in || v >= s.cut_out) return 0.0;
  if (v >= s.rated_speed) return s.rated_power;
  const double lo = s.cut_in * s.cut_in * s.cut_in;
  const double hi = s.rated_speed * s.rated_speed * s.rated_speed;
  return s.rated_power * (v * v * v - lo) / (hi - lo);
}

std::vector<forecast::WindRecord> synthesize_wind(const SyntheticProfileSpec& spec, std::uint64_t seed) {
  if (spec.days == 0) throw InvalidArgument("synthesize_wind: day count must be >= 1");
  const WindModelSpec& w = spec.wind;
  w.validate();
  Rng rng = make_stream(seed, "data");
  std::normal_distribution<double> gauss(0.0, 1.0);
  const std::size_t n = spec.days * 24 * 6;
  const double phi = w.ar_coefficient;
  double ar = w.noise_std / std::sqrt(1.0 - phi * phi) * gauss(rng);
  std::vector<forecast::WindRecord> out;
  out.reserve(n);
  for (std::size_t k = 0; k < n; ++k) {
    if (k > 0) ar = phi * ar + w.noise_std * gauss(rng);
    const double hour = std::fmod(static_cast<double>(k) / 6.0, 24.0);
    const double phase = 2.0 * std::numbers::pi / 24.0;
    const double speed =
        std::max(0.0, w.mean_speed + w.diurnal_amplitude * std::cos(phase * (hour - w.diurnal_peak_hour)) + ar);
    double dir = std::fmod(w.direction_mean + w.direction_noise * gauss(rng), 360.0);
    if (dir < 0.0) dir += 360.0;
    const double temp =
        w.temperature_mean + w.temperature_amplitude * std::cos(phase * (hour - 15.0)) + w.temperature_noise * gauss(rng);
    forecast::WindRecord r;
    r.timestamp = w.start_timestamp + static_cast<std::int64_t>(k) * kRecordSpacing;
    r.wind_speed = speed;
    r.wind_direction = dir;
    r.temperature = temp;
    r.active_power = std::clamp(power_curve(w, speed), 0.0, w.rated_power);
    out.push_back(r);
  }
  return out;
}

}  // namespace gridmarl::data
