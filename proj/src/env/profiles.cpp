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
#include <string>

#include "gridmarl/env.hpp"
#include "gridmarl/errors.hpp"

namespace gridmarl::env {

namespace {

double bump(double h, double center, double width) {
  const double z = (h - center) / width;
  return std::exp(-0.5 * z * z);
}

std::string day_key(std::int64_t day) { return "day/" + std::to_string(day); }

}  // namespace

void ProfileSpec::validate() const {
  if (prosumers == 0) throw ConfigError("profiles: need at least one prosumer");
  const double vals[] = {consumer_base_kw, consumer_morning_kw, consumer_evening_kw, prosumer_base_kw,
                         prosumer_morning_kw, prosumer_evening_kw, peak_jitter, scale_jitter, household_spread,
                         noise, pv_max_kw, cloud_noise};
  for (double v : vals) {
    if (!(v >= 0.0) || !std::isfinite(v)) throw ConfigError("profiles: magnitudes must be finite and >= 0");
  }
  if (!(morning_width > 0.0 && evening_width > 0.0)) throw ConfigError("profiles: peak widths must be positive");
  if (!(scale_jitter < 1.0 && household_spread < 1.0)) throw ConfigError("profiles: jitter must be < 1");
  if (!(pv_size_min >= 0.0 && pv_size_min <= pv_size_max && pv_size_max <= 1.0)) {
    throw ConfigError("profiles: need 0 <= pv_size_min <= pv_size_max <= 1");
  }
  if (!(sunrise >= 0.0 && sunrise < sunset && sunset <= 24.0)) throw ConfigError("profiles: need sunrise < sunset");
  if (!(cloudy_scale >= 0.0 && cloudy_scale <= 1.0)) throw ConfigError("profiles: cloudy_scale outside [0, 1]");
  if (!(p_sunny >= 0.0 && p_sunny <= 1.0)) throw ConfigError("profiles: p_sunny outside [0, 1]");
}

nlohmann::json to_json(const ProfileSpec& s) {
  return {{"prosumers", s.prosumers},
          {"consumers", s.consumers},
          {"consumer_base_kw", s.consumer_base_kw},
          {"consumer_morning_kw", s.consumer_morning_kw},
          {"consumer_evening_kw", s.consumer_evening_kw},
          {"prosumer_base_kw", s.prosumer_base_kw},
          {"prosumer_morning_kw", s.prosumer_morning_kw},
          {"prosumer_evening_kw", s.prosumer_evening_kw},
          {"morning_hour", s.morning_hour},
          {"evening_hour", s.evening_hour},
          {"morning_width", s.morning_width},
          {"evening_width", s.evening_width},
          {"peak_jitter", s.peak_jitter},
          {"scale_jitter", s.scale_jitter},
          {"household_spread", s.household_spread},
          {"noise", s.noise},
          {"pv_max_kw", s.pv_max_kw},
          {"pv_size_min", s.pv_size_min},
          {"pv_size_max", s.pv_size_max},
          {"sunrise", s.sunrise},
          {"sunset", s.sunset},
          {"cloudy_scale", s.cloudy_scale},
          {"p_sunny", s.p_sunny},
          {"cloud_noise", s.cloud_noise}};
}

ProfileSpec profile_spec_from_json(const nlohmann::json& j) {
  ProfileSpec s;
  try {
#define GM_FIELD(name) s.name = j.value(#name, s.name)
    GM_FIELD(prosumers);
    GM_FIELD(consumers);
    GM_FIELD(consumer_base_kw);
    GM_FIELD(consumer_morning_kw);
    GM_FIELD(consumer_evening_kw);
    GM_FIELD(prosumer_base_kw);
    GM_FIELD(prosumer_morning_kw);
    GM_FIELD(prosumer_evening_kw);
    GM_FIELD(morning_hour);
    GM_FIELD(evening_hour);
    GM_FIELD(morning_width);
    GM_FIELD(evening_width);
    GM_FIELD(peak_jitter);
    GM_FIELD(scale_jitter);
    GM_FIELD(household_spread);
    GM_FIELD(noise);
    GM_FIELD(pv_max_kw);
    GM_FIELD(pv_size_min);
    GM_FIELD(pv_size_max);
    GM_FIELD(sunrise);
    GM_FIELD(sunset);
    GM_FIELD(cloudy_scale);
    GM_FIELD(p_sunny);
    GM_FIELD(cloud_noise);
#undef GM_FIELD
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("profiles: ") + e.what());
  }
  s.validate();
  return s;
}

bool day_is_sunny(const ProfileSpec& spec, std::uint64_t seed, std::int64_t day) {
  Rng rng = make_stream(derive_seed(seed, "weather"), day_key(day));
  return std::bernoulli_distribution(spec.p_sunny)(rng);
}

DayProfile make_day_profile(const ProfileSpec& spec, std::uint64_t seed, std::int64_t day, std::size_t steps) {
  if (steps == 0) throw InvalidArgument("make_day_profile: steps must be positive");
  const std::size_t np = spec.prosumers;
  const std::size_t nc = spec.consumers;
  const std::size_t nu = np + nc;

  // Per-household constants: demand scale and PV size.
  Rng fixed = make_stream(seed, "households");
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  std::vector<double> household_scale(nu);
  for (auto& v : household_scale) v = 1.0 + spec.household_spread * unit(fixed);
  std::vector<double> pv_size(np);
  std::uniform_real_distribution<double> size_dist(spec.pv_size_min, spec.pv_size_max);
  for (auto& v : pv_size) v = spec.pv_max_kw * size_dist(fixed);

  DayProfile p;
  p.day = day;
  p.sunny = day_is_sunny(spec, seed, day);
  p.prosumer_demand = Matrix::Zero(static_cast<Eigen::Index>(np), static_cast<Eigen::Index>(steps));
  p.consumer_demand = Matrix::Zero(static_cast<Eigen::Index>(nc), static_cast<Eigen::Index>(steps));
  p.pv = Matrix::Zero(static_cast<Eigen::Index>(np), static_cast<Eigen::Index>(steps));

  Rng rng = make_stream(derive_seed(seed, "profiles"), day_key(day));
  std::normal_distribution<double> gauss(0.0, 1.0);
  const double step_h = 24.0 / static_cast<double>(steps);

  for (std::size_t u = 0; u < nu; ++u) {
    const bool prosumer = u < np;
    const double base = prosumer ? spec.prosumer_base_kw : spec.consumer_base_kw;
    const double morning = prosumer ? spec.prosumer_morning_kw : spec.consumer_morning_kw;
    const double evening = prosumer ? spec.prosumer_evening_kw : spec.consumer_evening_kw;
    const double m_at = spec.morning_hour + spec.peak_jitter * unit(rng);
    const double e_at = spec.evening_hour + spec.peak_jitter * unit(rng);
    const double scale = household_scale[u] * (1.0 + spec.scale_jitter * unit(rng));
    for (std::size_t t = 0; t < steps; ++t) {
      const double h = (static_cast<double>(t) + 0.5) * step_h;
      double d = base + morning * bump(h, m_at, spec.morning_width) + evening * bump(h, e_at, spec.evening_width);
      d *= scale * std::max(0.0, 1.0 + spec.noise * gauss(rng));
      if (prosumer) {
        p.prosumer_demand(static_cast<Eigen::Index>(u), static_cast<Eigen::Index>(t)) = d;
      } else {
        p.consumer_demand(static_cast<Eigen::Index>(u - np), static_cast<Eigen::Index>(t)) = d;
      }
    }
  }

  const double weather = p.sunny ? 1.0 : spec.cloudy_scale;
  for (std::size_t i = 0; i < np; ++i) {
    for (std::size_t t = 0; t < steps; ++t) {
      const double h = (static_cast<double>(t) + 0.5) * step_h;
      const double x = (h - spec.sunrise) / (spec.sunset - spec.sunrise);
      const double shape = (x > 0.0 && x < 1.0) ? std::sin(std::numbers::pi * x) : 0.0;
      double g = pv_size[i] * weather * shape * std::max(0.0, 1.0 + spec.cloud_noise * gauss(rng));
      g = std::clamp(g, 0.0, spec.pv_max_kw);
      p.pv(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(t)) = g;
    }
  }
  return p;
}

std::vector<double> idle_net_load(const DayProfile& p) {
  const auto steps = p.prosumer_demand.cols();
  std::vector<double> out(static_cast<std::size_t>(steps), 0.0);
  for (Eigen::Index t = 0; t < steps; ++t) {
    double s = 0.0;
    for (Eigen::Index i = 0; i < p.prosumer_demand.rows(); ++i) s += p.prosumer_demand(i, t) - p.pv(i, t);
    for (Eigen::Index c = 0; c < p.consumer_demand.rows(); ++c) s += p.consumer_demand(c, t);
    out[static_cast<std::size_t>(t)] = s;
  }
  return out;
}

void EnvConfig::validate() const {
  if (steps == 0) throw ConfigError("env: steps must be positive");
  if (!(dt > 0.0)) throw ConfigError("env: dt must be positive");
  if (std::abs(dt * static_cast<double>(steps) - 24.0) > 1e-9) throw ConfigError("env: steps * dt must equal 24 h");
  if (pa_history == 0 || lmp_history == 0) throw ConfigError("env: history depths must be positive");
  if (!(price_min >= 0.0 && price_min < price_max)) throw ConfigError("env: need 0 <= price_min < price_max");
  if (!(lda_noise >= 0.0)) throw ConfigError("env: lda_noise must be >= 0");
  if (!(lsa_reward_scale > 0.0 && pa_reward_scale > 0.0)) throw ConfigError("env: reward scales must be positive");
  if (!(mw_per_model_kw > 0.0)) throw ConfigError("env: mw_per_model_kw must be positive");
  if (!(band_margin >= 0.0 && band_margin < 1.0)) throw ConfigError("env: band_margin outside [0, 1)");
  if (!(normalizer_floor > 0.0)) throw ConfigError("env: normalizer_floor must be positive");
  battery.validate();
  profiles.validate();
  market.validate();
}

nlohmann::json to_json(const EnvConfig& c) {
  return {{"steps", c.steps},
          {"dt_hours", c.dt},
          {"pa_history", c.pa_history},
          {"lmp_history", c.lmp_history},
          {"price_min", c.price_min},
          {"price_max", c.price_max},
          {"net_metering", c.net_metering},
          {"lda_noise", c.lda_noise},
          {"lsa_reward_scale", c.lsa_reward_scale},
          {"pa_reward_scale", c.pa_reward_scale},
          {"infeasible_penalty", c.infeasible_penalty},
          {"mw_per_model_kw", c.mw_per_model_kw},
          {"band_margin", c.band_margin},
          {"observe_weather_label", c.observe_weather_label},
          {"normalizer_floor", c.normalizer_floor},
          {"battery", retail::to_json(c.battery)},
          {"profiles", to_json(c.profiles)},
          {"market", market::to_json(c.market)}};
}

EnvConfig env_config_from_json(const nlohmann::json& j) {
  EnvConfig c;
  try {
    c.steps = j.value("steps", c.steps);
    c.dt = j.value("dt_hours", c.dt);
    c.pa_history = j.value("pa_history", c.pa_history);
    c.lmp_history = j.value("lmp_history", c.lmp_history);
    c.price_min = j.value("price_min", c.price_min);
    c.price_max = j.value("price_max", c.price_max);
    c.net_metering = j.value("net_metering", c.net_metering);
    c.lda_noise = j.value("lda_noise", c.lda_noise);
    c.lsa_reward_scale = j.value("lsa_reward_scale", c.lsa_reward_scale);
    c.pa_reward_scale = j.value("pa_reward_scale", c.pa_reward_scale);
    c.infeasible_penalty = j.value("infeasible_penalty", c.infeasible_penalty);
    c.mw_per_model_kw = j.value("mw_per_model_kw", c.mw_per_model_kw);
    c.band_margin = j.value("band_margin", c.band_margin);
    c.observe_weather_label = j.value("observe_weather_label", c.observe_weather_label);
    c.normalizer_floor = j.value("normalizer_floor", c.normalizer_floor);
    if (j.contains("battery")) c.battery = retail::battery_spec_from_json(j.at("battery"));
    if (j.contains("profiles")) c.profiles = profile_spec_from_json(j.at("profiles"));
    if (j.contains("market")) c.market = market::market_spec_from_json(j.at("market"));
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("env config: ") + e.what());
  }
  c.validate();
  return c;
}

}  // namespace gridmarl::env
