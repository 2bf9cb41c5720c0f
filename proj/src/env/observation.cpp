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

#include "gridmarl/env.hpp"
#include "gridmarl/errors.hpp"

namespace gridmarl::env {

ObservationNormalizer::ObservationNormalizer(std::size_t dim, double floor)
    : floor_(floor), mean_(dim, 0.0), m2_(dim, 0.0) {
  if (!(floor > 0.0)) throw InvalidArgument("ObservationNormalizer: floor must be positive");
}

std::vector<double> ObservationNormalizer::apply(const std::vector<double>& obs) const {
  if (obs.size() != mean_.size()) {
    throw DimensionError("ObservationNormalizer: expected " + std::to_string(mean_.size()) + " features, got " +
                         std::to_string(obs.size()));
  }
  if (count_ == 0) return obs;
  std::vector<double> out(obs.size());
  const double n = static_cast<double>(count_);
  for (std::size_t k = 0; k < obs.size(); ++k) out[k] = (obs[k] - mean_[k]) / std::sqrt(m2_[k] / n + floor_);
  return out;
}

std::vector<double> ObservationNormalizer::normalize(const std::vector<double>& obs, bool update) {
  std::vector<double> out = apply(obs);
  if (update) {
    ++count_;
    const double n = static_cast<double>(count_);
    for (std::size_t k = 0; k < obs.size(); ++k) {
      const double delta = obs[k] - mean_[k];
      mean_[k] += delta / n;
      m2_[k] += delta * (obs[k] - mean_[k]);
    }
  }
  return out;
}

std::vector<double> ObservationNormalizer::variance() const {
  std::vector<double> v(m2_.size(), 0.0);
  if (count_ == 0) return v;
  for (std::size_t k = 0; k < v.size(); ++k) v[k] = std::max(0.0, m2_[k] / static_cast<double>(count_));
  return v;
}

nlohmann::json ObservationNormalizer::to_json() const {
  return {{"floor", floor_}, {"count", count_}, {"mean", mean_}, {"m2", m2_}};
}

ObservationNormalizer ObservationNormalizer::from_json(const nlohmann::json& j) {
  try {
    ObservationNormalizer n(j.at("mean").size(), j.at("floor").get<double>());
    n.count_ = j.at("count").get<std::uint64_t>();
    n.mean_ = j.at("mean").get<std::vector<double>>();
    n.m2_ = j.at("m2").get<std::vector<double>>();
    if (n.m2_.size() != n.mean_.size()) throw ParseError("normalizer: mean/m2 size mismatch");
    return n;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("normalizer: ") + e.what());
  }
}

std::vector<double> padded_history(const std::vector<double>& history, std::size_t depth) {
  if (history.empty()) throw StateError("padded_history: no observed value yet");
  const std::size_t len = depth + 1;
  std::vector<double> out(len, history.front());
  const std::size_t take = std::min(len, history.size());
  std::copy(history.end() - static_cast<std::ptrdiff_t>(take), history.end(),
            out.end() - static_cast<std::ptrdiff_t>(take));
  return out;
}

std::vector<double> build_pa_observation(double d, double g, double soc, const std::vector<double>& sell_history,
                                         const std::vector<double>& buy_history, std::size_t depth,
                                         std::optional<double> weather_label) {
  std::vector<double> obs{d, g, soc};
  obs.reserve(3 + 2 * (depth + 1) + 1);
  const auto s = padded_history(sell_history, depth);
  const auto b = padded_history(buy_history, depth);
  obs.insert(obs.end(), s.begin(), s.end());
  obs.insert(obs.end(), b.begin(), b.end());
  if (weather_label) obs.push_back(*weather_label);
  return obs;
}

std::vector<double> build_lsa_observation(const std::vector<double>& wind_forecast,
                                          const std::vector<double>& da_history,
                                          const std::vector<double>& rt_history, std::size_t depth, double l_da,
                                          double l_rt, double e_bought) {
  if (wind_forecast.empty()) {
    throw StateError("LSA observation needs the wind forecast for the current hour; issue it with predict_day_ahead");
  }
  if (wind_forecast.size() != 24) {
    throw DimensionError("LSA observation: wind forecast must hold 24 hourly values");
  }
  std::vector<double> obs(wind_forecast);
  obs.reserve(24 + 2 * (depth + 1) + 3);
  const auto da = padded_history(da_history, depth);
  const auto rt = padded_history(rt_history, depth);
  obs.insert(obs.end(), da.begin(), da.end());
  obs.insert(obs.end(), rt.begin(), rt.end());
  obs.push_back(l_da);
  obs.push_back(l_rt);
  obs.push_back(e_bought);
  return obs;
}

double pa_reward(double e, const retail::PriceSignal& price, double dt, double scale) {
  return -retail::bill_increment(e, price, dt) / scale;
}

double lsa_reward(double sales_kw, double retail_price, double buyback_kw, double buyback_price,
                  double procured_kw, double rho, double dt, double scale) {
  return (sales_kw * retail_price - buyback_kw * buyback_price - procured_kw * rho) * dt / scale;
}

double energy_bought(const std::vector<double>& user_loads) {
  double s = 0.0;
  for (double e : user_loads) {
    if (e < 0.0) s -= e;
  }
  return s;
}

WindCalendar::WindCalendar(Matrix hourly, std::size_t lookback, std::size_t first_hour, double p_max)
    : hourly_(std::move(hourly)), lookback_(std::max<std::size_t>(lookback, 24)), p_max_(p_max) {
  if (hourly_.cols() != static_cast<Eigen::Index>(forecast::kFeatureCount)) {
    throw DimensionError("WindCalendar: hourly data needs " + std::to_string(forecast::kFeatureCount) + " columns");
  }
  first_ = std::max(first_hour, lookback_);
  const auto rows = static_cast<std::size_t>(hourly_.rows());
  days_ = rows > first_ ? (rows - first_) / 24 : 0;
  if (days_ == 0) {
    throw InsufficientData("WindCalendar: " + std::to_string(rows) + " hours leave no full day after " +
                           std::to_string(first_) + " hours of history");
  }
}

std::size_t WindCalendar::day_start(std::int64_t day) const {
  const auto n = static_cast<std::int64_t>(days_);
  const std::int64_t k = ((day % n) + n) % n;
  return first_ + 24 * static_cast<std::size_t>(k);
}

std::vector<double> WindCalendar::actual(std::int64_t day) const {
  const std::size_t s = day_start(day);
  std::vector<double> out(24);
  for (std::size_t h = 0; h < 24; ++h) {
    out[h] = std::clamp(hourly_(static_cast<Eigen::Index>(s + h), forecast::kPowerFeature), 0.0, p_max_);
  }
  return out;
}

Matrix WindCalendar::history(std::int64_t day, std::size_t hour, std::size_t window) const {
  if (window > lookback_) throw InvalidArgument("WindCalendar: window exceeds the configured lookback");
  const std::size_t end = day_start(day) + hour;
  return hourly_.block(static_cast<Eigen::Index>(end - window), 0, static_cast<Eigen::Index>(window),
                       hourly_.cols());
}

std::vector<double> WindCalendar::last_24h(std::int64_t day, std::size_t hour) const {
  const std::size_t end = day_start(day) + hour;
  std::vector<double> out(24);
  for (std::size_t k = 0; k < 24; ++k) {
    out[k] = std::clamp(hourly_(static_cast<Eigen::Index>(end - 24 + k), forecast::kPowerFeature), 0.0, p_max_);
  }
  return out;
}

std::string to_string(ForecastMode m) {
  switch (m) {
    case ForecastMode::lstm: return "lstm";
    case ForecastMode::band: return "band";
    case ForecastMode::perfect: return "perfect";
  }
  return "lstm";
}

ForecastMode forecast_mode_from_string(const std::string& s) {
  if (s == "lstm") return ForecastMode::lstm;
  if (s == "band") return ForecastMode::band;
  if (s == "perfect") return ForecastMode::perfect;
  throw ConfigError("unknown forecast mode '" + s + "' (expected lstm, band or perfect)");
}

const double* DayForecasts::at_hour(std::size_t h) const {
  if (h >= static_cast<std::size_t>(issued.rows())) throw InvalidArgument("DayForecasts: hour out of range");
  return issued.data() + static_cast<Eigen::Index>(h) * issued.cols();
}

std::vector<double> DayForecasts::row(std::size_t h) const {
  const double* p = at_hour(h);
  return std::vector<double>(p, p + issued.cols());
}

DayForecasts make_day_forecasts(const WindCalendar& wind, std::int64_t day, ForecastMode mode,
                                const forecast::Forecaster* forecaster, double band_margin) {
  DayForecasts f;
  f.actual = wind.actual(day);
  f.issued = Matrix::Zero(24, 24);
  switch (mode) {
    case ForecastMode::lstm: {
      if (forecaster == nullptr) throw StateError("LSTM forecast mode needs a trained forecaster");
      const std::size_t w = forecaster->config().window_len;
      if (forecaster->config().horizon != 24) throw ConfigError("forecaster horizon must be 24 hours");
      std::vector<Matrix> histories;
      histories.reserve(24);
      for (std::size_t h = 0; h < 24; ++h) histories.push_back(wind.history(day, h, w));
      f.issued = forecaster->predict_many(histories);
      break;
    }
    case ForecastMode::band:
      for (std::size_t h = 0; h < 24; ++h) {
        const auto band = forecast::uncertainty_band_forecast(wind.last_24h(day, h), band_margin);
        for (std::size_t k = 0; k < 24; ++k) {
          f.issued(static_cast<Eigen::Index>(h), static_cast<Eigen::Index>(k)) = band.point[k];
        }
      }
      break;
    case ForecastMode::perfect: {
      const auto next = wind.actual(day + 1);
      for (std::size_t h = 0; h < 24; ++h) {
        for (std::size_t k = 0; k < 24; ++k) {
          const std::size_t at = h + k;
          f.issued(static_cast<Eigen::Index>(h), static_cast<Eigen::Index>(k)) =
              at < 24 ? f.actual[at] : next[at - 24];
        }
      }
      break;
    }
  }
  return f;
}

ExogenousSource::ExogenousSource(EnvConfig config, WindCalendar wind, std::uint64_t seed, ForecastMode mode,
                                 std::shared_ptr<const forecast::Forecaster> forecaster)
    : config_(std::move(config)), wind_(std::move(wind)), seed_(seed), mode_(mode),
      forecaster_(std::move(forecaster)) {
  config_.validate();
  if (mode_ == ForecastMode::lstm && !forecaster_) {
    throw StateError("LSTM forecast mode needs a trained forecaster");
  }
}

std::int64_t ExogenousSource::wind_day(std::int64_t d) const {
  const auto n = static_cast<std::int64_t>(wind_.days());
  return ((d % n) + n) % n;
}

const Exogenous& ExogenousSource::day(std::int64_t d) const {
  auto it = cache_.find(d);
  if (it != cache_.end()) return it->second;
  const std::int64_t wd = wind_day(d);
  auto fit = forecast_cache_.find(wd);
  if (fit == forecast_cache_.end()) {
    fit = forecast_cache_
              .emplace(wd, make_day_forecasts(wind_, wd, mode_, forecaster_.get(), config_.band_margin))
              .first;
  }
  Exogenous e;
  e.profile = make_day_profile(config_.profiles, seed_, d, config_.steps);
  e.forecasts = fit->second;
  e.wind_actual = fit->second.actual;
  return cache_.emplace(d, std::move(e)).first->second;
}

}  // namespace gridmarl::env
