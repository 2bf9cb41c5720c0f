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
#include <map>

#include "gridmarl/errors.hpp"
#include "gridmarl/forecast.hpp"

namespace gridmarl::forecast {

std::optional<double>& WindRecord::field(std::size_t k) {
  switch (k) {
    case 0: return wind_speed;
    case 1: return wind_direction;
    case 2: return temperature;
    case 3: return active_power;
    default: throw InvalidArgument("wind record: feature index out of range");
  }
}

const std::optional<double>& WindRecord::field(std::size_t k) const {
  return const_cast<WindRecord*>(this)->field(k);
}

bool WindRecord::complete() const {
  return wind_speed && wind_direction && temperature && active_power;
}

const std::array<std::string, kFeatureCount>& feature_names() {
  static const std::array<std::string, kFeatureCount> names{"wind_speed", "wind_direction",
                                                            "temperature", "active_power"};
  return names;
}

void check_ordering(const std::vector<WindRecord>& series) {
  for (std::size_t i = 1; i < series.size(); ++i) {
    if (series[i].timestamp <= series[i - 1].timestamp) {
      throw InvalidArgument("wind series: timestamps not strictly increasing at record " +
                            std::to_string(i));
    }
  }
}

std::vector<WindRecord> impute_missing(const std::vector<WindRecord>& series, std::size_t k) {
  if (k == 0) throw InvalidArgument("impute_missing: k must be positive");
  check_ordering(series);
  std::vector<WindRecord> out = series;
  for (std::size_t f = 0; f < kFeatureCount; ++f) {
    std::vector<std::size_t> have;
    for (std::size_t i = 0; i < series.size(); ++i) {
      if (series[i].field(f)) have.push_back(i);
    }
    if (have.size() == series.size()) continue;
    if (have.empty()) {
      throw InsufficientData("impute_missing: feature '" + feature_names()[f] + "' is entirely missing");
    }
    if (have.size() < k) {
      throw InsufficientData("impute_missing: feature '" + feature_names()[f] + "' has " +
                             std::to_string(have.size()) + " complete values, need " + std::to_string(k));
    }
    for (std::size_t i = 0; i < series.size(); ++i) {
      if (series[i].field(f)) continue;
      const std::int64_t t = series[i].timestamp;
      auto pos = std::lower_bound(have.begin(), have.end(), i) - have.begin();
      std::ptrdiff_t left = pos - 1;
      auto right = static_cast<std::size_t>(pos);
      double sum = 0.0;
      for (std::size_t taken = 0; taken < k; ++taken) {
        const bool can_left = left >= 0;
        const bool can_right = right < have.size();
        bool use_left = can_left;
        if (can_left && can_right) {
          const auto dl = t - series[have[static_cast<std::size_t>(left)]].timestamp;
          const auto dr = series[have[right]].timestamp - t;
          use_left = dl <= dr;
        }
        if (use_left) {
          sum += *series[have[static_cast<std::size_t>(left)]].field(f);
          --left;
        } else {
          sum += *series[have[right]].field(f);
          ++right;
        }
      }
      out[i].field(f) = sum / static_cast<double>(k);
    }
  }
  return out;
}

namespace {

std::int64_t floor_div(std::int64_t a, std::int64_t b) {
  std::int64_t q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

}  // namespace

std::vector<WindRecord> resample_hourly(const std::vector<WindRecord>& series) {
  check_ordering(series);
  if (series.empty()) return {};
  const std::int64_t first = floor_div(series.front().timestamp, 3600);
  const std::int64_t last = floor_div(series.back().timestamp, 3600);
  const auto hours = static_cast<std::size_t>(last - first + 1);
  std::vector<std::array<double, kFeatureCount>> sums(hours, {0, 0, 0, 0});
  std::vector<std::array<std::size_t, kFeatureCount>> counts(hours, {0, 0, 0, 0});
  for (const auto& r : series) {
    const auto h = static_cast<std::size_t>(floor_div(r.timestamp, 3600) - first);
    for (std::size_t f = 0; f < kFeatureCount; ++f) {
      if (r.field(f)) {
        sums[h][f] += *r.field(f);
        ++counts[h][f];
      }
    }
  }
  std::vector<WindRecord> out(hours);
  for (std::size_t h = 0; h < hours; ++h) {
    out[h].timestamp = (first + static_cast<std::int64_t>(h)) * 3600;
    for (std::size_t f = 0; f < kFeatureCount; ++f) {
      if (counts[h][f] > 0) out[h].field(f) = sums[h][f] / static_cast<double>(counts[h][f]);
    }
  }
  return out;
}

Matrix prepare_hourly(const std::vector<WindRecord>& raw, std::size_t k) {
  const auto hourly = impute_missing(resample_hourly(impute_missing(raw, k)), k);
  Matrix m(static_cast<Eigen::Index>(hourly.size()), static_cast<Eigen::Index>(kFeatureCount));
  for (std::size_t i = 0; i < hourly.size(); ++i) {
    for (std::size_t f = 0; f < kFeatureCount; ++f) {
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(f)) = *hourly[i].field(f);
    }
  }
  return m;
}

Scaler Scaler::fit(const Matrix& rows, ConstantFeaturePolicy policy) {
  if (rows.rows() == 0) throw InsufficientData("scaler: no rows to fit");
  Scaler s;
  for (Eigen::Index f = 0; f < rows.cols(); ++f) {
    const double mean = rows.col(f).mean();
    const double var = (rows.col(f).array() - mean).square().mean();
    double sd = std::sqrt(var);
    if (!(sd > 1e-12 * std::max(1.0, std::abs(mean)))) {
      if (policy == ConstantFeaturePolicy::reject) {
        throw InvalidArgument("scaler: feature " + std::to_string(f) + " is constant");
      }
      sd = 1.0;
    }
    s.mean.push_back(mean);
    s.std.push_back(sd);
  }
  return s;
}

Matrix Scaler::transform(const Matrix& rows) const {
  if (static_cast<std::size_t>(rows.cols()) != mean.size()) throw DimensionError("scaler: feature count mismatch");
  Matrix out(rows.rows(), rows.cols());
  for (Eigen::Index f = 0; f < rows.cols(); ++f) {
    const auto k = static_cast<std::size_t>(f);
    out.col(f) = (rows.col(f).array() - mean[k]) / std[k];
  }
  return out;
}

Matrix Scaler::inverse(const Matrix& rows) const {
  if (static_cast<std::size_t>(rows.cols()) != mean.size()) throw DimensionError("scaler: feature count mismatch");
  Matrix out(rows.rows(), rows.cols());
  for (Eigen::Index f = 0; f < rows.cols(); ++f) {
    const auto k = static_cast<std::size_t>(f);
    out.col(f) = rows.col(f).array() * std[k] + mean[k];
  }
  return out;
}

nlohmann::json Scaler::to_json() const { return {{"mean", mean}, {"std", std}}; }

Scaler Scaler::from_json(const nlohmann::json& j) {
  Scaler s;
  s.mean = j.at("mean").get<std::vector<double>>();
  s.std = j.at("std").get<std::vector<double>>();
  if (s.mean.size() != s.std.size()) throw ParseError("scaler: mean/std length mismatch");
  return s;
}

WindowSplit make_windows(const Matrix& series, std::size_t window_len, std::size_t horizon,
                         double split_fraction, std::size_t target_column) {
  if (window_len == 0 || horizon == 0) throw InvalidArgument("make_windows: window and horizon must be positive");
  if (!(split_fraction >= 0.0 && split_fraction <= 1.0)) {
    throw InvalidArgument("make_windows: split fraction must be in [0, 1]");
  }
  if (target_column >= static_cast<std::size_t>(series.cols())) {
    throw DimensionError("make_windows: target column out of range");
  }
  const auto len = static_cast<std::size_t>(series.rows());
  if (len < window_len + horizon) {
    throw InsufficientData("make_windows: series of length " + std::to_string(len) + " shorter than window + horizon (" +
                           std::to_string(window_len + horizon) + ")");
  }
  const std::size_t samples = len - window_len - horizon + 1;
  const auto n_train = static_cast<std::size_t>(std::floor(split_fraction * static_cast<double>(samples)));
  WindowSplit split;
  for (auto* d : {&split.train, &split.test}) {
    d->window_len = window_len;
    d->horizon = horizon;
  }
  split.train.targets.resize(static_cast<Eigen::Index>(n_train), static_cast<Eigen::Index>(horizon));
  split.test.targets.resize(static_cast<Eigen::Index>(samples - n_train), static_cast<Eigen::Index>(horizon));
  const auto W = static_cast<Eigen::Index>(window_len);
  const auto H = static_cast<Eigen::Index>(horizon);
  const auto tc = static_cast<Eigen::Index>(target_column);
  for (std::size_t s = 0; s < samples; ++s) {
    const auto si = static_cast<Eigen::Index>(s);
    auto& d = s < n_train ? split.train : split.test;
    const auto row = static_cast<Eigen::Index>(s < n_train ? s : s - n_train);
    d.inputs.push_back(series.middleRows(si, W));
    d.targets.row(row) = series.block(si + W, tc, H, 1).transpose();
  }
  return split;
}

Matrix persistence_forecast(const WindowedDataset& data, std::size_t target_column) {
  if (data.horizon > data.window_len) throw InvalidArgument("persistence: horizon exceeds window");
  const auto H = static_cast<Eigen::Index>(data.horizon);
  Matrix out(static_cast<Eigen::Index>(data.size()), H);
  for (std::size_t s = 0; s < data.size(); ++s) {
    const auto& w = data.inputs[s];
    out.row(static_cast<Eigen::Index>(s)) =
        w.block(w.rows() - H, static_cast<Eigen::Index>(target_column), H, 1).transpose();
  }
  return out;
}

}  // namespace gridmarl::forecast
