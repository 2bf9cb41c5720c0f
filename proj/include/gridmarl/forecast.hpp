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

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "gridmarl/nn.hpp"

namespace gridmarl::forecast {

using nn::Matrix;

inline constexpr std::size_t kFeatureCount = 4;
inline constexpr std::size_t kPowerFeature = 3;

// Seconds since the Unix epoch, UTC. Any field may be missing.
struct WindRecord {
  std::int64_t timestamp = 0;
  std::optional<double> wind_speed;
  std::optional<double> wind_direction;
  std::optional<double> temperature;
  std::optional<double> active_power;

  std::optional<double>& field(std::size_t k);
  const std::optional<double>& field(std::size_t k) const;
  bool complete() const;

  bool operator==(const WindRecord&) const = default;
};

const std::array<std::string, kFeatureCount>& feature_names();

// Fills each missing value with the mean of the k temporally nearest
// complete values of the same feature. Ties prefer the earlier record.
std::vector<WindRecord> impute_missing(const std::vector<WindRecord>& series, std::size_t k);

// Hourly means on UTC hour boundaries. Hours without any value stay missing.
std::vector<WindRecord> resample_hourly(const std::vector<WindRecord>& series);

// Impute, resample to hourly, impute again; rows are hours, columns features.
Matrix prepare_hourly(const std::vector<WindRecord>& raw, std::size_t k);

// Rejects non-increasing timestamps.
void check_ordering(const std::vector<WindRecord>& series);

enum class ConstantFeaturePolicy { reject, center_only };

struct Scaler {
  std::vector<double> mean;
  std::vector<double> std;

  static Scaler fit(const Matrix& rows, ConstantFeaturePolicy policy = ConstantFeaturePolicy::reject);
  Matrix transform(const Matrix& rows) const;
  Matrix inverse(const Matrix& rows) const;

  nlohmann::json to_json() const;
  static Scaler from_json(const nlohmann::json& j);
};

// Raw-unit samples; inputs[s] is window_len x features.
struct WindowedDataset {
  std::vector<Matrix> inputs;
  Matrix targets;  // samples x horizon
  std::size_t window_len = 0;
  std::size_t horizon = 0;

  std::size_t size() const { return inputs.size(); }
};

struct WindowSplit {
  WindowedDataset train;
  WindowedDataset test;
};

// Targets are future values of `target_column`. The first floor(split*S)
// samples go to train.
WindowSplit make_windows(const Matrix& series, std::size_t window_len, std::size_t horizon,
                         double split_fraction, std::size_t target_column = kPowerFeature);

struct Metrics {
  double rmse = 0.0;
  double mae = 0.0;
  std::optional<double> mape;  // percent; terms with |actual| < 1e-6 excluded
  std::size_t mape_excluded = 0;
};

Metrics eval_metrics(const std::vector<double>& pred, const std::vector<double>& actual);
Metrics eval_metrics(const Matrix& pred, const Matrix& actual);

struct Band {
  std::vector<double> point;
  std::vector<double> low;
  std::vector<double> high;
};

Band uncertainty_band_forecast(const std::vector<double>& last_24h, double margin);

// Forecast that repeats the last `horizon` observed target values.
Matrix persistence_forecast(const WindowedDataset& data, std::size_t target_column = kPowerFeature);

struct ForecasterConfig {
  nn::CellKind cell = nn::CellKind::lstm;
  std::vector<std::size_t> hidden_sizes{100, 100};
  std::size_t window_len = 24;
  std::size_t horizon = 24;
  std::size_t epochs = 30;
  std::size_t batch_size = 64;
  nn::OptimizerConfig optimizer{nn::OptimizerKind::adam, 1e-3};
  double lr_final_fraction = 1.0;  // < 1 anneals the rate linearly to this fraction
  double grad_clip = 5.0;  // global norm; 0 disables
  double p_max = 50.0;
  std::uint64_t seed = 0;
  ConstantFeaturePolicy constant_features = ConstantFeaturePolicy::center_only;

  void validate() const;
};

nlohmann::json to_json(const ForecasterConfig& c);
ForecasterConfig forecaster_config_from_json(const nlohmann::json& j);

struct TrainingHistory {
  std::vector<double> epoch_loss;  // mean squared error on standardized targets
};

class Forecaster {
 public:
  Forecaster() = default;

  static Forecaster train(const WindowedDataset& train, const ForecasterConfig& config,
                          TrainingHistory* history = nullptr);

  // MW, clipped to [0, p_max]; one row per sample.
  Matrix predict(const WindowedDataset& data) const;
  // `history` is window_len x features in raw units.
  std::vector<double> predict_day_ahead(const Matrix& history) const;
  // Batched form of predict_day_ahead.
  Matrix predict_many(const std::vector<Matrix>& histories) const;

  const ForecasterConfig& config() const { return config_; }
  const Scaler& scaler() const { return scaler_; }
  const nn::SequenceModel& model() const { return model_; }
  const std::string& model_id() const { return model_id_; }

  nlohmann::json to_json() const;
  static Forecaster from_json(const nlohmann::json& j);

 private:
  nn::SequenceBatch to_batch(const std::vector<const Matrix*>& windows) const;

  ForecasterConfig config_;
  Scaler scaler_;
  nn::SequenceModel model_;
  std::size_t target_column_ = kPowerFeature;
  std::string model_id_;
};

}  // namespace gridmarl::forecast
