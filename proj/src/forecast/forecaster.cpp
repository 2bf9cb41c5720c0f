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
#include <cstdio>
#include <numeric>

#include "gridmarl/errors.hpp"
#include "gridmarl/forecast.hpp"
#include "gridmarl/rng.hpp"

namespace gridmarl::forecast {

namespace {

std::string_view policy_name(ConstantFeaturePolicy p) {
  return p == ConstantFeaturePolicy::reject ? "reject" : "center_only";
}

ConstantFeaturePolicy parse_policy(const std::string& s) {
  if (s == "reject") return ConstantFeaturePolicy::reject;
  if (s == "center_only") return ConstantFeaturePolicy::center_only;
  throw ConfigError("unknown constant-feature policy '" + s + "'");
}

}  // namespace

void ForecasterConfig::validate() const {
  if (hidden_sizes.empty()) throw ConfigError("forecaster: at least one recurrent layer");
  if (window_len == 0 || horizon == 0) throw ConfigError("forecaster: window and horizon must be positive");
  if (batch_size == 0) throw ConfigError("forecaster: batch size must be positive");
  if (!(optimizer.learning_rate > 0.0)) throw ConfigError("forecaster: learning rate must be positive");
  if (!(p_max > 0.0)) throw ConfigError("forecaster: p_max must be positive");
  if (!(lr_final_fraction > 0.0 && lr_final_fraction <= 1.0)) {
    throw ConfigError("forecaster: lr_final_fraction must be in (0, 1]");
  }
}

nlohmann::json to_json(const ForecasterConfig& c) {
  return {{"cell", std::string(nn::cell_kind_name(c.cell))},
          {"hidden_sizes", c.hidden_sizes},
          {"window_len", c.window_len},
          {"horizon", c.horizon},
          {"epochs", c.epochs},
          {"batch_size", c.batch_size},
          {"optimizer", nn::to_json(c.optimizer)},
          {"lr_final_fraction", c.lr_final_fraction},
          {"grad_clip", c.grad_clip},
          {"p_max", c.p_max},
          {"seed", c.seed},
          {"constant_features", std::string(policy_name(c.constant_features))}};
}

ForecasterConfig forecaster_config_from_json(const nlohmann::json& j) {
  ForecasterConfig c;
  try {
    if (j.contains("cell")) c.cell = nn::parse_cell_kind(j.at("cell").get<std::string>());
    c.hidden_sizes = j.value("hidden_sizes", c.hidden_sizes);
    c.window_len = j.value("window_len", c.window_len);
    c.horizon = j.value("horizon", c.horizon);
    c.epochs = j.value("epochs", c.epochs);
    c.batch_size = j.value("batch_size", c.batch_size);
    if (j.contains("optimizer")) c.optimizer = nn::optimizer_config_from_json(j.at("optimizer"));
    c.lr_final_fraction = j.value("lr_final_fraction", c.lr_final_fraction);
    c.grad_clip = j.value("grad_clip", c.grad_clip);
    c.p_max = j.value("p_max", c.p_max);
    c.seed = j.value("seed", c.seed);
    if (j.contains("constant_features")) {
      c.constant_features = parse_policy(j.at("constant_features").get<std::string>());
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("forecaster config: ") + e.what());
  }
  c.validate();
  return c;
}

nn::SequenceBatch Forecaster::to_batch(const std::vector<const Matrix*>& windows) const {
  const auto W = static_cast<Eigen::Index>(config_.window_len);
  const auto F = static_cast<Eigen::Index>(scaler_.mean.size());
  const auto B = static_cast<Eigen::Index>(windows.size());
  nn::SequenceBatch batch(static_cast<std::size_t>(W), Matrix(B, F));
  for (Eigen::Index b = 0; b < B; ++b) {
    const Matrix& w = *windows[static_cast<std::size_t>(b)];
    if (w.rows() != W || w.cols() != F) {
      throw DimensionError("forecaster: history must be " + std::to_string(W) + " x " + std::to_string(F));
    }
    for (Eigen::Index t = 0; t < W; ++t) batch[static_cast<std::size_t>(t)].row(b) = w.row(t);
  }
  return batch;
}

Forecaster Forecaster::train(const WindowedDataset& train, const ForecasterConfig& config,
                             TrainingHistory* history) {
  config.validate();
  if (train.size() == 0) throw InsufficientData("forecaster: empty training set");
  if (train.window_len != config.window_len || train.horizon != config.horizon) {
    throw DimensionError("forecaster: dataset window/horizon differ from config");
  }
  Forecaster fc;
  fc.config_ = config;
  const auto W = static_cast<Eigen::Index>(config.window_len);
  const auto F = train.inputs.front().cols();
  if (static_cast<std::size_t>(F) <= fc.target_column_) {
    throw DimensionError("forecaster: inputs lack the power feature");
  }

  Matrix flat(static_cast<Eigen::Index>(train.size()) * W, F);
  for (std::size_t s = 0; s < train.size(); ++s) {
    flat.middleRows(static_cast<Eigen::Index>(s) * W, W) = train.inputs[s];
  }
  fc.scaler_ = Scaler::fit(flat, config.constant_features);
  const double y_mean = fc.scaler_.mean[fc.target_column_];
  const double y_std = fc.scaler_.std[fc.target_column_];

  std::vector<Matrix> scaled;
  scaled.reserve(train.size());
  for (const auto& w : train.inputs) scaled.push_back(fc.scaler_.transform(w));
  const Matrix y_scaled = (train.targets.array() - y_mean) / y_std;

  nn::SequenceModelSpec spec{config.cell, static_cast<std::size_t>(F), config.hidden_sizes, config.horizon};
  fc.model_ = nn::SequenceModel(spec, derive_seed(config.seed, "forecaster.init"));
  nn::Optimizer opt(config.optimizer);
  Rng shuffle = make_stream(config.seed, "forecaster.shuffle");

  std::vector<std::size_t> order(train.size());
  std::iota(order.begin(), order.end(), 0);
  const auto H = static_cast<Eigen::Index>(config.horizon);
  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), shuffle);
    if (config.epochs > 1) {
      const double frac = static_cast<double>(epoch) / static_cast<double>(config.epochs - 1);
      opt.set_learning_rate(config.optimizer.learning_rate * (1.0 - (1.0 - config.lr_final_fraction) * frac));
    }
    double loss_sum = 0.0;
    std::size_t count = 0;
    for (std::size_t start = 0; start < order.size(); start += config.batch_size) {
      const std::size_t end = std::min(order.size(), start + config.batch_size);
      std::vector<const Matrix*> windows;
      Matrix y(static_cast<Eigen::Index>(end - start), H);
      for (std::size_t k = start; k < end; ++k) {
        windows.push_back(&scaled[order[k]]);
        y.row(static_cast<Eigen::Index>(k - start)) = y_scaled.row(static_cast<Eigen::Index>(order[k]));
      }
      const Matrix pred = fc.model_.forward(fc.to_batch(windows));
      const Matrix diff = pred - y;
      loss_sum += diff.squaredNorm();
      count += static_cast<std::size_t>(diff.size());
      auto grads = fc.model_.backward(diff * (2.0 / static_cast<double>(diff.size())));
      if (config.grad_clip > 0.0) nn::clip_global_norm(grads, config.grad_clip);
      try {
        opt.step(fc.model_.params(), grads, nn::Direction::descent);
      } catch (const NumericError& e) {
        throw TrainingError("forecaster diverged at epoch " + std::to_string(epoch + 1) + ": " + e.what());
      }
    }
    const double loss = loss_sum / static_cast<double>(count);
    if (!std::isfinite(loss) || loss > 1e6) {
      throw TrainingError("forecaster diverged at epoch " + std::to_string(epoch + 1) + " (loss " +
                          std::to_string(loss) + ")");
    }
    if (history) history->epoch_loss.push_back(loss);
  }

  char id[32];
  std::snprintf(id, sizeof id, "%016llx",
                static_cast<unsigned long long>(fnv1a64(nn::to_json(fc.model_.params()).dump())));
  fc.model_id_ = std::string(nn::cell_kind_name(config.cell)) + "-" + id;
  return fc;
}

Matrix Forecaster::predict_many(const std::vector<Matrix>& histories) const {
  if (model_id_.empty()) throw StateError("forecaster: model is not trained");
  const auto H = static_cast<Eigen::Index>(config_.horizon);
  Matrix out(static_cast<Eigen::Index>(histories.size()), H);
  const std::size_t chunk = 256;
  for (std::size_t start = 0; start < histories.size(); start += chunk) {
    const std::size_t end = std::min(histories.size(), start + chunk);
    std::vector<Matrix> scaled;
    scaled.reserve(end - start);
    for (std::size_t k = start; k < end; ++k) {
      if (histories[k].rows() != static_cast<Eigen::Index>(config_.window_len)) {
        throw InvalidArgument("forecaster: history must contain exactly " +
                              std::to_string(config_.window_len) + " hourly rows");
      }
      scaled.push_back(scaler_.transform(histories[k]));
    }
    std::vector<const Matrix*> ptrs;
    for (const auto& m : scaled) ptrs.push_back(&m);
    const Matrix pred = model_.predict(to_batch(ptrs));
    out.middleRows(static_cast<Eigen::Index>(start), static_cast<Eigen::Index>(end - start)) = pred;
  }
  const double y_mean = scaler_.mean[target_column_];
  const double y_std = scaler_.std[target_column_];
  return (out.array() * y_std + y_mean).cwiseMax(0.0).cwiseMin(config_.p_max).matrix();
}

Matrix Forecaster::predict(const WindowedDataset& data) const { return predict_many(data.inputs); }

std::vector<double> Forecaster::predict_day_ahead(const Matrix& history) const {
  const Matrix p = predict_many({history});
  return std::vector<double>(p.data(), p.data() + p.size());
}

nlohmann::json Forecaster::to_json() const {
  return {{"format", "gridmarl.forecaster"},
          {"version", 1},
          {"model_id", model_id_},
          {"config", forecast::to_json(config_)},
          {"model", nn::to_json(model_.spec())},
          {"params", nn::to_json(model_.params())},
          {"scaler", scaler_.to_json()},
          {"target_column", target_column_}};
}

Forecaster Forecaster::from_json(const nlohmann::json& j) {
  try {
    if (j.at("format").get<std::string>() != "gridmarl.forecaster") {
      throw ParseError("not a forecaster document");
    }
    Forecaster fc;
    fc.config_ = forecaster_config_from_json(j.at("config"));
    fc.model_ = nn::SequenceModel(nn::sequence_spec_from_json(j.at("model")),
                                  nn::param_store_from_json(j.at("params")));
    fc.scaler_ = Scaler::from_json(j.at("scaler"));
    fc.target_column_ = j.at("target_column").get<std::size_t>();
    fc.model_id_ = j.at("model_id").get<std::string>();
    return fc;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("forecaster document: ") + e.what());
  }
}

}  // namespace gridmarl::forecast
