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

#include <cmath>
#include <random>

#include "gridmarl/nn.hpp"

namespace gridmarl::nn {

std::string mlp_weight_name(std::size_t layer) { return "layer" + std::to_string(layer) + ".weight"; }
std::string mlp_bias_name(std::size_t layer) { return "layer" + std::to_string(layer) + ".bias"; }

namespace {

std::string bn_gamma_name(std::size_t layer) { return "bn" + std::to_string(layer) + ".gamma"; }
std::string bn_beta_name(std::size_t layer) { return "bn" + std::to_string(layer) + ".beta"; }

}  // namespace

void MlpSpec::validate() const {
  if (input_size == 0) throw ConfigError("mlp: input size must be positive");
  if (layer_sizes.empty()) throw ConfigError("mlp: at least one layer required");
  if (activations.size() != layer_sizes.size()) {
    throw ConfigError("mlp: one activation per layer required");
  }
  for (std::size_t s : layer_sizes) {
    if (s == 0) throw ConfigError("mlp: layer sizes must be positive");
  }
  for (std::size_t l : batch_norm_layers) {
    if (l >= layer_sizes.size()) throw ConfigError("mlp: batch-norm layer index out of range");
  }
}

nlohmann::json to_json(const MlpSpec& spec) {
  nlohmann::json acts = nlohmann::json::array();
  for (auto a : spec.activations) acts.push_back(std::string(activation_name(a)));
  return {{"input_size", spec.input_size},
          {"layer_sizes", spec.layer_sizes},
          {"activations", acts},
          {"batch_norm_layers", std::vector<std::size_t>(spec.batch_norm_layers.begin(),
                                                         spec.batch_norm_layers.end())}};
}

MlpSpec mlp_spec_from_json(const nlohmann::json& j) {
  MlpSpec spec;
  spec.input_size = j.at("input_size").get<std::size_t>();
  spec.layer_sizes = j.at("layer_sizes").get<std::vector<std::size_t>>();
  for (const auto& a : j.at("activations")) spec.activations.push_back(parse_activation(a.get<std::string>()));
  for (auto l : j.value("batch_norm_layers", std::vector<std::size_t>{})) spec.batch_norm_layers.insert(l);
  spec.validate();
  return spec;
}

ParamStore init_mlp_params(const MlpSpec& spec, std::uint64_t seed) {
  spec.validate();
  std::mt19937_64 rng(seed);
  ParamStore store;
  std::size_t fan_in = spec.input_size;
  for (std::size_t l = 0; l < spec.layer_sizes.size(); ++l) {
    const std::size_t fan_out = spec.layer_sizes[l];
    const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
    std::uniform_real_distribution<double> dist(-bound, bound);
    Matrix w(static_cast<Eigen::Index>(fan_in), static_cast<Eigen::Index>(fan_out));
    for (Eigen::Index k = 0; k < w.size(); ++k) w.data()[k] = dist(rng);
    Matrix b(1, static_cast<Eigen::Index>(fan_out));
    for (Eigen::Index k = 0; k < b.size(); ++k) b.data()[k] = dist(rng);
    store.add(mlp_weight_name(l), std::move(w));
    store.add(mlp_bias_name(l), std::move(b));
    if (spec.batch_norm_layers.count(l)) {
      store.add(bn_gamma_name(l), Matrix::Ones(1, static_cast<Eigen::Index>(fan_out)));
      store.add(bn_beta_name(l), Matrix::Zero(1, static_cast<Eigen::Index>(fan_out)));
    }
    fan_in = fan_out;
  }
  return store;
}

Mlp::Mlp(MlpSpec spec, std::uint64_t seed) : Mlp(spec, init_mlp_params(spec, seed)) {}

Mlp::Mlp(MlpSpec spec, ParamStore params) : spec_(std::move(spec)), params_(std::move(params)) {
  spec_.validate();
  std::size_t fan_in = spec_.input_size;
  for (std::size_t l = 0; l < spec_.layer_sizes.size(); ++l) {
    const auto out = static_cast<Eigen::Index>(spec_.layer_sizes[l]);
    const Matrix& w = params_.at(mlp_weight_name(l));
    const Matrix& b = params_.at(mlp_bias_name(l));
    if (w.rows() != static_cast<Eigen::Index>(fan_in) || w.cols() != out || b.rows() != 1 ||
        b.cols() != out) {
      throw DimensionError("mlp: parameter shape mismatch at layer " + std::to_string(l));
    }
    if (spec_.batch_norm_layers.count(l)) {
      bn_stats_[l] = {RowVector::Zero(out), RowVector::Ones(out)};
    }
    fan_in = spec_.layer_sizes[l];
  }
}

void Mlp::check_input(const Matrix& input) const {
  if (input.cols() != static_cast<Eigen::Index>(spec_.input_size)) {
    throw DimensionError("mlp: input width " + std::to_string(input.cols()) + " != " +
                         std::to_string(spec_.input_size));
  }
  if (auto bad = params_.first_non_finite()) {
    throw NumericError("mlp: non-finite weights in '" + *bad + "'");
  }
}

Matrix Mlp::forward(const Matrix& input, Mode mode) {
  check_input(input);
  Cache cache;
  cache.layers.reserve(spec_.layer_sizes.size());
  Matrix x = input;
  for (std::size_t l = 0; l < spec_.layer_sizes.size(); ++l) {
    LayerCache lc;
    lc.input = x;
    Matrix z = x * params_.at(mlp_weight_name(l));
    z.rowwise() += params_.at(mlp_bias_name(l)).row(0);
    if (spec_.batch_norm_layers.count(l)) {
      auto& [rm, rv] = bn_stats_.at(l);
      BatchNormCache bc;
      z = batchnorm_forward(z, params_.at(bn_gamma_name(l)).row(0), params_.at(bn_beta_name(l)).row(0),
                            rm, rv, bn_momentum, bn_epsilon, mode, &bc);
      lc.bn = std::move(bc);
    }
    Matrix y = activate(spec_.activations[l], z);
    lc.pre_activation = std::move(z);
    lc.output = y;
    cache.layers.push_back(std::move(lc));
    x = std::move(y);
  }
  cache_ = std::move(cache);
  return x;
}

Matrix Mlp::predict(const Matrix& input) const {
  check_input(input);
  Matrix x = input;
  for (std::size_t l = 0; l < spec_.layer_sizes.size(); ++l) {
    Matrix z = x * params_.at(mlp_weight_name(l));
    z.rowwise() += params_.at(mlp_bias_name(l)).row(0);
    if (spec_.batch_norm_layers.count(l)) {
      RowVector rm = bn_stats_.at(l).first;
      RowVector rv = bn_stats_.at(l).second;
      z = batchnorm_forward(z, params_.at(bn_gamma_name(l)).row(0), params_.at(bn_beta_name(l)).row(0),
                            rm, rv, bn_momentum, bn_epsilon, Mode::eval, nullptr);
    }
    x = activate(spec_.activations[l], z);
  }
  return x;
}

GradStore Mlp::backward(const Matrix& output_grad, Matrix* input_grad) const {
  if (!cache_) throw StateError("mlp: backward() called without a cached forward pass");
  const auto& layers = cache_->layers;
  if (output_grad.rows() != layers.back().output.rows() ||
      output_grad.cols() != layers.back().output.cols()) {
    throw DimensionError("mlp: output gradient shape mismatch");
  }
  GradStore grads = params_.zeros_like();
  Matrix delta = output_grad;
  for (std::size_t l = layers.size(); l-- > 0;) {
    const LayerCache& lc = layers[l];
    Matrix dz = delta.cwiseProduct(activation_grad(spec_.activations[l], lc.pre_activation, lc.output));
    if (lc.bn) {
      RowVector dgamma = RowVector::Zero(dz.cols());
      RowVector dbeta = RowVector::Zero(dz.cols());
      dz = batchnorm_backward(dz, params_.at(bn_gamma_name(l)).row(0), *lc.bn, dgamma, dbeta);
      grads.at(bn_gamma_name(l)).row(0) = dgamma;
      grads.at(bn_beta_name(l)).row(0) = dbeta;
    }
    grads.at(mlp_weight_name(l)).noalias() = lc.input.transpose() * dz;
    grads.at(mlp_bias_name(l)).row(0) = dz.colwise().sum();
    if (l > 0 || input_grad) {
      delta = dz * params_.at(mlp_weight_name(l)).transpose();
    }
  }
  if (input_grad) *input_grad = std::move(delta);
  return grads;
}

nlohmann::json mlp_to_json(const Mlp& net) {
  nlohmann::json bn = nlohmann::json::object();
  for (const auto& [layer, stats] : net.bn_stats()) {
    bn[std::to_string(layer)] = {{"running_mean", matrix_to_json(stats.first)},
                                 {"running_var", matrix_to_json(stats.second)}};
  }
  return {{"spec", to_json(net.spec())}, {"params", to_json(net.params())}, {"bn_stats", bn}};
}

Mlp mlp_from_json(const nlohmann::json& j) {
  try {
    Mlp net(mlp_spec_from_json(j.at("spec")), param_store_from_json(j.at("params")));
    for (auto& [layer, stats] : net.bn_stats()) {
      const auto& e = j.at("bn_stats").at(std::to_string(layer));
      const Matrix m = matrix_from_json(e.at("running_mean"));
      const Matrix v = matrix_from_json(e.at("running_var"));
      if (m.size() != stats.first.size() || v.size() != stats.second.size()) {
        throw DimensionError("mlp: batch-norm statistics shape mismatch");
      }
      stats.first = m.row(0);
      stats.second = v.row(0);
    }
    return net;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("mlp document: ") + e.what());
  }
}

}  // namespace gridmarl::nn
