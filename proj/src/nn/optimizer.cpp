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

#include "gridmarl/nn.hpp"

namespace gridmarl::nn {

OptimizerKind parse_optimizer_kind(std::string_view tag) {
  if (tag == "sgd" || tag == "sgd_momentum") return OptimizerKind::sgd_momentum;
  if (tag == "adam") return OptimizerKind::adam;
  if (tag == "adamw") return OptimizerKind::adamw;
  throw ConfigError("unknown optimizer '" + std::string(tag) + "'");
}

std::string_view optimizer_kind_name(OptimizerKind kind) {
  switch (kind) {
    case OptimizerKind::sgd_momentum: return "sgd_momentum";
    case OptimizerKind::adam: return "adam";
    case OptimizerKind::adamw: return "adamw";
  }
  return "adam";
}

nlohmann::json to_json(const OptimizerConfig& c) {
  return {{"kind", std::string(optimizer_kind_name(c.kind))},
          {"learning_rate", c.learning_rate},
          {"momentum", c.momentum},
          {"beta1", c.beta1},
          {"beta2", c.beta2},
          {"epsilon", c.epsilon},
          {"weight_decay", c.weight_decay}};
}

OptimizerConfig optimizer_config_from_json(const nlohmann::json& j) {
  OptimizerConfig c;
  c.kind = parse_optimizer_kind(j.value("kind", std::string("adam")));
  c.learning_rate = j.value("learning_rate", c.learning_rate);
  c.momentum = j.value("momentum", c.momentum);
  c.beta1 = j.value("beta1", c.beta1);
  c.beta2 = j.value("beta2", c.beta2);
  c.epsilon = j.value("epsilon", c.epsilon);
  c.weight_decay = j.value("weight_decay", c.weight_decay);
  if (!(c.learning_rate > 0.0)) throw ConfigError("optimizer: learning rate must be positive");
  return c;
}

void Optimizer::step(ParamStore& params, const GradStore& grads, Direction direction) {
  params.require_same_layout(grads, "optimizer_step");
  if (auto bad = grads.first_non_finite()) {
    throw NumericError("optimizer_step: non-finite gradient for parameter '" + *bad + "'");
  }
  if (first_.size() == 0) {
    first_ = params.zeros_like();
    if (config_.kind != OptimizerKind::sgd_momentum) second_ = params.zeros_like();
  }
  const double sign = direction == Direction::descent ? 1.0 : -1.0;
  const double lr = config_.learning_rate;
  const double wd = config_.weight_decay;
  ++step_count_;
  const double t = static_cast<double>(step_count_);
  const double bc1 = 1.0 - std::pow(config_.beta1, t);
  const double bc2 = 1.0 - std::pow(config_.beta2, t);

  auto g_it = grads.begin();
  auto m_it = first_.begin();
  auto v_it = second_.begin();
  for (auto& [name, p] : params) {
    // Effective descent gradient.
    Matrix g = sign * g_it->second;
    switch (config_.kind) {
      case OptimizerKind::sgd_momentum: {
        if (wd != 0.0) g += wd * p;
        Matrix& v = m_it->second;
        v = config_.momentum * v + g;
        p -= lr * v;
        break;
      }
      case OptimizerKind::adam:
      case OptimizerKind::adamw: {
        if (config_.kind == OptimizerKind::adamw) {
          p *= (1.0 - lr * wd);
        } else if (wd != 0.0) {
          g += wd * p;
        }
        Matrix& m = m_it->second;
        Matrix& v = v_it->second;
        m = config_.beta1 * m + (1.0 - config_.beta1) * g;
        v = config_.beta2 * v + (1.0 - config_.beta2) * g.cwiseProduct(g);
        p.array() -= lr * (m.array() / bc1) / ((v.array() / bc2).sqrt() + config_.epsilon);
        ++v_it;
        break;
      }
    }
    ++g_it;
    ++m_it;
  }
}

nlohmann::json Optimizer::to_json() const {
  nlohmann::json j;
  j["config"] = nn::to_json(config_);
  j["step_count"] = step_count_;
  j["first_moment"] = nn::to_json(first_);
  j["second_moment"] = nn::to_json(second_);
  return j;
}

Optimizer Optimizer::from_json(const nlohmann::json& j) {
  Optimizer o(optimizer_config_from_json(j.at("config")));
  o.step_count_ = j.at("step_count").get<std::uint64_t>();
  o.first_ = param_store_from_json(j.at("first_moment"));
  o.second_ = param_store_from_json(j.at("second_moment"));
  return o;
}

double clip_global_norm(GradStore& grads, double max_norm) {
  const double norm = std::sqrt(grads.squared_norm());
  if (norm > max_norm && norm > 0.0) grads.scale(max_norm / norm);
  return norm;
}

}  // namespace gridmarl::nn
