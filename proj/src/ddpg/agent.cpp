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

#include "gridmarl/ddpg.hpp"
#include "gridmarl/errors.hpp"

namespace gridmarl::ddpg {

using nn::Activation;
using nn::Mode;

namespace {

nlohmann::json network_to_json(const NetworkConfig& n) {
  return {{"hidden", n.hidden},
          {"hidden_activation", std::string(nn::activation_name(n.hidden_activation))},
          {"batch_norm", n.batch_norm}};
}

NetworkConfig network_from_json(const nlohmann::json& j, NetworkConfig n) {
  n.hidden = j.value("hidden", n.hidden);
  if (j.contains("hidden_activation")) {
    n.hidden_activation = nn::parse_activation(j.at("hidden_activation").get<std::string>());
  }
  n.batch_norm = j.value("batch_norm", n.batch_norm);
  return n;
}

nn::MlpSpec network_spec(const NetworkConfig& n, std::size_t input, std::size_t output, Activation out_act) {
  nn::MlpSpec spec;
  spec.input_size = input;
  spec.layer_sizes = n.hidden;
  spec.layer_sizes.push_back(output);
  spec.activations.assign(n.hidden.size(), n.hidden_activation);
  spec.activations.push_back(out_act);
  if (n.batch_norm && !n.hidden.empty()) spec.batch_norm_layers.insert(0);
  return spec;
}

// d(unit action)/d(actor output)
double unit_per_output(Activation a) { return a == Activation::sigmoid ? 2.0 : 1.0; }

}  // namespace

void AgentConfig::validate() const {
  if (obs_dim == 0 || act_dim == 0) throw ConfigError("agent: obs_dim and act_dim must be positive");
  if (act_low.size() != act_dim || act_high.size() != act_dim) {
    throw ConfigError("agent: action bounds need one entry per dimension");
  }
  for (std::size_t k = 0; k < act_dim; ++k) {
    if (!(act_low[k] < act_high[k])) throw ConfigError("agent: act_low must be below act_high");
  }
  if (!(gamma >= 0.0 && gamma <= 1.0)) throw ConfigError("agent: gamma must be in [0, 1]");
  if (!(tau > 0.0 && tau <= 1.0)) throw ConfigError("agent: tau must be in (0, 1]");
  if (batch_size == 0) throw ConfigError("agent: batch size must be positive");
  if (buffer_capacity < batch_size) throw ConfigError("agent: buffer smaller than a batch");
  if (actor_output != Activation::tanh && actor_output != Activation::sigmoid) {
    throw ConfigError("agent: actor output must be tanh or sigmoid");
  }
  if (!(noise_std_initial >= 0.0 && noise_std_final >= 0.0)) throw ConfigError("agent: noise std must be >= 0");
  if (!(noise_decay_fraction > 0.0 && noise_decay_fraction <= 1.0)) {
    throw ConfigError("agent: noise decay fraction must be in (0, 1]");
  }
  if ((actor.batch_norm || critic.batch_norm) && batch_size < 2) throw ConfigError("agent: batch norm needs batch size >= 2");
}

nlohmann::json to_json(const AgentConfig& c) {
  return {{"obs_dim", c.obs_dim},
          {"act_dim", c.act_dim},
          {"act_low", c.act_low},
          {"act_high", c.act_high},
          {"gamma", c.gamma},
          {"tau", c.tau},
          {"batch_size", c.batch_size},
          {"buffer_capacity", c.buffer_capacity},
          {"warmup", c.warmup},
          {"actor", network_to_json(c.actor)},
          {"critic", network_to_json(c.critic)},
          {"actor_output", std::string(nn::activation_name(c.actor_output))},
          {"actor_optimizer", nn::to_json(c.actor_optimizer)},
          {"critic_optimizer", nn::to_json(c.critic_optimizer)},
          {"noise_std_initial", c.noise_std_initial},
          {"noise_std_final", c.noise_std_final},
          {"noise_decay_fraction", c.noise_decay_fraction},
          {"grad_clip", c.grad_clip}};
}

AgentConfig agent_config_from_json(const nlohmann::json& j, const AgentConfig& base) {
  AgentConfig c = base;
  try {
    c.obs_dim = j.value("obs_dim", c.obs_dim);
    c.act_dim = j.value("act_dim", c.act_dim);
    c.act_low = j.value("act_low", c.act_low);
    c.act_high = j.value("act_high", c.act_high);
    c.gamma = j.value("gamma", c.gamma);
    c.tau = j.value("tau", c.tau);
    c.batch_size = j.value("batch_size", c.batch_size);
    c.buffer_capacity = j.value("buffer_capacity", c.buffer_capacity);
    c.warmup = j.value("warmup", c.warmup);
    if (j.contains("actor")) c.actor = network_from_json(j.at("actor"), c.actor);
    if (j.contains("critic")) c.critic = network_from_json(j.at("critic"), c.critic);
    if (j.contains("actor_output")) c.actor_output = nn::parse_activation(j.at("actor_output").get<std::string>());
    if (j.contains("actor_optimizer")) c.actor_optimizer = nn::optimizer_config_from_json(j.at("actor_optimizer"));
    if (j.contains("critic_optimizer")) c.critic_optimizer = nn::optimizer_config_from_json(j.at("critic_optimizer"));
    c.noise_std_initial = j.value("noise_std_initial", c.noise_std_initial);
    c.noise_std_final = j.value("noise_std_final", c.noise_std_final);
    c.noise_decay_fraction = j.value("noise_decay_fraction", c.noise_decay_fraction);
    c.grad_clip = j.value("grad_clip", c.grad_clip);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("agent config: ") + e.what());
  }
  return c;
}

double noise_std_at(const AgentConfig& c, std::size_t episode, std::size_t total_episodes) {
  const double span = c.noise_decay_fraction * static_cast<double>(total_episodes);
  if (span <= 0.0) return c.noise_std_final;
  const double frac = std::min(1.0, static_cast<double>(episode) / span);
  return c.noise_std_initial + (c.noise_std_final - c.noise_std_initial) * frac;
}

void soft_update(nn::ParamStore& target, const nn::ParamStore& online, double tau) {
  target.require_same_layout(online, "soft_update");
  for (auto& [name, m] : target) {
    m = tau * online.at(name) + (1.0 - tau) * m;
  }
}

void soft_update(nn::Mlp& target, const nn::Mlp& online, double tau) {
  soft_update(target.params(), online.params(), tau);
  for (auto& [layer, stats] : target.bn_stats()) {
    const auto& src = online.bn_stats().at(layer);
    stats.first = tau * src.first + (1.0 - tau) * stats.first;
    stats.second = tau * src.second + (1.0 - tau) * stats.second;
  }
}

std::vector<double> output_to_action(const AgentConfig& c, const std::vector<double>& y) {
  std::vector<double> a(y.size());
  for (std::size_t k = 0; k < y.size(); ++k) {
    const double unit = c.actor_output == Activation::sigmoid ? y[k] : 0.5 * (y[k] + 1.0);
    a[k] = c.act_low[k] + unit * (c.act_high[k] - c.act_low[k]);
  }
  return a;
}

Matrix action_to_unit(const AgentConfig& c, const Matrix& a) {
  Matrix u(a.rows(), a.cols());
  for (Eigen::Index k = 0; k < a.cols(); ++k) {
    const auto i = static_cast<std::size_t>(k);
    u.col(k) = (2.0 * (a.col(k).array() - c.act_low[i]) / (c.act_high[i] - c.act_low[i])) - 1.0;
  }
  return u;
}

std::vector<double> select_action(const nn::Mlp& actor, const AgentConfig& c, const std::vector<double>& obs,
                                  double noise_std, Rng& rng) {
  if (obs.size() != c.obs_dim) throw DimensionError("select_action: observation dimension mismatch");
  Matrix x(1, static_cast<Eigen::Index>(obs.size()));
  for (std::size_t k = 0; k < obs.size(); ++k) x(0, static_cast<Eigen::Index>(k)) = obs[k];
  const Matrix y = actor.predict(x);
  auto a = output_to_action(c, std::vector<double>(y.data(), y.data() + y.size()));
  std::normal_distribution<double> n(0.0, 1.0);
  for (std::size_t k = 0; k < a.size(); ++k) {
    if (noise_std > 0.0) a[k] += noise_std * n(rng);
    a[k] = std::clamp(a[k], c.act_low[k], c.act_high[k]);
  }
  return a;
}

Agent::Agent(AgentConfig config, std::uint64_t seed) : config_(std::move(config)) {
  config_.validate();
  const auto actor_spec = network_spec(config_.actor, config_.obs_dim, config_.act_dim, config_.actor_output);
  const auto critic_spec =
      network_spec(config_.critic, config_.obs_dim + config_.act_dim, 1, Activation::linear);
  actor_ = nn::Mlp(actor_spec, derive_seed(seed, "actor"));
  critic_ = nn::Mlp(critic_spec, derive_seed(seed, "critic"));
  target_actor_ = actor_;
  target_critic_ = critic_;
  target_actor_.clear_cache();
  target_critic_.clear_cache();
  actor_opt_ = nn::Optimizer(config_.actor_optimizer);
  critic_opt_ = nn::Optimizer(config_.critic_optimizer);
  buffer_ = ReplayBuffer(config_.buffer_capacity);
}

std::vector<double> Agent::act(const std::vector<double>& obs, double noise_std, Rng& rng) const {
  return select_action(actor_, config_, obs, noise_std, rng);
}

std::vector<double> Agent::act_greedy(const std::vector<double>& obs) const {
  Rng unused(0);
  return select_action(actor_, config_, obs, 0.0, unused);
}

Matrix Agent::critic_input(const Matrix& s, const Matrix& unit_actions) const {
  Matrix x(s.rows(), s.cols() + unit_actions.cols());
  x << s, unit_actions;
  return x;
}

Matrix Agent::q_values(const Matrix& s, const Matrix& a) const {
  return critic_.predict(critic_input(s, action_to_unit(config_, a)));
}

Matrix Agent::critic_targets(const Batch& batch) const {
  const Matrix y_next = target_actor_.predict(batch.s_next);
  Matrix u_next = config_.actor_output == Activation::sigmoid ? Matrix((2.0 * y_next.array() - 1.0).matrix())
                                                               : y_next;
  const Matrix q_next = target_critic_.predict(critic_input(batch.s_next, u_next));
  return batch.r + config_.gamma * (1.0 - batch.terminal.array()).matrix().cwiseProduct(q_next);
}

double Agent::critic_update(const Batch& batch) {
  const Matrix y = critic_targets(batch);
  const Matrix q = critic_.forward(critic_input(batch.s, action_to_unit(config_, batch.a)), Mode::train);
  const Matrix diff = q - y;
  const double n = static_cast<double>(diff.rows());
  const double loss = diff.squaredNorm() / n;
  if (!std::isfinite(loss)) throw NumericError("critic update: non-finite loss");
  auto grads = critic_.backward(diff * (2.0 / n));
  if (config_.grad_clip > 0.0) nn::clip_global_norm(grads, config_.grad_clip);
  critic_opt_.step(critic_.params(), grads, nn::Direction::descent);
  return loss;
}

nn::GradStore Agent::actor_gradient(const Matrix& s,
                                    const std::function<Matrix(const Matrix&, const Matrix&)>* dq_da,
                                    double* objective) {
  const Matrix y = actor_.forward(s, Mode::train);
  const double n = static_cast<double>(s.rows());
  Matrix dq_dy(y.rows(), y.cols());
  if (dq_da) {
    Matrix a(y.rows(), y.cols());
    for (Eigen::Index i = 0; i < y.rows(); ++i) {
      const auto row = output_to_action(config_, std::vector<double>(y.row(i).data(), y.row(i).data() + y.cols()));
      for (Eigen::Index k = 0; k < y.cols(); ++k) a(i, k) = row[static_cast<std::size_t>(k)];
    }
    const Matrix g = (*dq_da)(s, a);
    for (Eigen::Index k = 0; k < y.cols(); ++k) {
      const auto i = static_cast<std::size_t>(k);
      const double range = config_.act_high[i] - config_.act_low[i];
      const double da_dy = config_.actor_output == Activation::sigmoid ? range : 0.5 * range;
      dq_dy.col(k) = g.col(k) * da_dy;
    }
    if (objective) *objective = 0.0;
  } else {
    const double scale = unit_per_output(config_.actor_output);
    const Matrix u = config_.actor_output == Activation::sigmoid ? Matrix((2.0 * y.array() - 1.0).matrix()) : y;
    nn::Mlp& critic = critic_;
    const Matrix q = critic.forward(critic_input(s, u), Mode::eval);
    Matrix dx;
    critic.backward(Matrix::Ones(q.rows(), 1), &dx);
    critic.clear_cache();
    dq_dy = dx.rightCols(y.cols()) * scale;
    if (objective) *objective = q.mean();
  }
  return actor_.backward(dq_dy / n);
}

double Agent::actor_objective(const Matrix& s) {
  const Matrix y = actor_.forward(s, Mode::train);
  actor_.clear_cache();
  const Matrix u = config_.actor_output == Activation::sigmoid ? Matrix((2.0 * y.array() - 1.0).matrix()) : y;
  return critic_.predict(critic_input(s, u)).mean();
}

nn::GradStore Agent::actor_objective_gradient(const Matrix& s) {
  auto g = actor_gradient(s, nullptr, nullptr);
  actor_.clear_cache();
  return g;
}

double Agent::actor_update(const Batch& batch) {
  double objective = 0.0;
  auto grads = actor_gradient(batch.s, nullptr, &objective);
  if (config_.grad_clip > 0.0) nn::clip_global_norm(grads, config_.grad_clip);
  actor_opt_.step(actor_.params(), grads, nn::Direction::ascent);
  return objective;
}

double Agent::actor_update_with(const Batch& batch,
                                const std::function<Matrix(const Matrix&, const Matrix&)>& dq_da) {
  auto grads = actor_gradient(batch.s, &dq_da, nullptr);
  if (config_.grad_clip > 0.0) nn::clip_global_norm(grads, config_.grad_clip);
  actor_opt_.step(actor_.params(), grads, nn::Direction::ascent);
  return 0.0;
}

void Agent::soft_update_targets() {
  soft_update(target_actor_, actor_, config_.tau);
  soft_update(target_critic_, critic_, config_.tau);
}

std::optional<UpdateStats> Agent::observe(Transition t, Rng& rng, bool learn) {
  if (t.s.size() != config_.obs_dim || t.s_next.size() != config_.obs_dim || t.a.size() != config_.act_dim) {
    throw DimensionError("agent: transition dimensions do not match the config");
  }
  buffer_.push(std::move(t));
  if (!learn || buffer_.size() < std::max(config_.effective_warmup(), config_.batch_size)) return std::nullopt;
  const Batch batch = buffer_.sample(config_.batch_size, rng);
  UpdateStats stats;
  stats.critic_loss = critic_update(batch);
  stats.actor_objective = actor_update(batch);
  soft_update_targets();
  ++updates_;
  return stats;
}

nlohmann::json Agent::to_json() const {
  return {{"format", "gridmarl.agent"},
          {"version", 1},
          {"config", ddpg::to_json(config_)},
          {"actor", nn::mlp_to_json(actor_)},
          {"critic", nn::mlp_to_json(critic_)},
          {"target_actor", nn::mlp_to_json(target_actor_)},
          {"target_critic", nn::mlp_to_json(target_critic_)},
          {"actor_optimizer", actor_opt_.to_json()},
          {"critic_optimizer", critic_opt_.to_json()},
          {"updates", updates_}};
}

Agent Agent::from_json(const nlohmann::json& j) {
  try {
    if (j.at("format").get<std::string>() != "gridmarl.agent") throw ParseError("not an agent document");
    Agent a;
    a.config_ = agent_config_from_json(j.at("config"));
    a.config_.validate();
    a.actor_ = nn::mlp_from_json(j.at("actor"));
    a.critic_ = nn::mlp_from_json(j.at("critic"));
    a.target_actor_ = nn::mlp_from_json(j.at("target_actor"));
    a.target_critic_ = nn::mlp_from_json(j.at("target_critic"));
    a.actor_opt_ = nn::Optimizer::from_json(j.at("actor_optimizer"));
    a.critic_opt_ = nn::Optimizer::from_json(j.at("critic_optimizer"));
    a.buffer_ = ReplayBuffer(a.config_.buffer_capacity);
    a.updates_ = j.at("updates").get<std::uint64_t>();
    return a;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("agent document: ") + e.what());
  }
}

}  // namespace gridmarl::ddpg
