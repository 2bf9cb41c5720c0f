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
#include <functional>
#include <optional>
#include <vector>

#include <json.hpp>

#include "gridmarl/nn.hpp"
#include "gridmarl/rng.hpp"

namespace gridmarl::ddpg {

using nn::Matrix;

struct Transition {
  std::vector<double> s;
  std::vector<double> a;
  double r = 0.0;
  std::vector<double> s_next;
  bool terminal = false;
};

struct Batch {
  Matrix s;
  Matrix a;
  Matrix r;  // n x 1
  Matrix s_next;
  Matrix terminal;  // n x 1, 1.0 when terminal
  std::size_t size() const { return static_cast<std::size_t>(s.rows()); }
};

Batch make_batch(const std::vector<Transition>& items);

// FIFO ring of transitions.
class ReplayBuffer {
 public:
  explicit ReplayBuffer(std::size_t capacity = 1000000);

  void push(Transition t);
  // Uniform sample without replacement inside one batch.
  Batch sample(std::size_t n, Rng& rng) const;
  std::vector<std::size_t> sample_indices(std::size_t n, Rng& rng) const;

  std::size_t size() const { return items_.size(); }
  std::size_t capacity() const { return capacity_; }
  // Oldest first.
  const Transition& at(std::size_t k) const;

 private:
  std::size_t capacity_;
  std::size_t head_ = 0;  // next slot to overwrite once full
  std::vector<Transition> items_;
};

struct NetworkConfig {
  std::vector<std::size_t> hidden{1000, 1000, 500};
  nn::Activation hidden_activation = nn::Activation::relu;
  bool batch_norm = true;  // after the first hidden layer
};

struct AgentConfig {
  std::size_t obs_dim = 0;
  std::size_t act_dim = 0;
  std::vector<double> act_low;
  std::vector<double> act_high;
  double gamma = 0.95;
  double tau = 0.005;
  std::size_t batch_size = 64;
  std::size_t buffer_capacity = 1000000;
  std::size_t warmup = 0;  // 0 means 10 * batch_size
  NetworkConfig actor{{1000, 1000, 500}, nn::Activation::leaky_relu, true};
  NetworkConfig critic{{1000, 1000, 500}, nn::Activation::relu, true};
  nn::Activation actor_output = nn::Activation::tanh;  // tanh or sigmoid
  nn::OptimizerConfig actor_optimizer{nn::OptimizerKind::sgd_momentum, 5e-4, 0.8};
  nn::OptimizerConfig critic_optimizer{nn::OptimizerKind::adamw, 5e-3, 0.0, 0.9, 0.999, 1e-8, 0.01};
  double noise_std_initial = 0.7;  // action units
  double noise_std_final = 0.05;
  double noise_decay_fraction = 0.8;
  double grad_clip = 10.0;

  void validate() const;
  std::size_t effective_warmup() const { return warmup == 0 ? 10 * batch_size : warmup; }
};

nlohmann::json to_json(const AgentConfig& c);
// Keys absent from `j` keep the value in `base`.
AgentConfig agent_config_from_json(const nlohmann::json& j, const AgentConfig& base = {});

// Linear decay from the initial to the final std over the first
// `decay_fraction` of episodes, then constant.
double noise_std_at(const AgentConfig& c, std::size_t episode, std::size_t total_episodes);

// target <- tau*online + (1-tau)*target
void soft_update(nn::ParamStore& target, const nn::ParamStore& online, double tau);
void soft_update(nn::Mlp& target, const nn::Mlp& online, double tau);

// Maps an actor output to action units and back to the critic's [-1, 1] scale.
std::vector<double> output_to_action(const AgentConfig& c, const std::vector<double>& y);
Matrix action_to_unit(const AgentConfig& c, const Matrix& a);

// Deterministic actor output, then Gaussian noise in action units, then clip.
std::vector<double> select_action(const nn::Mlp& actor, const AgentConfig& c, const std::vector<double>& obs,
                                  double noise_std, Rng& rng);

struct UpdateStats {
  double critic_loss = 0.0;
  double actor_objective = 0.0;
};

class Agent {
 public:
  Agent() = default;
  Agent(AgentConfig config, std::uint64_t seed);

  const AgentConfig& config() const { return config_; }
  const nn::Mlp& actor() const { return actor_; }
  nn::Mlp& actor() { return actor_; }
  const nn::Mlp& critic() const { return critic_; }
  nn::Mlp& critic() { return critic_; }
  const nn::Mlp& target_actor() const { return target_actor_; }
  const nn::Mlp& target_critic() const { return target_critic_; }
  nn::Mlp& target_critic() { return target_critic_; }
  const ReplayBuffer& buffer() const { return buffer_; }
  const nn::Optimizer& actor_optimizer() const { return actor_opt_; }
  const nn::Optimizer& critic_optimizer() const { return critic_opt_; }
  std::uint64_t updates() const { return updates_; }

  std::vector<double> act(const std::vector<double>& obs, double noise_std, Rng& rng) const;
  std::vector<double> act_greedy(const std::vector<double>& obs) const;

  // Critic targets r + gamma*Q'(s', mu'(s')), cut at terminal transitions.
  Matrix critic_targets(const Batch& batch) const;
  Matrix q_values(const Matrix& s, const Matrix& a) const;
  double critic_update(const Batch& batch);
  double actor_update(const Batch& batch);
  // Ascent step using an externally supplied dQ/da (action units).
  double actor_update_with(const Batch& batch,
                           const std::function<Matrix(const Matrix& s, const Matrix& a)>& dq_da);
  // Mean Q(s, mu(s)) and its gradient w.r.t. the actor parameters.
  double actor_objective(const Matrix& s);
  nn::GradStore actor_objective_gradient(const Matrix& s);
  void soft_update_targets();

  // Stores the transition; once past warm-up, runs one critic/actor/target
  // update from a sampled mini-batch.
  std::optional<UpdateStats> observe(Transition t, Rng& rng, bool learn = true);

  nlohmann::json to_json() const;
  static Agent from_json(const nlohmann::json& j);

 private:
  Matrix actor_actions(nn::Mlp& net, const Matrix& s, nn::Mode mode) const;
  Matrix critic_input(const Matrix& s, const Matrix& unit_actions) const;
  nn::GradStore actor_gradient(const Matrix& s, const std::function<Matrix(const Matrix&, const Matrix&)>* dq_da,
                               double* objective);

  AgentConfig config_;
  nn::Mlp actor_;
  nn::Mlp critic_;
  nn::Mlp target_actor_;
  nn::Mlp target_critic_;
  nn::Optimizer actor_opt_;
  nn::Optimizer critic_opt_;
  ReplayBuffer buffer_{1};
  std::uint64_t updates_ = 0;
};

}  // namespace gridmarl::ddpg
