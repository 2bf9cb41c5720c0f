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
#include <filesystem>
#include <fstream>

#include "gridmarl/env.hpp"
#include "gridmarl/errors.hpp"
#include "gridmarl/text.hpp"

namespace gridmarl::env {

ddpg::AgentConfig reference_lsa_agent() {
  ddpg::AgentConfig c;
  c.batch_size = 100;
  c.actor.hidden_activation = nn::Activation::rrelu;
  c.actor_output = nn::Activation::sigmoid;
  c.actor_optimizer = {nn::OptimizerKind::sgd_momentum, 3e-5, 0.9};
  c.critic_optimizer.learning_rate = 3e-4;
  c.noise_std_initial = 0.07;
  c.noise_std_final = 0.005;
  return c;
}

nlohmann::json to_json(const TrainingConfig& c) {
  return {{"episodes", c.episodes},
          {"eval_days", c.eval_days},
          {"checkpoint_every", c.checkpoint_every},
          {"lsa", ddpg::to_json(c.lsa)},
          {"pa", ddpg::to_json(c.pa)}};
}

TrainingConfig training_config_from_json(const nlohmann::json& j) {
  TrainingConfig c;
  try {
    c.episodes = j.value("episodes", c.episodes);
    c.eval_days = j.value("eval_days", c.eval_days);
    c.checkpoint_every = j.value("checkpoint_every", c.checkpoint_every);
    if (j.contains("lsa")) c.lsa = ddpg::agent_config_from_json(j.at("lsa"), c.lsa);
    if (j.contains("pa")) c.pa = ddpg::agent_config_from_json(j.at("pa"), c.pa);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("training config: ") + e.what());
  }
  if (c.episodes == 0) throw ConfigError("training: episodes must be positive");
  return c;
}

namespace {

// Dimensions and bounds of both agents follow from the environment.
ddpg::AgentConfig lsa_agent_config(ddpg::AgentConfig c, const EnvConfig& env) {
  c.obs_dim = env.lsa_obs_dim();
  c.act_dim = env.lsa_act_dim();
  c.act_low.assign(c.act_dim, env.price_min);
  c.act_high.assign(c.act_dim, env.price_max);
  c.actor_output = nn::Activation::sigmoid;
  return c;
}

ddpg::AgentConfig pa_agent_config(ddpg::AgentConfig c, const EnvConfig& env) {
  c.obs_dim = env.pa_obs_dim();
  c.act_dim = 1;
  c.act_low = {-env.battery.p_charge_max};
  c.act_high = {env.battery.p_discharge_max};
  c.actor_output = nn::Activation::tanh;
  return c;
}

std::string pa_name(std::size_t i) { return "pa_" + std::to_string(i); }

}  // namespace

Trainer::Trainer(EnvConfig env, TrainingConfig training, PricingPolicy policy,
                 std::shared_ptr<const ExogenousSource> source, std::uint64_t seed)
    : env_(std::move(env)), training_(std::move(training)), policy_(std::move(policy)), source_(std::move(source)),
      seed_(seed) {
  env_.validate();
  if (!source_) throw InvalidArgument("Trainer: exogenous source is required");
  training_.lsa = lsa_agent_config(training_.lsa, env_);
  training_.pa = pa_agent_config(training_.pa, env_);
  if (policy_.learned) {
    lsa_.emplace(training_.lsa, derive_seed(seed_, "lsa"));
  } else {
    if (policy_.schedule.size() != env_.steps) {
      throw ConfigError("pricing policy '" + policy_.name + "': schedule needs " + std::to_string(env_.steps) +
                        " values");
    }
    for (double v : policy_.schedule) {
      if (!(v >= env_.price_min && v <= env_.price_max)) {
        throw ConfigError("pricing policy '" + policy_.name + "': price " + text::format_double(v) +
                          " outside the configured bounds");
      }
    }
  }
  lsa_rng_ = make_stream(seed_, "lsa.act");
  lsa_norm_ = ObservationNormalizer(env_.lsa_obs_dim(), env_.normalizer_floor);
  for (std::size_t i = 0; i < env_.profiles.prosumers; ++i) {
    pas_.emplace_back(training_.pa, derive_seed(seed_, pa_name(i)));
    pa_rng_.push_back(make_stream(seed_, pa_name(i) + ".act"));
    pa_norm_.emplace_back(env_.pa_obs_dim(), env_.normalizer_floor);
  }
}

std::vector<double> Trainer::next_l_da(std::int64_t day) {
  std::vector<double> base = last_load_;
  if (base.empty()) {
    base = idle_net_load(make_day_profile(env_.profiles, source_->seed(), day - 1, env_.steps));
  }
  Rng rng = make_stream(derive_seed(source_->seed(), "lda"), "day/" + std::to_string(day));
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (double& v : base) v *= 1.0 + env_.lda_noise * gauss(rng);
  return base;
}

retail::PriceSignal Trainer::lsa_price(const std::vector<double>& obs_norm, bool explore, double noise) {
  const auto a = explore ? lsa_->act(obs_norm, noise, lsa_rng_) : lsa_->act_greedy(obs_norm);
  // Two-dimensional actions are (retail price, buyback price).
  if (a.size() == 1) return {a[0], a[0]};
  return {a[1], a[0]};
}

EpisodeMetrics Trainer::run_episode(bool learn, bool explore, std::vector<StepRecord>* log) {
  EpisodeMetrics m = run_day(episode_day(episode_), learn, explore, log);
  ++episode_;
  return m;
}

EpisodeMetrics Trainer::run_day(std::int64_t day, bool learn, bool explore, std::vector<StepRecord>* log) {
  const std::size_t np = env_.profiles.prosumers;
  EpisodeMetrics m;
  m.episode = episode_;
  m.lsa_noise = explore && lsa_ ? ddpg::noise_std_at(training_.lsa, episode_, training_.episodes) : 0.0;
  m.pa_noise = explore ? ddpg::noise_std_at(training_.pa, episode_, training_.episodes) : 0.0;

  std::size_t t = 0;
  try {
    const Exogenous& exo = source_->day(day);
    MarketEnv env(env_);
    env.reset(exo, next_l_da(day));

    std::vector<std::optional<ddpg::Transition>> pending(np);
    std::vector<std::vector<double>> pa_actions(np);
    while (!env.done()) {
      t = env.t();
      const auto lsa_raw = env.lsa_observation();
      const auto lsa_obs = lsa_norm_.normalize(lsa_raw, learn);
      retail::PriceSignal price;
      std::vector<double> lsa_action;
      if (lsa_) {
        price = lsa_price(lsa_obs, explore, m.lsa_noise);
        lsa_action = env_.net_metering ? std::vector<double>{price.buy} : std::vector<double>{price.buy, price.sell};
      } else {
        price = {policy_.schedule[t], policy_.schedule[t]};
      }

      const auto pa_raw = env.pa_observations(price);
      std::vector<std::vector<double>> pa_obs(np);
      for (std::size_t i = 0; i < np; ++i) {
        pa_obs[i] = pa_norm_[i].normalize(pa_raw[i], learn);
        if (learn && pending[i]) {
          pending[i]->s_next = pa_obs[i];
          pas_[i].observe(std::move(*pending[i]), pa_rng_[i], true);
          pending[i].reset();
        }
      }
      std::vector<double> b(np);
      for (std::size_t i = 0; i < np; ++i) {
        pa_actions[i] = explore ? pas_[i].act(pa_obs[i], m.pa_noise, pa_rng_[i]) : pas_[i].act_greedy(pa_obs[i]);
        b[i] = pa_actions[i][0];
      }

      const StepRecord rec = env.step(price, b);

      if (learn && lsa_) {
        const auto next = rec.terminal ? lsa_obs : lsa_norm_.apply(env.lsa_observation());
        lsa_->observe({lsa_obs, lsa_action, rec.lsa_reward, next, rec.terminal}, lsa_rng_, true);
      }
      if (learn) {
        for (std::size_t i = 0; i < np; ++i) {
          ddpg::Transition tr{pa_obs[i], pa_actions[i], rec.pa_rewards[i], {}, rec.terminal};
          if (rec.terminal) {
            tr.s_next = pa_obs[i];
            pas_[i].observe(std::move(tr), pa_rng_[i], true);
          } else {
            pending[i] = std::move(tr);
          }
        }
      }
    }
    m.summary = env.summary();
    last_load_.clear();
    for (const auto& r : env.log()) last_load_.push_back(r.settlement.aggregate);
    // A truncated day leaves the tail of the bid unchanged.
    if (last_load_.size() < env_.steps) {
      const auto fallback = idle_net_load(exo.profile);
      for (std::size_t k = last_load_.size(); k < env_.steps; ++k) last_load_.push_back(fallback[k]);
    }
    if (log) *log = env.log();
  } catch (const Error& e) {
    throw Error(e.code(), "episode " + std::to_string(episode_) + " step " + std::to_string(t) + ": " + e.what());
  }
  m.lsa_updates = lsa_ ? lsa_->updates() : 0;
  for (const auto& pa : pas_) m.pa_updates += pa.updates();
  return m;
}

nlohmann::json Trainer::to_json() const {
  nlohmann::json pas = nlohmann::json::array(), pa_norm = nlohmann::json::array(), pa_rng = nlohmann::json::array();
  for (std::size_t i = 0; i < pas_.size(); ++i) {
    pas.push_back(pas_[i].to_json());
    pa_norm.push_back(pa_norm_[i].to_json());
    pa_rng.push_back(rng_state(pa_rng_[i]));
  }
  nlohmann::json j = {{"format", "gridmarl.trainer"},
                      {"version", 1},
                      {"seed", seed_},
                      {"episode", episode_},
                      {"policy",
                       {{"name", policy_.name},
                        {"learned", policy_.learned},
                        {"schedule", policy_.schedule},
                        {"forecast", to_string(policy_.forecast)}}},
                      {"env", env::to_json(env_)},
                      {"training", env::to_json(training_)},
                      {"lsa_normalizer", lsa_norm_.to_json()},
                      {"lsa_rng", rng_state(lsa_rng_)},
                      {"pas", pas},
                      {"pa_normalizers", pa_norm},
                      {"pa_rngs", pa_rng},
                      {"last_load", last_load_}};
  j["lsa"] = lsa_ ? lsa_->to_json() : nlohmann::json(nullptr);
  return j;
}

void Trainer::load_state(const nlohmann::json& j) {
  try {
    if (j.value("format", std::string()) != "gridmarl.trainer") throw ParseError("not a trainer checkpoint");
    const auto& pol = j.at("policy");
    if (pol.at("name").get<std::string>() != policy_.name || pol.at("learned").get<bool>() != policy_.learned) {
      throw StateError("checkpoint was written for pricing policy '" + pol.at("name").get<std::string>() + "'");
    }
    if (j.at("pas").size() != pas_.size()) throw DimensionError("checkpoint prosumer count differs from the config");
    if (lsa_) {
      if (j.at("lsa").is_null()) throw StateError("checkpoint holds no LSA agent");
      *lsa_ = ddpg::Agent::from_json(j.at("lsa"));
    }
    for (std::size_t i = 0; i < pas_.size(); ++i) {
      pas_[i] = ddpg::Agent::from_json(j.at("pas")[i]);
      pa_norm_[i] = ObservationNormalizer::from_json(j.at("pa_normalizers")[i]);
      restore_rng_state(pa_rng_[i], j.at("pa_rngs")[i].get<std::string>());
    }
    lsa_norm_ = ObservationNormalizer::from_json(j.at("lsa_normalizer"));
    restore_rng_state(lsa_rng_, j.at("lsa_rng").get<std::string>());
    episode_ = j.at("episode").get<std::size_t>();
    last_load_ = j.at("last_load").get<std::vector<double>>();
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("trainer checkpoint: ") + e.what());
  }
}

std::unique_ptr<Trainer> Trainer::clone_with_source(std::shared_ptr<const ExogenousSource> source) const {
  if (!source) throw InvalidArgument("Trainer: exogenous source is required");
  auto copy = std::make_unique<Trainer>(*this);
  copy->source_ = std::move(source);
  return copy;
}

void write_metrics_csv(const std::string& path, const std::vector<EpisodeMetrics>& rows) {
  std::ofstream f(path);
  if (!f) throw IoError("cannot open '" + path + "' for writing");
  using text::format_double;
  f << "episode,day,steps,truncated,lse_profit,retail_revenue,buyback_cost,total_cost,lsa_return,"
       "mean_prosumer_bill,par,mean_abs_lmp_gap,lsa_noise,pa_noise,lsa_updates,pa_updates,pa_returns\n";
  for (const auto& m : rows) {
    const auto& s = m.summary;
    f << m.episode << ',' << s.day << ',' << s.steps << ',' << (s.truncated ? 1 : 0) << ','
      << format_double(s.lse_profit) << ',' << format_double(s.retail_revenue) << ','
      << format_double(s.buyback_cost) << ',' << format_double(s.total_cost) << ','
      << format_double(s.lsa_return) << ',' << format_double(s.mean_prosumer_bill) << ','
      << format_double(s.par) << ',' << format_double(s.mean_abs_lmp_gap) << ',' << format_double(m.lsa_noise)
      << ',' << format_double(m.pa_noise) << ',' << m.lsa_updates << ',' << m.pa_updates << ','
      << text::join(s.pa_returns, ' ') << '\n';
  }
  if (!f) throw IoError("write failed for '" + path + "'");
}

TrainingResult run_training(const EnvConfig& env, const TrainingConfig& training, const PricingPolicy& policy,
                            std::shared_ptr<const ExogenousSource> source, std::uint64_t seed,
                            const EpisodeCallback& on_episode) {
  TrainingResult out;
  out.trainer = std::make_unique<Trainer>(env, training, policy, std::move(source), seed);
  for (std::size_t e = 0; e < training.episodes; ++e) {
    out.history.push_back(out.trainer->run_episode(true, true));
    if (on_episode) on_episode(out.history.back(), *out.trainer);
    if (training.checkpoint_every > 0 && !training.checkpoint_dir.empty() &&
        (e + 1) % training.checkpoint_every == 0) {
      std::filesystem::create_directories(training.checkpoint_dir);
      const auto path = std::filesystem::path(training.checkpoint_dir) / "checkpoint.json";
      std::ofstream f(path);
      if (!f) throw IoError("cannot write checkpoint '" + path.string() + "'");
      f << out.trainer->to_json().dump();
    }
  }
  return out;
}

std::vector<double> smooth(const std::vector<double>& values, std::size_t window) {
  if (window == 0) throw InvalidArgument("smooth: window must be positive");
  std::vector<double> out(values.size());
  double acc = 0.0;
  for (std::size_t k = 0; k < values.size(); ++k) {
    acc += values[k];
    if (k >= window) acc -= values[k - window];
    out[k] = acc / static_cast<double>(std::min(window, k + 1));
  }
  return out;
}

}  // namespace gridmarl::env
