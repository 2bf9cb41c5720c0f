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
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "gridmarl/ddpg.hpp"
#include "gridmarl/forecast.hpp"
#include "gridmarl/market.hpp"
#include "gridmarl/retail.hpp"
#include "gridmarl/rng.hpp"

namespace gridmarl::env {

using nn::Matrix;

// Household demand and rooftop PV shapes. Times are hours of the day.
struct ProfileSpec {
  std::size_t prosumers = 3;
  std::size_t consumers = 2;

  double consumer_base_kw = 3.0;
  double consumer_morning_kw = 2.0;
  double consumer_evening_kw = 3.5;
  double prosumer_base_kw = 0.6;
  double prosumer_morning_kw = 1.0;
  double prosumer_evening_kw = 2.0;
  double morning_hour = 8.0;
  double evening_hour = 19.0;
  double morning_width = 1.5;
  double evening_width = 2.0;
  double peak_jitter = 0.5;     // hours, uniform +-
  double scale_jitter = 0.10;   // daily multiplicative, uniform +-
  double household_spread = 0.20;  // per-household multiplicative, uniform +-
  double noise = 0.05;          // per-step multiplicative std

  double pv_max_kw = 7.0;
  double pv_size_min = 0.6;  // fraction of pv_max per prosumer
  double pv_size_max = 0.9;
  double sunrise = 6.0;
  double sunset = 18.0;
  double cloudy_scale = 0.35;
  double p_sunny = 0.6;
  double cloud_noise = 0.10;

  void validate() const;
};

nlohmann::json to_json(const ProfileSpec& s);
ProfileSpec profile_spec_from_json(const nlohmann::json& j);

struct DayProfile {
  std::int64_t day = 0;
  bool sunny = true;
  Matrix prosumer_demand;  // prosumers x steps, kW
  Matrix consumer_demand;  // consumers x steps, kW
  Matrix pv;               // prosumers x steps, kW
};

// Deterministic in (seed, day); independent across days.
DayProfile make_day_profile(const ProfileSpec& spec, std::uint64_t seed, std::int64_t day, std::size_t steps);
bool day_is_sunny(const ProfileSpec& spec, std::uint64_t seed, std::int64_t day);

// Aggregate net load with every battery idle.
std::vector<double> idle_net_load(const DayProfile& p);

struct EnvConfig {
  std::size_t steps = 96;
  double dt = 0.25;  // hours
  std::size_t pa_history = 20;
  std::size_t lmp_history = 24;
  double price_min = 0.05;  // $/kWh
  double price_max = 0.20;
  bool net_metering = true;
  double lda_noise = 0.05;
  double lsa_reward_scale = 10.0;
  double pa_reward_scale = 1.0;
  double infeasible_penalty = -10.0;
  double mw_per_model_kw = 4.0;
  double band_margin = 0.10;
  bool observe_weather_label = false;
  double normalizer_floor = 1e-6;
  retail::BatterySpec battery;
  ProfileSpec profiles;
  market::MarketSpec market = market::default_market();

  void validate() const;
  std::size_t pa_obs_dim() const { return 3 + 2 * (pa_history + 1) + (observe_weather_label ? 1 : 0); }
  std::size_t lsa_obs_dim() const { return 24 + 2 * (lmp_history + 1) + 3; }
  std::size_t lsa_act_dim() const { return net_metering ? 1 : 2; }
};

nlohmann::json to_json(const EnvConfig& c);
EnvConfig env_config_from_json(const nlohmann::json& j);

// Running per-feature mean and variance (Welford).
class ObservationNormalizer {
 public:
  ObservationNormalizer() = default;
  explicit ObservationNormalizer(std::size_t dim, double floor = 1e-6);

  // Normalizes with the statistics seen so far, then folds `obs` in when
  // `update` is set. Identity until the first update.
  std::vector<double> normalize(const std::vector<double>& obs, bool update);
  std::vector<double> apply(const std::vector<double>& obs) const;

  std::size_t dim() const { return mean_.size(); }
  std::uint64_t count() const { return count_; }
  const std::vector<double>& mean() const { return mean_; }
  std::vector<double> variance() const;

  nlohmann::json to_json() const;
  static ObservationNormalizer from_json(const nlohmann::json& j);

 private:
  double floor_ = 1e-6;
  std::uint64_t count_ = 0;
  std::vector<double> mean_;
  std::vector<double> m2_;
};

// Keeps the last `depth + 1` values, front-padded with the first value.
std::vector<double> padded_history(const std::vector<double>& history, std::size_t depth);

// [d, g, soc, sell history, buy history (, sunny)]
std::vector<double> build_pa_observation(double d, double g, double soc, const std::vector<double>& sell_history,
                                         const std::vector<double>& buy_history, std::size_t depth,
                                         std::optional<double> weather_label = std::nullopt);

// [wind forecast (24), DA LMP history, RT LMP history, L_DA, L_RT, E]
std::vector<double> build_lsa_observation(const std::vector<double>& wind_forecast,
                                          const std::vector<double>& da_history,
                                          const std::vector<double>& rt_history, std::size_t depth, double l_da,
                                          double l_rt, double e_bought);

double pa_reward(double e, const retail::PriceSignal& price, double dt, double scale = 1.0);

// [sales*retail - buyback*buyback_price - procured*rho] * dt / scale, all in kW and $/kWh.
double lsa_reward(double sales_kw, double retail_price, double buyback_kw, double buyback_price,
                  double procured_kw, double rho, double dt, double scale = 1.0);

// Power bought back from sellers in one interval.
double energy_bought(const std::vector<double>& user_loads);

// Hourly wind data indexed by simulation day.
class WindCalendar {
 public:
  WindCalendar() = default;
  // `first_hour` is the first hour a simulated day may start at; it is
  // raised so at least `lookback` hours of history precede every day.
  WindCalendar(Matrix hourly, std::size_t lookback, std::size_t first_hour, double p_max);

  std::size_t days() const { return days_; }
  std::size_t lookback() const { return lookback_; }
  const Matrix& hourly() const { return hourly_; }
  std::size_t day_start(std::int64_t day) const;

  std::vector<double> actual(std::int64_t day) const;  // 24 MW values
  Matrix history(std::int64_t day, std::size_t hour, std::size_t window) const;
  // The 24 observed hours preceding `hour` of `day`.
  std::vector<double> last_24h(std::int64_t day, std::size_t hour) const;

 private:
  Matrix hourly_;
  std::size_t lookback_ = 24;
  std::size_t first_ = 0;
  std::size_t days_ = 0;
  double p_max_ = 50.0;
};

enum class ForecastMode { lstm, band, perfect };
std::string to_string(ForecastMode m);
ForecastMode forecast_mode_from_string(const std::string& s);

// Wind forecasts for one day: row h is the 24-hour forecast issued at hour h.
struct DayForecasts {
  Matrix issued;
  std::vector<double> actual;
  const double* at_hour(std::size_t h) const;
  std::vector<double> row(std::size_t h) const;
};

DayForecasts make_day_forecasts(const WindCalendar& wind, std::int64_t day, ForecastMode mode,
                                const forecast::Forecaster* forecaster, double band_margin);

// Everything exogenous an episode needs, keyed by day for common random numbers.
struct Exogenous {
  DayProfile profile;
  DayForecasts forecasts;
  std::vector<double> wind_actual;  // 24 hourly MW
};

class ExogenousSource {
 public:
  ExogenousSource(EnvConfig config, WindCalendar wind, std::uint64_t seed, ForecastMode mode,
                  std::shared_ptr<const forecast::Forecaster> forecaster);

  const Exogenous& day(std::int64_t d) const;
  std::int64_t wind_day(std::int64_t d) const;
  const WindCalendar& wind() const { return wind_; }
  ForecastMode mode() const { return mode_; }
  std::uint64_t seed() const { return seed_; }

 private:
  EnvConfig config_;
  WindCalendar wind_;
  std::uint64_t seed_;
  ForecastMode mode_;
  std::shared_ptr<const forecast::Forecaster> forecaster_;
  mutable std::map<std::int64_t, Exogenous> cache_;
  mutable std::map<std::int64_t, DayForecasts> forecast_cache_;
};

struct StepRecord {
  std::size_t step = 0;
  retail::PriceSignal price;
  std::vector<double> demand;      // prosumers then consumers, kW
  std::vector<double> pv;          // prosumers
  std::vector<double> soc_before;  // prosumers
  std::vector<double> soc_after;
  std::vector<double> b_requested;
  std::vector<double> b;
  std::vector<double> net_load;  // prosumers then consumers
  retail::Settlement settlement;
  double l_da = 0.0;        // kW
  double l_dispatched = 0.0;  // kW, max(L_D, 0)
  double rho_da = 0.0;      // $/MWh
  double rho_rt = 0.0;
  double wind_available = 0.0;  // MW
  double demand_mw = 0.0;
  market::DispatchResult dispatch;
  double procurement_cost = 0.0;  // $
  double e_bought = 0.0;          // kW
  double lsa_reward = 0.0;
  std::vector<double> pa_rewards;
  bool surplus = false;
  bool infeasible = false;
  bool terminal = false;
  std::vector<double> lsa_obs;  // raw, before normalization
  std::vector<std::vector<double>> pa_obs;
};

struct EpisodeSummary {
  std::int64_t day = 0;
  std::size_t steps = 0;
  bool truncated = false;
  double retail_revenue = 0.0;
  double buyback_cost = 0.0;
  double total_cost = 0.0;  // two-settlement procurement plus buyback
  double lse_profit = 0.0;
  double lsa_return = 0.0;
  std::vector<double> pa_returns;
  std::vector<double> bills;  // per user, prosumers first
  double mean_prosumer_bill = 0.0;
  double par = 0.0;  // NaN when undefined
  double mean_abs_lmp_gap = 0.0;
};

class MarketEnv {
 public:
  explicit MarketEnv(EnvConfig config);

  // `l_da` is the day-ahead load bid per step in kW.
  void reset(const Exogenous& exo, std::vector<double> l_da);

  std::size_t t() const { return t_; }
  bool done() const { return done_; }
  const EnvConfig& config() const { return config_; }
  const std::vector<market::IntervalClearing>& day_ahead() const { return da_; }
  const std::vector<double>& socs() const { return soc_; }

  std::vector<double> lsa_observation() const;
  // Observations for the price about to be broadcast at step t.
  std::vector<std::vector<double>> pa_observations(const retail::PriceSignal& price) const;

  StepRecord step(const retail::PriceSignal& price, const std::vector<double>& pa_actions);

  const std::vector<StepRecord>& log() const { return log_; }
  EpisodeSummary summary() const;

 private:
  retail::PriceSignal clip_price(const retail::PriceSignal& p) const;

  EnvConfig config_;
  const Exogenous* exo_ = nullptr;
  std::vector<double> l_da_;
  std::vector<market::IntervalClearing> da_;
  std::vector<double> soc_;
  std::vector<double> sell_hist_, buy_hist_, rho_da_hist_, rho_rt_hist_;
  double last_l_rt_ = 0.0;
  double last_e_ = 0.0;
  std::optional<std::vector<double>> prev_outputs_;
  std::size_t t_ = 0;
  bool done_ = false;
  std::vector<StepRecord> log_;
};

bool step_is_consistent(const StepRecord& r, double rel_tol);

void write_episode_log_csv(const std::string& path, const std::vector<StepRecord>& rows);
std::vector<StepRecord> read_episode_log_csv(const std::string& path);
std::vector<retail::LedgerRow> ledger_rows(const std::vector<StepRecord>& rows);

struct PricingPolicy {
  std::string name = "dynamic";
  bool learned = true;              // LSA is a DDPG agent
  std::vector<double> schedule;     // steps values, $/kWh, when not learned
  ForecastMode forecast = ForecastMode::lstm;
};

// Reference LSA hyperparameters. The PA reference values are the
// AgentConfig defaults.
ddpg::AgentConfig reference_lsa_agent();

struct TrainingConfig {
  std::size_t episodes = 4000;
  std::size_t eval_days = 100;
  std::size_t checkpoint_every = 0;
  std::string checkpoint_dir;
  ddpg::AgentConfig lsa = reference_lsa_agent();
  ddpg::AgentConfig pa;
};

nlohmann::json to_json(const TrainingConfig& c);
TrainingConfig training_config_from_json(const nlohmann::json& j);

struct EpisodeMetrics {
  std::size_t episode = 0;
  EpisodeSummary summary;
  double lsa_noise = 0.0;
  double pa_noise = 0.0;
  std::uint64_t lsa_updates = 0;
  std::uint64_t pa_updates = 0;
};

void write_metrics_csv(const std::string& path, const std::vector<EpisodeMetrics>& rows);

// LSA and PA agents stepping one environment; one episode per simulated day.
class Trainer {
 public:
  Trainer(EnvConfig env, TrainingConfig training, PricingPolicy policy,
          std::shared_ptr<const ExogenousSource> source, std::uint64_t seed);

  // Day of episode e.
  static std::int64_t episode_day(std::size_t e) { return static_cast<std::int64_t>(e) + 1; }

  // Runs the next episode and advances the episode counter.
  EpisodeMetrics run_episode(bool learn, bool explore, std::vector<StepRecord>* log = nullptr);
  // Runs one episode on an explicit day without advancing the counter.
  EpisodeMetrics run_day(std::int64_t day, bool learn, bool explore, std::vector<StepRecord>* log = nullptr);
  std::size_t episode() const { return episode_; }

  const EnvConfig& env_config() const { return env_; }
  const TrainingConfig& training_config() const { return training_; }
  const PricingPolicy& policy() const { return policy_; }
  const std::optional<ddpg::Agent>& lsa() const { return lsa_; }
  const std::vector<ddpg::Agent>& pas() const { return pas_; }

  nlohmann::json to_json() const;
  void load_state(const nlohmann::json& j);

  // Copy of this trainer reading a different exogenous source.
  std::unique_ptr<Trainer> clone_with_source(std::shared_ptr<const ExogenousSource> source) const;

 private:
  retail::PriceSignal lsa_price(const std::vector<double>& obs_norm, bool explore, double noise);
  std::vector<double> next_l_da(std::int64_t day);

  EnvConfig env_;
  TrainingConfig training_;
  PricingPolicy policy_;
  std::shared_ptr<const ExogenousSource> source_;
  std::uint64_t seed_;
  std::optional<ddpg::Agent> lsa_;
  std::vector<ddpg::Agent> pas_;
  ObservationNormalizer lsa_norm_;
  std::vector<ObservationNormalizer> pa_norm_;
  Rng lsa_rng_;
  std::vector<Rng> pa_rng_;
  std::size_t episode_ = 0;
  std::vector<double> last_load_;
};

using EpisodeCallback = std::function<void(const EpisodeMetrics&, const Trainer&)>;

struct TrainingResult {
  std::vector<EpisodeMetrics> history;
  std::unique_ptr<Trainer> trainer;
};

// Runs `training.episodes` learning episodes. Errors are rethrown with the
// episode and step where they occurred.
TrainingResult run_training(const EnvConfig& env, const TrainingConfig& training, const PricingPolicy& policy,
                            std::shared_ptr<const ExogenousSource> source, std::uint64_t seed,
                            const EpisodeCallback& on_episode = {});

// Mean over a trailing window of per-episode values.
std::vector<double> smooth(const std::vector<double>& values, std::size_t window);

}  // namespace gridmarl::env
