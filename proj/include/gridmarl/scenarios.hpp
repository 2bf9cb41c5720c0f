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

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "gridmarl/env.hpp"

namespace gridmarl::scenarios {

enum class PolicyKind { fixed, tou, dynamic_ddpg, dynamic_ddpg_uncertainty_margin };
std::string to_string(PolicyKind k);

// Price `price` applies on [start_hour, end_hour).
struct TouBlock {
  double start_hour = 0.0;
  double end_hour = 0.0;
  double price = 0.0;
};

struct TouSpec {
  double base_price = 0.08;
  std::vector<TouBlock> blocks;
};

nlohmann::json to_json(const TouSpec& s);
TouSpec tou_spec_from_json(const nlohmann::json& j);

struct ScenarioSettings {
  TouSpec tou_a{0.08, {{16.0, 20.0, 0.16}}};
  TouSpec tou_b{0.07, {{12.0, 16.0, 0.13}, {16.0, 21.0, 0.19}, {21.0, 23.0, 0.13}}};
  std::optional<double> fixed_price;  // defaults to the mean of tou_a
};

nlohmann::json to_json(const ScenarioSettings& s);
ScenarioSettings scenario_settings_from_json(const nlohmann::json& j);

std::vector<double> tou_schedule(const TouSpec& spec, std::size_t steps);
double fixed_price(const ScenarioSettings& s, std::size_t steps);

struct PricingPolicy {
  std::string name;
  PolicyKind kind = PolicyKind::fixed;
  std::vector<double> schedule;  // per step, fixed and tou kinds

  env::PricingPolicy to_env() const;
};

// Known names: fixed, tou_a, tou_b, dynamic, dynamic_band.
PricingPolicy make_policy(const std::string& name, const ScenarioSettings& settings, std::size_t steps);
const std::vector<std::string>& scenario_names();

struct ScenarioReport {
  std::string scenario;
  std::size_t days = 0;
  std::size_t first_episode = 0;
  double profit_mean = 0.0;  // aggregate LSE $/day
  double profit_std = 0.0;
  double par_mean = 0.0;
  double bill_mean = 0.0;  // mean prosumer $/day
  double lmp_gap_mean = 0.0;  // $/MWh
};

nlohmann::json to_json(const ScenarioReport& r);

// Averages over the last `days` entries of `history`.
ScenarioReport summarize(const std::string& scenario, const std::vector<env::EpisodeMetrics>& history,
                         std::size_t days);

struct ScenarioRun {
  ScenarioReport report;
  std::vector<env::EpisodeMetrics> history;
  std::unique_ptr<env::Trainer> trainer;
};

// Trains the agents that act under `policy` (the PAs, and the LSA for
// dynamic kinds) and reports the final `days` episodes.
ScenarioRun run_scenario(const PricingPolicy& policy, const env::EnvConfig& env,
                         const env::TrainingConfig& training, std::shared_ptr<const env::ExogenousSource> source,
                         std::uint64_t seed, std::size_t days, const env::EpisodeCallback& on_episode = {});

// Schedule kinds train the prosumers against the schedule and report the
// final `days` episodes. Dynamic kinds need `trained` and roll `days` greedy
// episodes after its training window.
ScenarioReport run_baseline(const PricingPolicy& policy, const env::EnvConfig& env,
                            const env::TrainingConfig& training, std::shared_ptr<const env::ExogenousSource> source,
                            std::uint64_t seed, std::size_t days, const env::Trainer* trained = nullptr);

struct ComparisonRow {
  ScenarioReport report;
  std::vector<double> profit_ratio;  // this profit / each row's profit, in table order
};

struct ComparisonTable {
  std::vector<ComparisonRow> rows;  // profit descending, ties by name
};

ComparisonTable compare_scenarios(const std::vector<ScenarioReport>& reports);
void write_scenarios_csv(const std::string& path, const ComparisonTable& table);
nlohmann::json to_json(const ComparisonTable& table);

struct CaseReport {
  std::string name;
  env::ForecastMode forecast = env::ForecastMode::band;
  std::vector<std::int64_t> days;
  std::vector<double> day_lmp_gap;  // mean |rho_RT - rho_DA| per day, $/MWh
  double lmp_gap_mean = 0.0;
  double par_mean = 0.0;
  double profit_mean = 0.0;
};

struct PairedCaseReport {
  CaseReport band;  // persistence forecast with an uncertainty margin
  CaseReport lstm;
};

// Evaluates both forecasting cases on the same days and exogenous streams.
// Agents act greedily: those of `trained` when given, otherwise freshly
// seeded prosumers under the schedule of `policy`.
PairedCaseReport run_case_comparison(const env::EnvConfig& env, const env::TrainingConfig& training,
                                     const env::WindCalendar& wind,
                                     std::shared_ptr<const forecast::Forecaster> forecaster,
                                     const PricingPolicy& policy, const std::vector<std::int64_t>& days,
                                     std::uint64_t seed, const env::Trainer* trained = nullptr);

nlohmann::json to_json(const PairedCaseReport& r);

}  // namespace gridmarl::scenarios
