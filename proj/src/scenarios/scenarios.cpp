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
#include <fstream>

#include "gridmarl/errors.hpp"
#include "gridmarl/scenarios.hpp"
#include "gridmarl/text.hpp"

namespace gridmarl::scenarios {

std::string to_string(PolicyKind k) {
  switch (k) {
    case PolicyKind::fixed: return "fixed";
    case PolicyKind::tou: return "tou";
    case PolicyKind::dynamic_ddpg: return "dynamic_ddpg";
    case PolicyKind::dynamic_ddpg_uncertainty_margin: return "dynamic_ddpg_uncertainty_margin";
  }
  return "fixed";
}

nlohmann::json to_json(const TouSpec& s) {
  nlohmann::json blocks = nlohmann::json::array();
  for (const auto& b : s.blocks) blocks.push_back({{"start_hour", b.start_hour}, {"end_hour", b.end_hour}, {"price", b.price}});
  return {{"base_price", s.base_price}, {"blocks", blocks}};
}

TouSpec tou_spec_from_json(const nlohmann::json& j) {
  TouSpec s;
  try {
    s.base_price = j.at("base_price").get<double>();
    for (const auto& b : j.at("blocks")) {
      s.blocks.push_back({b.at("start_hour").get<double>(), b.at("end_hour").get<double>(), b.at("price").get<double>()});
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("tou schedule: ") + e.what());
  }
  for (const auto& b : s.blocks) {
    if (!(b.start_hour >= 0.0 && b.start_hour < b.end_hour && b.end_hour <= 24.0)) {
      throw ConfigError("tou schedule: blocks need 0 <= start_hour < end_hour <= 24");
    }
  }
  return s;
}

nlohmann::json to_json(const ScenarioSettings& s) {
  nlohmann::json j = {{"tou_a", to_json(s.tou_a)}, {"tou_b", to_json(s.tou_b)}};
  j["fixed_price"] = s.fixed_price ? nlohmann::json(*s.fixed_price) : nlohmann::json(nullptr);
  return j;
}

ScenarioSettings scenario_settings_from_json(const nlohmann::json& j) {
  ScenarioSettings s;
  if (j.contains("tou_a")) s.tou_a = tou_spec_from_json(j.at("tou_a"));
  if (j.contains("tou_b")) s.tou_b = tou_spec_from_json(j.at("tou_b"));
  if (j.contains("fixed_price") && !j.at("fixed_price").is_null()) {
    if (!j.at("fixed_price").is_number()) throw ConfigError("scenarios: fixed_price must be a number");
    s.fixed_price = j.at("fixed_price").get<double>();
  }
  return s;
}

std::vector<double> tou_schedule(const TouSpec& spec, std::size_t steps) {
  if (steps == 0) throw InvalidArgument("tou_schedule: steps must be positive");
  std::vector<double> out(steps, spec.base_price);
  const double step_h = 24.0 / static_cast<double>(steps);
  for (std::size_t t = 0; t < steps; ++t) {
    const double h = static_cast<double>(t) * step_h;
    for (const auto& b : spec.blocks) {
      if (h >= b.start_hour - 1e-9 && h < b.end_hour - 1e-9) out[t] = b.price;
    }
  }
  return out;
}

double fixed_price(const ScenarioSettings& s, std::size_t steps) {
  if (s.fixed_price) return *s.fixed_price;
  const auto sched = tou_schedule(s.tou_a, steps);
  double sum = 0.0;
  for (double v : sched) sum += v;
  return sum / static_cast<double>(steps);
}

env::PricingPolicy PricingPolicy::to_env() const {
  env::PricingPolicy p;
  p.name = name;
  switch (kind) {
    case PolicyKind::fixed:
    case PolicyKind::tou:
      p.learned = false;
      p.schedule = schedule;
      break;
    case PolicyKind::dynamic_ddpg:
      p.forecast = env::ForecastMode::lstm;
      break;
    case PolicyKind::dynamic_ddpg_uncertainty_margin:
      p.forecast = env::ForecastMode::band;
      break;
  }
  return p;
}

const std::vector<std::string>& scenario_names() {
  static const std::vector<std::string> names{"fixed", "tou_a", "tou_b", "dynamic", "dynamic_band"};
  return names;
}

PricingPolicy make_policy(const std::string& name, const ScenarioSettings& settings, std::size_t steps) {
  PricingPolicy p;
  p.name = name;
  if (name == "fixed") {
    p.kind = PolicyKind::fixed;
    p.schedule.assign(steps, fixed_price(settings, steps));
  } else if (name == "tou_a") {
    p.kind = PolicyKind::tou;
    p.schedule = tou_schedule(settings.tou_a, steps);
  } else if (name == "tou_b") {
    p.kind = PolicyKind::tou;
    p.schedule = tou_schedule(settings.tou_b, steps);
  } else if (name == "dynamic") {
    p.kind = PolicyKind::dynamic_ddpg;
  } else if (name == "dynamic_band") {
    p.kind = PolicyKind::dynamic_ddpg_uncertainty_margin;
  } else {
    throw ConfigError("unknown scenario '" + name + "' (expected fixed, tou_a, tou_b, dynamic or dynamic_band)");
  }
  return p;
}

nlohmann::json to_json(const ScenarioReport& r) {
  return {{"scenario", r.scenario},     {"days", r.days},           {"first_episode", r.first_episode},
          {"profit_mean", r.profit_mean}, {"profit_std", r.profit_std}, {"par_mean", r.par_mean},
          {"bill_mean", r.bill_mean},   {"lmp_gap_mean", r.lmp_gap_mean}};
}

ScenarioReport summarize(const std::string& scenario, const std::vector<env::EpisodeMetrics>& history,
                         std::size_t days) {
  if (days == 0) throw InvalidArgument("summarize: days must be positive");
  if (history.size() < days) {
    throw InsufficientData("summarize: " + std::to_string(history.size()) + " episodes, need " +
                           std::to_string(days));
  }
  ScenarioReport r;
  r.scenario = scenario;
  r.days = days;
  r.first_episode = history[history.size() - days].episode;
  const auto n = static_cast<double>(days);
  for (std::size_t k = history.size() - days; k < history.size(); ++k) {
    const auto& s = history[k].summary;
    r.profit_mean += s.lse_profit / n;
    r.par_mean += s.par / n;
    r.bill_mean += s.mean_prosumer_bill / n;
    r.lmp_gap_mean += s.mean_abs_lmp_gap / n;
  }
  double var = 0.0;
  for (std::size_t k = history.size() - days; k < history.size(); ++k) {
    const double d = history[k].summary.lse_profit - r.profit_mean;
    var += d * d;
  }
  r.profit_std = days > 1 ? std::sqrt(var / (n - 1.0)) : 0.0;
  return r;
}

ScenarioRun run_scenario(const PricingPolicy& policy, const env::EnvConfig& env,
                         const env::TrainingConfig& training, std::shared_ptr<const env::ExogenousSource> source,
                         std::uint64_t seed, std::size_t days, const env::EpisodeCallback& on_episode) {
  auto res = env::run_training(env, training, policy.to_env(), std::move(source), seed, on_episode);
  ScenarioRun run;
  run.report = summarize(policy.name, res.history, std::min(days, res.history.size()));
  run.history = std::move(res.history);
  run.trainer = std::move(res.trainer);
  return run;
}

ScenarioReport run_baseline(const PricingPolicy& policy, const env::EnvConfig& env,
                            const env::TrainingConfig& training, std::shared_ptr<const env::ExogenousSource> source,
                            std::uint64_t seed, std::size_t days, const env::Trainer* trained) {
  if (policy.kind == PolicyKind::fixed || policy.kind == PolicyKind::tou) {
    return run_scenario(policy, env, training, std::move(source), seed, days).report;
  }
  if (trained == nullptr || !trained->lsa()) {
    throw StateError("scenario '" + policy.name + "' needs trained agents; run train-agents first");
  }
  auto eval = trained->clone_with_source(std::move(source));
  std::vector<env::EpisodeMetrics> history;
  for (std::size_t k = 0; k < days; ++k) history.push_back(eval->run_episode(false, false));
  return summarize(policy.name, history, days);
}

ComparisonTable compare_scenarios(const std::vector<ScenarioReport>& reports) {
  if (reports.size() < 2) throw InvalidArgument("compare_scenarios: need at least two reports");
  for (const auto& r : reports) {
    if (r.days != reports.front().days || r.first_episode != reports.front().first_episode) {
      throw InvalidArgument("compare_scenarios: report '" + r.scenario +
                            "' covers a different evaluation window than '" + reports.front().scenario + "'");
    }
  }
  std::vector<ScenarioReport> sorted = reports;
  std::stable_sort(sorted.begin(), sorted.end(), [](const ScenarioReport& a, const ScenarioReport& b) {
    if (a.profit_mean != b.profit_mean) return a.profit_mean > b.profit_mean;
    return a.scenario < b.scenario;
  });
  ComparisonTable t;
  for (const auto& r : sorted) {
    ComparisonRow row;
    row.report = r;
    for (const auto& other : sorted) row.profit_ratio.push_back(r.profit_mean / other.profit_mean);
    t.rows.push_back(std::move(row));
  }
  return t;
}

void write_scenarios_csv(const std::string& path, const ComparisonTable& table) {
  std::ofstream f(path);
  if (!f) throw IoError("cannot open '" + path + "' for writing");
  f << "scenario,profit_mean,profit_std,par_mean,bill_mean,days\n";
  for (const auto& row : table.rows) {
    const auto& r = row.report;
    f << r.scenario << ',' << text::format_double(r.profit_mean) << ',' << text::format_double(r.profit_std) << ','
      << text::format_double(r.par_mean) << ',' << text::format_double(r.bill_mean) << ',' << r.days << '\n';
  }
  if (!f) throw IoError("write failed for '" + path + "'");
}

nlohmann::json to_json(const ComparisonTable& table) {
  nlohmann::json rows = nlohmann::json::array();
  nlohmann::json names = nlohmann::json::array();
  for (const auto& row : table.rows) names.push_back(row.report.scenario);
  for (const auto& row : table.rows) {
    nlohmann::json j = to_json(row.report);
    nlohmann::json ratios = nlohmann::json::object();
    for (std::size_t k = 0; k < table.rows.size(); ++k) {
      ratios[table.rows[k].report.scenario] = row.profit_ratio[k];
    }
    j["profit_ratio_vs"] = ratios;
    rows.push_back(j);
  }
  return {{"units", {{"profit", "aggregate LSE $/day"}, {"bill", "mean prosumer $/day"}, {"lmp_gap", "$/MWh"}}},
          {"order", names},
          {"rows", rows}};
}

namespace {

CaseReport evaluate_case(const std::string& name, env::ForecastMode mode, const env::EnvConfig& env,
                         const env::TrainingConfig& training, const env::WindCalendar& wind,
                         std::shared_ptr<const forecast::Forecaster> forecaster, const PricingPolicy& policy,
                         const std::vector<std::int64_t>& days, std::uint64_t seed, const env::Trainer* trained) {
  auto source = std::make_shared<env::ExogenousSource>(env, wind, seed, mode, std::move(forecaster));
  std::unique_ptr<env::Trainer> trainer;
  if (trained != nullptr) {
    trainer = trained->clone_with_source(source);
  } else {
    if (policy.kind != PolicyKind::fixed && policy.kind != PolicyKind::tou) {
      throw StateError("case comparison with a dynamic policy needs trained agents");
    }
    trainer = std::make_unique<env::Trainer>(env, training, policy.to_env(), source, seed);
  }
  CaseReport r;
  r.name = name;
  r.forecast = mode;
  r.days = days;
  const auto n = static_cast<double>(days.size());
  for (auto d : days) {
    const auto m = trainer->run_day(d, false, false);
    r.day_lmp_gap.push_back(m.summary.mean_abs_lmp_gap);
    r.lmp_gap_mean += m.summary.mean_abs_lmp_gap / n;
    r.par_mean += m.summary.par / n;
    r.profit_mean += m.summary.lse_profit / n;
  }
  return r;
}

nlohmann::json case_json(const CaseReport& r) {
  return {{"name", r.name},
          {"forecast", env::to_string(r.forecast)},
          {"days", r.days},
          {"day_lmp_gap", r.day_lmp_gap},
          {"lmp_gap_mean", r.lmp_gap_mean},
          {"par_mean", r.par_mean},
          {"profit_mean", r.profit_mean}};
}

}  // namespace

PairedCaseReport run_case_comparison(const env::EnvConfig& env, const env::TrainingConfig& training,
                                     const env::WindCalendar& wind,
                                     std::shared_ptr<const forecast::Forecaster> forecaster,
                                     const PricingPolicy& policy, const std::vector<std::int64_t>& days,
                                     std::uint64_t seed, const env::Trainer* trained) {
  if (days.empty()) throw InvalidArgument("run_case_comparison: no days given");
  if (!forecaster) throw StateError("run_case_comparison: the LSTM case needs a trained forecaster");
  PairedCaseReport out;
  out.band = evaluate_case("uncertainty_margin", env::ForecastMode::band, env, training, wind, forecaster, policy,
                           days, seed, trained);
  out.lstm = evaluate_case("lstm_engine", env::ForecastMode::lstm, env, training, wind, forecaster, policy, days,
                           seed, trained);
  return out;
}

nlohmann::json to_json(const PairedCaseReport& r) {
  return {{"uncertainty_margin", case_json(r.band)}, {"lstm_engine", case_json(r.lstm)}};
}

}  // namespace gridmarl::scenarios
