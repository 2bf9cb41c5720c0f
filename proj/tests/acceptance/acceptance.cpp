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


// Prints one PASS/FAIL line per acceptance criterion. With arguments, runs
// only the listed criteria. Exit status is the number of failures.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "checks.hpp"
#include "env_fixtures.hpp"
#include "gridmarl/commands.hpp"
#include "gridmarl/config.hpp"
#include "gridmarl/market.hpp"
#include "gridmarl/retail.hpp"
#include "gridmarl/scenarios.hpp"

namespace {

using namespace gridmarl;
namespace t = gridmarl::testing;
namespace fs = std::filesystem;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), f, a);
  return buf;
}

// ---- 1: dispatch against grid search ----
Outcome dispatch_oracle() {
  const auto m = market::default_market();
  std::mt19937_64 rng(2026);
  std::uniform_real_distribution<double> demand(0.0, 115.0), wind(0.0, 50.0);
  std::vector<std::pair<double, double>> cases{{20.0, 0.0}, {10.0, 0.0}, {10.0, 30.0}};
  for (int k = 0; k < 200; ++k) cases.emplace_back(demand(rng), wind(rng));
  double worst_cost = 0.0, worst_lmp = 0.0;
  for (const auto& [d, w] : cases) {
    const auto r = market::economic_dispatch(d, w, m);
    const auto o = t::grid_oracle(d, w);
    worst_cost = std::max(worst_cost, std::abs(r.total_cost - o.cost));
    worst_lmp = std::max(worst_lmp, std::abs(r.lmp - o.lmp));
  }
  const bool worked = std::abs(market::economic_dispatch(20.0, 0.0, m).lmp - 18.5) < 1e-6 &&
                      std::abs(market::economic_dispatch(10.0, 0.0, m).lmp - 14.0) < 1e-6 &&
                      std::abs(market::economic_dispatch(10.0, 30.0, m).lmp - 5.0) < 1e-6;
  return {worked && worst_cost < 1e-3 && worst_lmp < 1e-3,
          std::to_string(cases.size()) + " cases, worst cost err " + fmt("%.2e", worst_cost) + " $, worst lmp err " +
              fmt("%.2e", worst_lmp) + ", worked cases " + (worked ? "ok" : "wrong")};
}

// ---- 2: gradients against central differences ----
Outcome gradients() {
  struct Check {
    std::string name;
    std::function<double(std::uint64_t)> worst;
    double limit;
  };
  const std::vector<Check> checks{
      {"mlp", t::mlp_fd_worst, 1e-4},
      {"lstm cell", t::lstm_cell_fd_worst, 1e-4},
      {"stacked lstm", [](std::uint64_t s) { return t::sequence_fd_worst(nn::CellKind::lstm, {5, 4}, 6, s); }, 1e-4},
      {"gru", [](std::uint64_t s) { return t::sequence_fd_worst(nn::CellKind::gru, {5, 4}, 6, s); }, 1e-4},
      {"rnn", [](std::uint64_t s) { return t::sequence_fd_worst(nn::CellKind::rnn, {5, 4}, 6, s); }, 1e-4},
      {"batchnorm", t::batchnorm_fd_worst, 1e-4},
      {"actor through critic", t::composed_fd_worst, 1e-3}};
  bool pass = true;
  std::string detail;
  for (const auto& c : checks) {
    double worst = 0.0;
    for (std::uint64_t seed = 1; seed <= 20; ++seed) worst = std::max(worst, c.worst(seed));
    pass = pass && worst < c.limit;
    detail += (detail.empty() ? "" : ", ") + c.name + " " + fmt("%.1e", worst);
  }
  return {pass, "20 seeds each, worst rel err: " + detail};
}

// ---- 3: DDPG on a quadratic bowl ----
Outcome ddpg_bowl() {
  bool pass = true;
  std::string detail;
  for (std::uint64_t seed = 1; seed <= 3; ++seed) {
    const double mu = t::bowl_greedy_action(seed, 2000);
    pass = pass && std::abs(mu - 0.7) < 0.05;
    detail += (detail.empty() ? "mu = " : ", ") + fmt("%.4f", mu);
  }
  return {pass, detail + " (target 0.7 +/- 0.05, 2000 steps)"};
}

// ---- 4: ledger closure and power balance ----
Outcome accounting() {
  env::EnvConfig c;
  const auto source = t::synthetic_source(c, 4, 60);
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> price(c.price_min, c.price_max);
  std::uniform_real_distribution<double> action(-3.0, 3.0);
  env::MarketEnv e(c);
  std::size_t steps = 0, bad_steps = 0, bad_returns = 0;
  for (std::int64_t day = 1; day <= 50; ++day) {
    const auto& x = source->day(day);
    e.reset(x, env::idle_net_load(x.profile));
    while (!e.done()) {
      const double p = price(rng);
      std::vector<double> b(c.profiles.prosumers);
      for (auto& v : b) v = action(rng);
      const auto r = e.step({p, p}, b);
      ++steps;
      if (!env::step_is_consistent(r, 1e-9)) ++bad_steps;
    }
    const auto s = e.summary();
    for (std::size_t i = 0; i < c.profiles.prosumers; ++i)
      if (s.pa_returns[i] != -s.bills[i]) ++bad_returns;
  }
  return {bad_steps == 0 && bad_returns == 0,
          "50 episodes, " + std::to_string(steps) + " steps, " + std::to_string(bad_steps) +
              " unbalanced, " + std::to_string(bad_returns) + " return/bill mismatches"};
}

// ---- 5: battery fuzz ----
Outcome battery() {
  const retail::BatterySpec s;
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> act(-5.0, 5.0), power(0.0, 2.0), start(0.1, 0.9);
  double soc = s.soc0, lo = soc, hi = soc, round_trip = 0.0;
  for (int k = 0; k < 10000; ++k) {
    soc = retail::battery_step(s, soc, act(rng), 0.25).new_soc;
    lo = std::min(lo, soc);
    hi = std::max(hi, soc);
    const double s0 = start(rng);
    const auto charge = retail::battery_step(s, s0, -power(rng), 0.25);
    const auto back = retail::battery_step(s, charge.new_soc, -charge.effective_b, 0.25);
    round_trip = std::max(round_trip, std::abs(back.new_soc - s0));
  }
  return {lo >= s.soc_min && hi <= s.soc_max && round_trip <= 1e-12,
          "10000 steps, soc in [" + fmt("%.4f", lo) + ", " + fmt("%.4f", hi) + "], round trip err " +
              fmt("%.1e", round_trip)};
}

// ---- 6: forecaster floor ----
Outcome forecaster_floor() {
  const double sigma = 1.0;
  const auto split = forecast::make_windows(t::sine_series(24 * 60, sigma, 2), 24, 24, 0.8);
  const auto fc = forecast::Forecaster::train(split.train, t::small_forecaster_config());
  const double rmse = forecast::eval_metrics(fc.predict(split.test), split.test.targets).rmse;
  const double persist =
      forecast::eval_metrics(forecast::persistence_forecast(split.test), split.test.targets).rmse;
  const auto h = forecast::eval_metrics(std::vector<double>{0.0, 0.0}, std::vector<double>{3.0, 4.0});
  const bool triples = std::abs(h.rmse - std::sqrt(12.5)) < 1e-12 && std::abs(h.mae - 3.5) < 1e-12 &&
                       h.mape && std::abs(*h.mape - 100.0) < 1e-9;
  return {rmse <= 1.5 * sigma && rmse < persist && triples,
          "lstm rmse " + fmt("%.3f", rmse) + " (limit " + fmt("%.2f", 1.5 * sigma) + "), persistence " +
              fmt("%.3f", persist) + ", metric triple " + (triples ? "ok" : "wrong")};
}

// ---- 7: architecture ordering ----
Outcome architecture_ordering() {
  std::size_t held = 0;
  std::string detail;
  for (std::uint64_t seed = 1; seed <= 3; ++seed) {
    const auto split = forecast::make_windows(t::lagged_pulse_series(200, seed), 24, 24, 0.8);
    std::vector<double> rmse;
    for (auto cell : {nn::CellKind::lstm, nn::CellKind::gru, nn::CellKind::rnn}) {
      forecast::ForecasterConfig c;
      c.cell = cell;
      c.hidden_sizes = {16, 16};
      c.epochs = 30;
      c.seed = seed;
      const auto fc = forecast::Forecaster::train(split.train, c);
      rmse.push_back(forecast::eval_metrics(fc.predict(split.test), split.test.targets).rmse);
    }
    if (rmse[0] <= rmse[1] && rmse[1] <= rmse[2]) ++held;
    detail += (detail.empty() ? "" : "; ") + std::string("seed ") + std::to_string(seed) + " lstm/gru/rnn " +
              fmt("%.3f", rmse[0]) + "/" + fmt("%.3f", rmse[1]) + "/" + fmt("%.3f", rmse[2]);
  }
  return {held >= 2, std::to_string(held) + "/3 seeds ordered; " + detail};
}

// ---- 8: pricing scenarios end to end ----
Outcome scenario_ordering() {
  const auto pipe = t::preset_pipeline("test", 1);
  const auto& c = pipe.config;
  std::vector<scenarios::ScenarioReport> reports;
  for (const auto& name : scenarios::scenario_names()) {
    const auto policy = scenarios::make_policy(name, c.scenarios, c.env.steps);
    // Each scenario reads its own copy of the same exogenous streams.
    const auto source = std::make_shared<const env::ExogenousSource>(
        c.env, pipe.source->wind(), c.seed, policy.to_env().forecast, pipe.forecaster);
    reports.push_back(scenarios::run_scenario(policy, c.env, c.training, source, c.seed, 50).report);
  }
  auto find = [&](const std::string& name) {
    for (const auto& r : reports)
      if (r.scenario == name) return r;
    return reports.front();
  };
  const auto fixed = find("fixed");
  const auto dynamic = find("dynamic");
  std::string table;
  for (const auto& row : scenarios::compare_scenarios(reports).rows) {
    table += (table.empty() ? "" : ", ") + row.report.scenario + " " + fmt("%.2f", row.report.profit_mean) + " $/" +
             fmt("%.3f", row.report.par_mean);
  }
  const bool profit = dynamic.profit_mean > fixed.profit_mean;
  const bool par = dynamic.par_mean < fixed.par_mean;
  return {profit && par, std::string("profit dynamic > fixed ") + (profit ? "holds" : "fails") +
                             ", PAR dynamic < fixed " + (par ? "holds" : "fails") + "; profit/PAR over the last 50 of " +
                             std::to_string(c.training.episodes) + " episodes: " + table};
}

// ---- 9: persistence band vs trained forecaster ----
// Calendar: 24 h of history, day A taken from the synthetic series, day R
// repeating A, day B whose wind collapses at 18:00, day S staying calm. The
// band forecast is exact on R and carries B's windy hours into S.
void put_hour(nn::Matrix& m, Eigen::Index row, double speed, double hour) {
  const data::WindModelSpec w;
  m.row(row) << speed, 200.0, 12.0 + 6.0 * std::cos(2.0 * M_PI / 24.0 * (hour - 15.0)), data::power_curve(w, speed);
}

Outcome band_vs_forecaster() {
  bool pass = true;
  std::string detail;
  for (std::uint64_t seed = 1; seed <= 3; ++seed) {
    const auto pipe = t::preset_pipeline("test", seed);
    nn::Matrix m(24 * 5, 4);
    const Eigen::Index origin = 24 * 20;
    m.topRows(48) = pipe.hourly.middleRows(origin, 48);
    m.middleRows(48, 24) = pipe.hourly.middleRows(origin + 24, 24);
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> jitter(0.0, 0.3);
    for (int h = 0; h < 24; ++h) put_hour(m, 72 + h, (h < 18 ? 12.0 : 4.5) + jitter(rng), h);
    for (int h = 0; h < 24; ++h) put_hour(m, 96 + h, 4.5 + jitter(rng), h);
    const env::WindCalendar wind(m, 24, 0, pipe.config.forecaster.p_max);
    const auto policy = scenarios::make_policy("fixed", pipe.config.scenarios, pipe.config.env.steps);
    const auto r = scenarios::run_case_comparison(pipe.config.env, pipe.config.training, wind, pipe.forecaster,
                                                  policy, {1, 3}, seed);
    const double band_repeat = r.band.day_lmp_gap[0], lstm_repeat = r.lstm.day_lmp_gap[0];
    const double band_shift = r.band.day_lmp_gap[1], lstm_shift = r.lstm.day_lmp_gap[1];
    pass = pass && band_shift > lstm_shift && band_repeat < band_shift;
    detail += (detail.empty() ? "" : "; ") + std::string("seed ") + std::to_string(seed) + " shift band/lstm " +
              fmt("%.2f", band_shift) + "/" + fmt("%.2f", lstm_shift) + ", repeat band/lstm " +
              fmt("%.2f", band_repeat) + "/" + fmt("%.2f", lstm_repeat);
  }
  return {pass, "mean |rt - da| lmp gap $/MWh: " + detail};
}

// ---- 10: CLI determinism ----
std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>()};
}

Outcome cli_determinism() {
  const auto root = fs::temp_directory_path() / "gridmarl_acceptance_cli";
  fs::remove_all(root);
  fs::create_directories(root);
  {
    std::ofstream f(root / "config.json");
    f << R"({"version": 1, "preset": "test", "training": {"episodes": 4, "eval_days": 2}})";
  }
  std::size_t compared = 0, differing = 0;
  std::string which;
  for (const std::string command : {"train-lstm", "train-agents", "compare"}) {
    data::CommandOptions first;
    first.config_path = (root / "config.json").string();
    first.seed = 11;
    first.out_dir = (root / (command + "_1")).string();
    data::run_command(command, first);
    data::CommandOptions again;
    again.config_path = (fs::path(first.out_dir) / "manifest.json").string();
    again.out_dir = (root / (command + "_2")).string();
    data::run_command(command, again);
    for (const auto& entry : fs::directory_iterator(first.out_dir)) {
      if (entry.path().extension() != ".csv") continue;
      ++compared;
      if (slurp(entry.path()) != slurp(fs::path(again.out_dir) / entry.path().filename())) {
        ++differing;
        which += " " + command + "/" + entry.path().filename().string();
      }
    }
  }
  fs::remove_all(root);
  return {compared > 0 && differing == 0, std::to_string(compared) + " csv files from train-lstm, train-agents and "
                                          "compare rerun from their manifests, " +
                                              std::to_string(differing) + " differ" + which};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"dispatch matches grid search", dispatch_oracle},
      {"gradients match finite differences", gradients},
      {"ddpg converges on a quadratic bowl", ddpg_bowl},
      {"ledger closure and power balance", accounting},
      {"battery state of charge invariants", battery},
      {"forecaster beats the noise floor and persistence", forecaster_floor},
      {"architecture ordering lstm <= gru <= rnn", architecture_ordering},
      {"dynamic pricing vs fixed price", scenario_ordering},
      {"persistence band vs trained forecaster", band_vs_forecaster},
      {"cli reruns are bitwise identical", cli_determinism}};
  std::set<std::size_t> only;
  for (int k = 1; k < argc; ++k) only.insert(static_cast<std::size_t>(std::atoi(argv[k])));
  int failures = 0;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    if (!only.empty() && !only.count(k + 1)) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[k].second();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (!o.pass) ++failures;
    std::printf("criterion %2zu %s  %s (%.1f s): %s\n", k + 1, o.pass ? "PASS" : "FAIL", criteria[k].first.c_str(),
                secs, o.detail.c_str());
    std::fflush(stdout);
  }
  return failures;
}
