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


#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <string>

#include "env_fixtures.hpp"
#include "gridmarl/errors.hpp"
#include "gridmarl/scenarios.hpp"

using namespace gridmarl;
using namespace gridmarl::scenarios;

namespace {

ScenarioReport report(const std::string& name, double profit, std::size_t days = 100) {
  ScenarioReport r;
  r.scenario = name;
  r.days = days;
  r.profit_mean = profit;
  r.par_mean = 1.5;
  return r;
}

// Hourly features whose active power repeats exactly every day.
nn::Matrix periodic_hourly(std::size_t days) {
  nn::Matrix m(static_cast<Eigen::Index>(days * 24), 4);
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    const double h = static_cast<double>(r % 24);
    const double power = 22.0 + 15.0 * std::sin(2.0 * M_PI * (h - 9.0) / 24.0);
    m.row(r) << 8.0, 200.0, 12.0, power;
  }
  return m;
}

std::vector<env::StepRecord> rollout(const PricingPolicy& p, const env::EnvConfig& c,
                                     std::shared_ptr<const env::ExogenousSource> source, std::int64_t day,
                                     env::EpisodeSummary* summary = nullptr) {
  env::Trainer trainer(c, gridmarl::testing::small_training(1), p.to_env(), std::move(source), 5);
  std::vector<env::StepRecord> log;
  const auto m = trainer.run_day(day, false, false, &log);
  if (summary) *summary = m.summary;
  return log;
}

}  // namespace

TEST_SUITE("schedules") {
  TEST_CASE("fixed policy passes its price through") {
    ScenarioSettings s;
    s.fixed_price = 0.125;
    const auto p = make_policy("fixed", s, 96);
    env::EnvConfig c;
    for (const auto& r : rollout(p, c, gridmarl::testing::synthetic_source(c, 3), 2)) {
      CHECK(r.price.sell == 0.125);
      CHECK(r.price.buy == 0.125);
    }
  }

  TEST_CASE("default fixed price is the mean of tou_a") {
    ScenarioSettings s;
    // 16 peak steps at 0.16, 80 off-peak steps at 0.08.
    CHECK(fixed_price(s, 96) == doctest::Approx((16 * 0.16 + 80 * 0.08) / 96.0));
  }

  TEST_CASE("tou prices step exactly at the block boundaries") {
    ScenarioSettings s;
    const auto p = make_policy("tou_a", s, 96);
    env::EnvConfig c;
    const auto log = rollout(p, c, gridmarl::testing::synthetic_source(c, 3), 2);
    REQUIRE(log.size() == 96);
    for (std::size_t t = 0; t < 96; ++t) {
      const bool peak = t >= 64 && t < 80;
      CHECK(log[t].price.sell == (peak ? 0.16 : 0.08));
    }
  }

  TEST_CASE("tou_b levels") {
    ScenarioSettings s;
    const auto sched = tou_schedule(s.tou_b, 96);
    CHECK(sched[47] == 0.07);
    CHECK(sched[48] == 0.13);
    CHECK(sched[63] == 0.13);
    CHECK(sched[64] == 0.19);
    CHECK(sched[83] == 0.19);
    CHECK(sched[84] == 0.13);
    CHECK(sched[91] == 0.13);
    CHECK(sched[92] == 0.07);
  }

  TEST_CASE("every built-in schedule stays within the price bounds") {
    ScenarioSettings s;
    for (const auto& name : {"fixed", "tou_a", "tou_b"}) {
      const auto p = make_policy(name, s, 96);
      REQUIRE(p.schedule.size() == 96);
      for (double v : p.schedule) {
        CHECK(v >= 0.05);
        CHECK(v <= 0.20);
      }
    }
  }

  TEST_CASE("unknown scenario names are rejected") {
    CHECK_THROWS_AS(make_policy("flat", ScenarioSettings{}, 96), ConfigError);
  }

  TEST_CASE("tou blocks must be ordered hours") {
    CHECK_THROWS_AS(tou_spec_from_json({{"base_price", 0.1}, {"blocks", {{{"start_hour", 20}, {"end_hour", 16},
                                                                           {"price", 0.15}}}}}),
                    ConfigError);
  }
}

TEST_SUITE("common random numbers") {
  TEST_CASE("scenarios see identical exogenous realizations") {
    env::EnvConfig c;
    const auto source = gridmarl::testing::synthetic_source(c, 13);
    ScenarioSettings s;
    const auto a = rollout(make_policy("fixed", s, 96), c, source, 4);
    const auto b = rollout(make_policy("tou_b", s, 96), c, source, 4);
    REQUIRE(a.size() == b.size());
    for (std::size_t t = 0; t < a.size(); ++t) {
      CHECK(a[t].demand == b[t].demand);
      CHECK(a[t].pv == b[t].pv);
      CHECK(a[t].wind_available == b[t].wind_available);
      CHECK(a[t].rho_da == b[t].rho_da);
    }
  }

  TEST_CASE("separately built sources agree bitwise") {
    env::EnvConfig c;
    const auto s1 = gridmarl::testing::synthetic_source(c, 17);
    const auto s2 = gridmarl::testing::synthetic_source(c, 17);
    for (std::int64_t d : {1, 5, 12}) {
      const auto& x = s1->day(d);
      const auto& y = s2->day(d);
      CHECK(x.profile.prosumer_demand == y.profile.prosumer_demand);
      CHECK(x.profile.consumer_demand == y.profile.consumer_demand);
      CHECK(x.profile.pv == y.profile.pv);
      CHECK(x.profile.sunny == y.profile.sunny);
      CHECK(x.wind_actual == y.wind_actual);
      CHECK(x.forecasts.issued == y.forecasts.issued);
    }
  }

  TEST_CASE("a forecast equal to the realized wind gives identical case reports") {
    env::EnvConfig c;
    c.band_margin = 0.0;
    env::WindCalendar wind(periodic_hourly(10), 24, 0, c.market.wind.p_max);
    const auto band = std::make_shared<const env::ExogenousSource>(c, wind, 4, env::ForecastMode::band, nullptr);
    const auto perfect =
        std::make_shared<const env::ExogenousSource>(c, wind, 4, env::ForecastMode::perfect, nullptr);
    const auto p = make_policy("tou_a", ScenarioSettings{}, 96);
    for (std::int64_t d : {2, 3, 6}) {
      CHECK(band->day(d).forecasts.issued == perfect->day(d).forecasts.issued);
      env::EpisodeSummary a, b;
      rollout(p, c, band, d, &a);
      rollout(p, c, perfect, d, &b);
      CHECK(a.lse_profit == b.lse_profit);
      CHECK(a.par == b.par);
      CHECK(a.mean_abs_lmp_gap == b.mean_abs_lmp_gap);
      CHECK(a.bills == b.bills);
    }
  }

  TEST_CASE("a perfect forecast with matching loads adds no deficiency cost") {
    env::EnvConfig c;
    const auto source = gridmarl::testing::synthetic_source(c, 19);
    const auto& x = source->day(3);
    env::MarketEnv env(c);
    const auto l_da = env::idle_net_load(x.profile);
    env.reset(x, l_da);
    double da_cost = 0.0, buyback = 0.0;
    while (!env.done()) {
      const auto r = env.step({0.1, 0.1}, {0.0, 0.0, 0.0});
      da_cost += std::max(0.0, r.l_da) * r.rho_da / 1000.0 * c.dt;
      buyback += r.settlement.buyback_kw * r.price.sell * c.dt;
    }
    const auto s = env.summary();
    CHECK(s.total_cost == doctest::Approx(da_cost + buyback).epsilon(1e-12));
  }
}

TEST_SUITE("reports") {
  TEST_CASE("profit ratio from the published scenario profits") {
    const auto t = compare_scenarios({report("tou_evergy", 5.846), report("dynamic_lstm", 10.853)});
    REQUIRE(t.rows.size() == 2);
    CHECK(t.rows[0].report.scenario == "dynamic_lstm");
    CHECK(t.rows[0].profit_ratio[1] == doctest::Approx(1.856).epsilon(3e-4));
    CHECK(t.rows[1].profit_ratio[0] == doctest::Approx(5.846 / 10.853));
    CHECK(t.rows[0].profit_ratio[0] == 1.0);
  }

  TEST_CASE("duplicated report has ratio one") {
    const auto t = compare_scenarios({report("fixed", 3.0), report("fixed", 3.0)});
    CHECK(t.rows[0].profit_ratio[1] == 1.0);
  }

  TEST_CASE("ties sort by scenario name") {
    const auto t = compare_scenarios({report("tou_b", 2.0), report("fixed", 4.0), report("tou_a", 2.0)});
    CHECK(t.rows[0].report.scenario == "fixed");
    CHECK(t.rows[1].report.scenario == "tou_a");
    CHECK(t.rows[2].report.scenario == "tou_b");
  }

  TEST_CASE("comparison needs two reports over the same window") {
    CHECK_THROWS_AS(compare_scenarios({report("fixed", 1.0)}), InvalidArgument);
    CHECK_THROWS_AS(compare_scenarios({report("fixed", 1.0, 100), report("tou_a", 2.0, 50)}), InvalidArgument);
  }

  TEST_CASE("scenarios csv") {
    const auto t = compare_scenarios({report("fixed", 1.0), report("tou_a", 2.0), report("dynamic", 3.0)});
    const auto dir = std::filesystem::temp_directory_path() / "gridmarl_test_scenarios";
    std::filesystem::create_directories(dir);
    const auto path = (dir / "scenarios.csv").string();
    write_scenarios_csv(path, t);
    std::ifstream f(path);
    std::string line;
    std::getline(f, line);
    CHECK(line == "scenario,profit_mean,profit_std,par_mean,bill_mean,days");
    std::vector<std::string> rows;
    while (std::getline(f, line)) rows.push_back(line);
    REQUIRE(rows.size() == 3);
    CHECK(rows[0].rfind("dynamic,", 0) == 0);
    CHECK(rows[2].rfind("fixed,", 0) == 0);
    std::filesystem::remove_all(dir);

    const auto j = to_json(t);
    CHECK(j.at("order").size() == 3);
    CHECK(j.at("rows")[0].at("profit_ratio_vs").at("fixed") == doctest::Approx(3.0));
  }

  TEST_CASE("summaries average the final window") {
    std::vector<env::EpisodeMetrics> h(10);
    for (std::size_t k = 0; k < h.size(); ++k) {
      h[k].episode = k;
      h[k].summary.lse_profit = static_cast<double>(k);
      h[k].summary.par = 2.0;
    }
    const auto r = summarize("fixed", h, 4);
    CHECK(r.days == 4);
    CHECK(r.first_episode == 6);
    CHECK(r.profit_mean == doctest::Approx(7.5));
    CHECK(r.par_mean == doctest::Approx(2.0));
    CHECK_THROWS_AS(summarize("fixed", h, 11), InsufficientData);
  }

  TEST_CASE("dynamic baselines need trained agents") {
    env::EnvConfig c;
    const auto p = make_policy("dynamic", ScenarioSettings{}, 96);
    CHECK_THROWS_AS(run_baseline(p, c, gridmarl::testing::small_training(1),
                                 gridmarl::testing::synthetic_source(c, 1), 1, 1),
                    StateError);
  }

  TEST_CASE("baseline reports cover the requested window and keep par at least one") {
    env::EnvConfig c;
    const auto source = gridmarl::testing::synthetic_source(c, 23);
    const auto r = run_baseline(make_policy("tou_a", ScenarioSettings{}, 96), c,
                                gridmarl::testing::small_training(4), source, 23, 2);
    CHECK(r.scenario == "tou_a");
    CHECK(r.days == 2);
    CHECK(r.first_episode == 2);
    CHECK(r.par_mean >= 1.0);
  }

  TEST_CASE("case comparison reports the lmp gap of both cases") {
    env::EnvConfig c;
    env::WindCalendar wind(gridmarl::testing::synthetic_hourly(12, 29), 24, 0, c.market.wind.p_max);
    forecast::ForecasterConfig fc;
    fc.hidden_sizes = {4};
    fc.epochs = 1;
    const auto split = forecast::make_windows(wind.hourly(), 24, 24, 0.8);
    const auto model = std::make_shared<const forecast::Forecaster>(forecast::Forecaster::train(split.train, fc));
    const auto p = make_policy("fixed", ScenarioSettings{}, 96);
    const auto r = run_case_comparison(c, gridmarl::testing::small_training(1), wind, model, p, {3, 4}, 29);
    CHECK(r.band.day_lmp_gap.size() == 2);
    CHECK(r.lstm.day_lmp_gap.size() == 2);
    const auto j = to_json(r);
    CHECK(j.at("uncertainty_margin").contains("lmp_gap_mean"));
    CHECK(j.at("lstm_engine").contains("lmp_gap_mean"));
    CHECK_THROWS_AS(run_case_comparison(c, gridmarl::testing::small_training(1), wind, nullptr, p, {3}, 29),
                    StateError);
  }
}
