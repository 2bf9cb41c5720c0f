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

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>

#include "gridmarl/errors.hpp"
#include "gridmarl/market.hpp"
#include "checks.hpp"

using namespace gridmarl;
using namespace gridmarl::market;

using gridmarl::testing::grid_oracle;

TEST_SUITE("dispatch") {
  TEST_CASE("g1 capped, g2 marginal") {
    auto r = economic_dispatch(20.0, 0.0, default_market());
    CHECK(r.feasible);
    CHECK(r.outputs[0] == doctest::Approx(15.0));
    CHECK(r.outputs[1] == doctest::Approx(5.0));
    CHECK(r.lmp == doctest::Approx(18.5));
    auto o = grid_oracle(20.0, 0.0);
    CHECK(o.lmp == doctest::Approx(18.5).epsilon(1e-4));
  }

  TEST_CASE("g1 alone serves ten megawatts") {
    auto r = economic_dispatch(10.0, 0.0, default_market());
    CHECK(r.outputs[0] == doctest::Approx(10.0));
    CHECK(r.outputs[1] == doctest::Approx(0.0));
    CHECK(r.lmp == doctest::Approx(14.0));
    CHECK(grid_oracle(10.0, 0.0).lmp == doctest::Approx(14.0).epsilon(1e-4));
  }

  TEST_CASE("wind undercuts both units") {
    auto r = economic_dispatch(20.0, 30.0, default_market());
    CHECK(r.wind == doctest::Approx(20.0));
    CHECK(r.outputs[0] == doctest::Approx(0.0));
    CHECK(r.outputs[1] == doctest::Approx(0.0));
    CHECK(r.lmp == doctest::Approx(5.0));
  }

  TEST_CASE("zero demand prices at the cheapest marginal cost") {
    auto r = economic_dispatch(0.0, 10.0, default_market());
    CHECK(r.wind == 0.0);
    CHECK(r.outputs[0] == 0.0);
    CHECK(r.outputs[1] == 0.0);
    CHECK(r.lmp == doctest::Approx(5.0));
    CHECK(r.feasible);
  }

  TEST_CASE("fixed costs are reported but do not steer dispatch") {
    auto r = economic_dispatch(10.0, 0.0, default_market());
    CHECK(r.total_cost == doctest::Approx(100.0 + 10.0 * 10.0 + 0.2 * 100.0 + 200.0));
  }

  TEST_CASE("excess demand is flagged without throwing") {
    auto r = economic_dispatch(200.0, 50.0, default_market());
    CHECK_FALSE(r.feasible);
    CHECK(r.outputs[0] == 15.0);
    CHECK(r.outputs[1] == 100.0);
    CHECK(r.wind == 50.0);
    CHECK(r.lmp == doctest::Approx(15.0 + 0.7 * 100.0));
    CHECK_FALSE(check_power_balance(r, 200.0, 1e-6));
  }

  TEST_CASE("invalid inputs") {
    CHECK_THROWS_AS(economic_dispatch(-1.0, 0.0, default_market()), InvalidArgument);
    CHECK_THROWS_AS(economic_dispatch(1.0, 60.0, default_market()), InvalidArgument);
    CHECK_THROWS_AS(economic_dispatch(1.0, 0.0, default_market(), std::vector<double>{1.0}),
                    DimensionError);
  }

  TEST_CASE("power balance check") {
    auto r = economic_dispatch(20.0, 0.0, default_market());
    CHECK(check_power_balance(r, 20.0, 1e-6));
    r.outputs[0] += 1.0;
    CHECK_FALSE(check_power_balance(r, 20.0, 1e-6));
  }

  TEST_CASE("agrees with the grid-search oracle on 200 random cases") {
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> dd(0.0, 160.0), dw(0.0, 50.0);
    double worst_cost = 0.0, worst_lmp = 0.0;
    int balanced = 0;
    for (int i = 0; i < 200; ++i) {
      const double w = dw(rng);
      const double d = dd(rng) * (115.0 + w) / 160.0;
      auto r = economic_dispatch(d, w, default_market());
      auto o = grid_oracle(d, w);
      REQUIRE(r.feasible);
      worst_cost = std::max(worst_cost, std::abs(r.total_cost - o.cost));
      worst_lmp = std::max(worst_lmp, std::abs(r.lmp - o.lmp));
      if (check_power_balance(r, d, 1e-6)) ++balanced;
    }
    CHECK(worst_cost <= 1e-3);
    CHECK(worst_lmp <= 1e-3);
    CHECK(balanced == 200);
  }

  TEST_CASE("lmp is monotone in demand and in wind") {
    const auto m = default_market();
    for (double w : {0.0, 12.0, 37.5, 50.0}) {
      double last = -1.0;
      for (double d = 0.0; d <= 165.0; d += 0.25) {
        const double l = economic_dispatch(d, w, m).lmp;
        CHECK(l >= last - 1e-12);
        last = l;
      }
    }
    for (double d : {5.0, 20.0, 60.0, 140.0}) {
      double last = 1e300;
      for (double w = 0.0; w <= 50.0; w += 0.25) {
        const double l = economic_dispatch(d, w, m).lmp;
        CHECK(l <= last + 1e-12);
        last = l;
      }
    }
  }

  TEST_CASE("generator order does not change the dispatch") {
    auto m = default_market();
    auto swapped = m;
    std::swap(swapped.generators[0], swapped.generators[1]);
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> dd(0.0, 160.0), dw(0.0, 50.0);
    for (int i = 0; i < 100; ++i) {
      const double d = dd(rng), w = dw(rng);
      auto a = economic_dispatch(d, w, m);
      auto b = economic_dispatch(d, w, swapped);
      CHECK(a.outputs[0] == doctest::Approx(b.outputs[1]).epsilon(1e-12));
      CHECK(a.outputs[1] == doctest::Approx(b.outputs[0]).epsilon(1e-12));
      CHECK(a.wind == doctest::Approx(b.wind).epsilon(1e-12));
      CHECK(a.lmp == doctest::Approx(b.lmp).epsilon(1e-12));
    }
  }

  TEST_CASE("ramp limits hold along chained clearings") {
    auto m = default_market();
    m.generators[0].ramp_up = m.generators[0].ramp_down = 2.0;
    m.generators[1].ramp_up = m.generators[1].ramp_down = 5.0;
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> dd(0.0, 60.0), dw(0.0, 50.0);
    std::vector<double> load, wind;
    for (int t = 0; t < 300; ++t) {
      load.push_back(dd(rng));
      wind.push_back(dw(rng));
    }
    auto rows = clear_series(load, wind, m);
    for (std::size_t t = 1; t < rows.size(); ++t) {
      for (std::size_t g = 0; g < 2; ++g) {
        const double step = rows[t].result.outputs[g] - rows[t - 1].result.outputs[g];
        CHECK(step <= m.generators[g].ramp_up + 1e-9);
        CHECK(-step <= m.generators[g].ramp_down + 1e-9);
      }
    }
  }
}

TEST_SUITE("clearing") {
  TEST_CASE("flat day-ahead load") {
    auto rows = clear_day_ahead({10, 10, 10, 10}, {0, 0, 0, 0}, default_market());
    REQUIRE(rows.size() == 4);
    for (const auto& r : rows) CHECK(r.result.lmp == doctest::Approx(14.0));
    CHECK(clear_day_ahead({}, {}, default_market()).empty());
    CHECK_THROWS_AS(clear_day_ahead({1.0}, {}, default_market()), DimensionError);
  }

  TEST_CASE("wind above load everywhere") {
    for (const auto& r : clear_day_ahead({5, 10, 20}, {30, 30, 30}, default_market())) {
      CHECK(r.result.lmp == doctest::Approx(5.0));
    }
  }

  TEST_CASE("real-time deficiency and surplus") {
    auto m = default_market();
    auto da = clear_day_ahead({10, 20}, {0, 0}, m);
    auto same = clear_real_time({10, 20}, {0, 0}, m);
    for (std::size_t t = 0; t < 2; ++t) CHECK(same[t].result.lmp == da[t].result.lmp);
    auto rt = clear_real_time({20}, {0}, m);
    CHECK(rt[0].result.lmp == doctest::Approx(18.5));
    CHECK(da[0].result.lmp == doctest::Approx(14.0));
    auto windy = clear_real_time({20}, {30}, m);
    CHECK(windy[0].result.lmp == doctest::Approx(5.0));
    CHECK(windy[0].result.lmp < da[1].result.lmp);
  }

  TEST_CASE("trace csv layout") {
    auto path = std::filesystem::temp_directory_path() / "gridmarl_trace_test.csv";
    write_dispatch_trace(path.string(), clear_day_ahead({20}, {0}, default_market()), default_market());
    std::ifstream f(path);
    std::string header, row;
    std::getline(f, header);
    std::getline(f, row);
    CHECK(header == "interval,lmp,g1_mw,g2_mw,wind_mw,demand_mw");
    CHECK(row.rfind("0,18.5,15,5", 0) == 0);
    std::filesystem::remove(path);
  }

  TEST_CASE("market spec json round trip") {
    auto m = default_market();
    auto back = market_spec_from_json(to_json(m));
    CHECK(to_json(back) == to_json(m));
    auto bad = to_json(m);
    bad["generators"][0]["p_min"] = 20.0;
    CHECK_THROWS_AS(market_spec_from_json(bad), ConfigError);
  }
}
