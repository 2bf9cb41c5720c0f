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

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace gridmarl::market {

struct GeneratorSpec {
  std::string name;
  double a0 = 0.0;  // $ per interval, load-independent
  double a1 = 0.0;  // $/MWh
  double a2 = 0.0;  // $/MWh^2
  double p_min = 0.0;
  double p_max = 0.0;
  double ramp_down = 0.0;  // MW per interval
  double ramp_up = 0.0;

  void validate() const;
  double marginal_cost(double p) const { return a1 + 2.0 * a2 * p; }
  double cost(double p) const { return a0 + a1 * p + a2 * p * p; }
};

struct WindPlantSpec {
  double p_max = 50.0;
  double offer_price = 5.0;

  void validate() const;
};

struct MarketSpec {
  std::vector<GeneratorSpec> generators;
  WindPlantSpec wind;

  void validate() const;
};

// G1/G2 quadratic units and a 50 MW wind plant offering at 5 $/MWh.
MarketSpec default_market();

nlohmann::json to_json(const MarketSpec& spec);
MarketSpec market_spec_from_json(const nlohmann::json& j);

struct DispatchResult {
  std::vector<double> outputs;  // MW, one per generator in input order
  double wind = 0.0;            // MW dispatched
  double lmp = 0.0;             // $/MWh
  double total_cost = 0.0;      // $ per hour of operation, fixed terms included
  bool feasible = true;
};

// Least-cost dispatch of `demand` against the generators plus the wind plant.
// Infeasible demand yields feasible=false with every unit at its bound.
DispatchResult economic_dispatch(double demand, double wind_available, const MarketSpec& market,
                                 const std::optional<std::vector<double>>& prev_outputs = std::nullopt);

struct IntervalClearing {
  DispatchResult result;
  double load = 0.0;  // MW
};

// Chains ramp constraints across consecutive intervals.
std::vector<IntervalClearing> clear_series(const std::vector<double>& load,
                                           const std::vector<double>& wind,
                                           const MarketSpec& market);
inline std::vector<IntervalClearing> clear_day_ahead(const std::vector<double>& forecast_load,
                                                     const std::vector<double>& forecast_wind,
                                                     const MarketSpec& market) {
  return clear_series(forecast_load, forecast_wind, market);
}
inline std::vector<IntervalClearing> clear_real_time(const std::vector<double>& actual_load,
                                                     const std::vector<double>& actual_wind,
                                                     const MarketSpec& market) {
  return clear_series(actual_load, actual_wind, market);
}

bool check_power_balance(const DispatchResult& result, double demand, double tol);

// CSV: interval,lmp,<gen>_mw...,wind_mw,demand_mw
void write_dispatch_trace(const std::string& path, const std::vector<IntervalClearing>& rows,
                          const MarketSpec& market);

}  // namespace gridmarl::market
