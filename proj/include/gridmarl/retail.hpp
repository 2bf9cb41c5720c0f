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

namespace gridmarl::retail {

// b > 0 discharges the battery into the home.
struct BatterySpec {
  double capacity = 10.0;  // kWh
  double soc_min = 0.10;
  double soc_max = 0.90;
  double p_charge_max = 2.0;     // kW
  double p_discharge_max = 2.0;  // kW
  double soc0 = 0.10;
  double efficiency = 1.0;  // one-way; 1.0 is lossless

  void validate() const;
};

nlohmann::json to_json(const BatterySpec& s);
BatterySpec battery_spec_from_json(const nlohmann::json& j);

struct BatteryStep {
  double effective_b = 0.0;
  double new_soc = 0.0;
};

BatteryStep battery_step(const BatterySpec& spec, double soc, double requested_b, double dt);

inline double prosumer_net_load(double d, double g, double b) { return d - g - b; }

struct PriceSignal {
  double sell = 0.0;  // $/kWh paid to a user exporting energy
  double buy = 0.0;   // $/kWh charged to a user drawing energy
};

// Positive = the user pays; negative = the user is paid.
double bill_increment(double e, const PriceSignal& price, double dt);

double aggregate_load(const std::vector<double>& consumer_demand,
                      const std::vector<double>& prosumer_net);

// Sum over intervals of [L_DA*rho_DA + buyback*price + (L_RT - L_DA)*rho_RT] * dt.
double lse_total_cost(const std::vector<double>& l_da, const std::vector<double>& rho_da,
                      const std::vector<double>& l_rt, const std::vector<double>& rho_rt,
                      const std::vector<double>& buyback, const std::vector<double>& buyback_price,
                      double dt);

inline double lse_profit(double retail_sales, double total_cost) { return retail_sales - total_cost; }

// T*max/sum; nullopt when the total is not positive.
std::optional<double> peak_to_average(const std::vector<double>& load);

// One interval of retail settlement between the LSE and its users.
struct Settlement {
  double aggregate = 0.0;       // L^D, kW
  double sales_kw = 0.0;        // sum of positive user loads
  double buyback_kw = 0.0;      // sum of |negative user loads|
  double revenue = 0.0;         // $ collected from buyers
  double buyback_cost = 0.0;    // $ paid to sellers
  std::vector<double> bills;    // $ per user, same order as the input
};

Settlement settle_interval(const std::vector<double>& user_loads, const PriceSignal& price, double dt);

// Every user dollar appears once on the LSE side with opposite sign.
bool check_closure(const Settlement& s, double rel_tol);

struct LedgerRow {
  std::size_t interval = 0;
  double l_d = 0.0;
  double c_s = 0.0;
  double c_b = 0.0;
  double lse_revenue = 0.0;
  double lse_cost = 0.0;
  std::size_t prosumer_id = 0;
  double bill = 0.0;
};

void write_ledger_csv(const std::string& path, const std::vector<LedgerRow>& rows);

}  // namespace gridmarl::retail
