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
#include "gridmarl/retail.hpp"

namespace gridmarl::retail {

void BatterySpec::validate() const {
  if (!(capacity > 0.0)) throw ConfigError("battery: capacity must be positive");
  if (!(soc_min >= 0.0 && soc_min < soc_max && soc_max <= 1.0)) {
    throw ConfigError("battery: need 0 <= soc_min < soc_max <= 1");
  }
  if (!(p_charge_max > 0.0 && p_discharge_max > 0.0)) throw ConfigError("battery: power limits must be positive");
  if (!(soc0 >= soc_min && soc0 <= soc_max)) throw ConfigError("battery: soc0 outside [soc_min, soc_max]");
  if (!(efficiency > 0.0 && efficiency <= 1.0)) throw ConfigError("battery: efficiency must be in (0, 1]");
}

nlohmann::json to_json(const BatterySpec& s) {
  return {{"capacity_kwh", s.capacity},     {"soc_min", s.soc_min},
          {"soc_max", s.soc_max},           {"p_charge_max_kw", s.p_charge_max},
          {"p_discharge_max_kw", s.p_discharge_max}, {"soc0", s.soc0},
          {"efficiency", s.efficiency}};
}

BatterySpec battery_spec_from_json(const nlohmann::json& j) {
  BatterySpec s;
  try {
    s.capacity = j.value("capacity_kwh", s.capacity);
    s.soc_min = j.value("soc_min", s.soc_min);
    s.soc_max = j.value("soc_max", s.soc_max);
    s.p_charge_max = j.value("p_charge_max_kw", s.p_charge_max);
    s.p_discharge_max = j.value("p_discharge_max_kw", s.p_discharge_max);
    s.soc0 = j.value("soc0", s.soc0);
    s.efficiency = j.value("efficiency", s.efficiency);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("battery spec: ") + e.what());
  }
  s.validate();
  return s;
}

BatteryStep battery_step(const BatterySpec& spec, double soc, double requested_b, double dt) {
  if (!(dt > 0.0)) throw InvalidArgument("battery_step: dt must be positive");
  if (!std::isfinite(soc) || !std::isfinite(requested_b)) {
    throw NumericError("battery_step: non-finite soc or request");
  }
  soc = std::clamp(soc, spec.soc_min, spec.soc_max);
  const double eta = spec.efficiency;
  // Power windows allowed by the remaining energy.
  const double max_discharge = (soc - spec.soc_min) * spec.capacity * eta / dt;
  const double max_charge = (spec.soc_max - soc) * spec.capacity / (eta * dt);
  double b = std::clamp(requested_b, -spec.p_charge_max, spec.p_discharge_max);
  b = std::clamp(b, -max_charge, max_discharge);
  const double energy = b >= 0.0 ? b * dt / eta : b * dt * eta;
  const double new_soc = std::clamp(soc - energy / spec.capacity, spec.soc_min, spec.soc_max);
  return {b, new_soc};
}

double bill_increment(double e, const PriceSignal& price, double dt) {
  return e >= 0.0 ? e * dt * price.buy : e * dt * price.sell;
}

double aggregate_load(const std::vector<double>& consumer_demand,
                      const std::vector<double>& prosumer_net) {
  double s = 0.0;
  for (double d : consumer_demand) s += d;
  for (double e : prosumer_net) s += e;
  return s;
}

double lse_total_cost(const std::vector<double>& l_da, const std::vector<double>& rho_da,
                      const std::vector<double>& l_rt, const std::vector<double>& rho_rt,
                      const std::vector<double>& buyback, const std::vector<double>& buyback_price,
                      double dt) {
  const std::size_t n = l_da.size();
  if (rho_da.size() != n || l_rt.size() != n || rho_rt.size() != n || buyback.size() != n ||
      buyback_price.size() != n) {
    throw DimensionError("lse_total_cost: interval series differ in length");
  }
  double tc = 0.0;
  for (std::size_t t = 0; t < n; ++t) {
    tc += (l_da[t] * rho_da[t] + buyback[t] * buyback_price[t] + (l_rt[t] - l_da[t]) * rho_rt[t]) * dt;
  }
  return tc;
}

std::optional<double> peak_to_average(const std::vector<double>& load) {
  if (load.empty()) return std::nullopt;
  double sum = 0.0;
  double peak = load.front();
  for (double v : load) {
    sum += v;
    peak = std::max(peak, v);
  }
  if (!(sum > 0.0)) return std::nullopt;
  return static_cast<double>(load.size()) * peak / sum;
}

Settlement settle_interval(const std::vector<double>& user_loads, const PriceSignal& price, double dt) {
  Settlement s;
  s.bills.reserve(user_loads.size());
  for (double e : user_loads) {
    s.aggregate += e;
    const double bill = bill_increment(e, price, dt);
    s.bills.push_back(bill);
    if (e >= 0.0) {
      s.sales_kw += e;
      s.revenue += bill;
    } else {
      s.buyback_kw -= e;
      s.buyback_cost -= bill;
    }
  }
  return s;
}

bool check_closure(const Settlement& s, double rel_tol) {
  double pos = 0.0, neg = 0.0, flow = 0.0;
  for (double b : s.bills) {
    if (b >= 0.0) pos += b; else neg -= b;
    flow += b;
  }
  auto close = [rel_tol](double a, double b) {
    return std::abs(a - b) <= rel_tol * std::max({1.0, std::abs(a), std::abs(b)});
  };
  return close(s.revenue, pos) && close(s.buyback_cost, neg) &&
         close(s.revenue - s.buyback_cost, flow) && close(s.sales_kw - s.buyback_kw, s.aggregate);
}

void write_ledger_csv(const std::string& path, const std::vector<LedgerRow>& rows) {
  std::ofstream f(path);
  if (!f) throw IoError("cannot open '" + path + "' for writing");
  f.precision(17);
  f << "interval,L_D,C_s,C_b,lse_revenue,lse_cost,prosumer_id,bill\n";
  for (const auto& r : rows) {
    f << r.interval << ',' << r.l_d << ',' << r.c_s << ',' << r.c_b << ',' << r.lse_revenue << ','
      << r.lse_cost << ',' << r.prosumer_id << ',' << r.bill << '\n';
  }
  if (!f) throw IoError("write failed for '" + path + "'");
}

}  // namespace gridmarl::retail
