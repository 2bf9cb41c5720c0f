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
#include <limits>

#include "gridmarl/errors.hpp"
#include "gridmarl/market.hpp"

namespace gridmarl::market {

void GeneratorSpec::validate() const {
  if (!(p_min >= 0.0 && p_min <= p_max)) throw ConfigError("generator '" + name + "': need 0 <= p_min <= p_max");
  if (!(a2 >= 0.0)) throw ConfigError("generator '" + name + "': a2 must be non-negative");
  if (!std::isfinite(ramp_down) || !std::isfinite(ramp_up) || ramp_down < 0.0 || ramp_up < 0.0) {
    throw ConfigError("generator '" + name + "': ramp bounds must be finite and non-negative");
  }
  if (!std::isfinite(a0) || !std::isfinite(a1) || !std::isfinite(a2)) {
    throw ConfigError("generator '" + name + "': non-finite cost coefficient");
  }
}

void WindPlantSpec::validate() const {
  if (!(p_max >= 0.0) || !std::isfinite(p_max)) throw ConfigError("wind plant: p_max must be non-negative");
  if (!std::isfinite(offer_price)) throw ConfigError("wind plant: offer price must be finite");
}

void MarketSpec::validate() const {
  for (const auto& g : generators) g.validate();
  wind.validate();
}

MarketSpec default_market() {
  MarketSpec m;
  m.generators.push_back({"g1", 100.0, 10.0, 0.2, 0.0, 15.0, 15.0, 15.0});
  m.generators.push_back({"g2", 200.0, 15.0, 0.35, 0.0, 100.0, 100.0, 100.0});
  m.wind = {50.0, 5.0};
  return m;
}

nlohmann::json to_json(const MarketSpec& spec) {
  nlohmann::json gens = nlohmann::json::array();
  for (const auto& g : spec.generators) {
    gens.push_back({{"name", g.name},
                    {"cost_coeffs", {g.a0, g.a1, g.a2}},
                    {"p_min", g.p_min},
                    {"p_max", g.p_max},
                    {"ramp_down", g.ramp_down},
                    {"ramp_up", g.ramp_up}});
  }
  return {{"generators", gens},
          {"wind", {{"p_max", spec.wind.p_max}, {"offer_price", spec.wind.offer_price}}}};
}

MarketSpec market_spec_from_json(const nlohmann::json& j) {
  MarketSpec m = default_market();
  try {
    if (j.contains("generators")) {
      m.generators.clear();
      for (const auto& g : j.at("generators")) {
        GeneratorSpec s;
        s.name = g.at("name").get<std::string>();
        const auto& c = g.at("cost_coeffs");
        if (!c.is_array() || c.size() != 3) throw ConfigError("generator '" + s.name + "': cost_coeffs needs 3 entries");
        s.a0 = c[0].get<double>();
        s.a1 = c[1].get<double>();
        s.a2 = c[2].get<double>();
        s.p_min = g.value("p_min", 0.0);
        s.p_max = g.at("p_max").get<double>();
        s.ramp_down = g.value("ramp_down", s.p_max);
        s.ramp_up = g.value("ramp_up", s.p_max);
        m.generators.push_back(s);
      }
    }
    if (j.contains("wind")) {
      m.wind.p_max = j.at("wind").value("p_max", m.wind.p_max);
      m.wind.offer_price = j.at("wind").value("offer_price", m.wind.offer_price);
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("market spec: ") + e.what());
  }
  m.validate();
  return m;
}

namespace {

// A dispatchable unit over [lo, hi]. Quadratic units have a continuous
// supply curve; linear ones (a2 == 0, wind) jump at their price.
struct Unit {
  double a1;
  double a2;
  double lo;
  double hi;

  bool linear() const { return a2 == 0.0; }
  double mc(double p) const { return a1 + 2.0 * a2 * p; }
  double supply_high(double lambda) const {
    if (linear()) return lambda >= a1 ? hi : lo;
    return std::clamp((lambda - a1) / (2.0 * a2), lo, hi);
  }
  double supply_low(double lambda) const {
    if (linear()) return lambda > a1 ? hi : lo;
    return std::clamp((lambda - a1) / (2.0 * a2), lo, hi);
  }
};

double total_high(const std::vector<Unit>& units, double lambda) {
  double s = 0.0;
  for (const auto& u : units) s += u.supply_high(lambda);
  return s;
}

double total_low(const std::vector<Unit>& units, double lambda) {
  double s = 0.0;
  for (const auto& u : units) s += u.supply_low(lambda);
  return s;
}

// Outputs at price `lambda`; units whose linear price equals lambda share
// whatever remains of the demand in proportion to their headroom.
std::vector<double> outputs_at(const std::vector<Unit>& units, double lambda, double demand) {
  std::vector<double> out(units.size());
  double fixed = 0.0;
  double headroom = 0.0;
  for (std::size_t k = 0; k < units.size(); ++k) {
    const auto& u = units[k];
    if (u.linear() && u.a1 == lambda && u.hi > u.lo) {
      out[k] = u.lo;
      headroom += u.hi - u.lo;
    } else {
      out[k] = u.supply_high(lambda);
    }
    fixed += out[k];
  }
  if (headroom > 0.0) {
    const double share = std::clamp((demand - fixed) / headroom, 0.0, 1.0);
    for (std::size_t k = 0; k < units.size(); ++k) {
      const auto& u = units[k];
      if (u.linear() && u.a1 == lambda && u.hi > u.lo) out[k] = u.lo + share * (u.hi - u.lo);
    }
  }
  return out;
}

}  // namespace

DispatchResult economic_dispatch(double demand, double wind_available, const MarketSpec& market,
                                 const std::optional<std::vector<double>>& prev_outputs) {
  if (!std::isfinite(demand) || demand < 0.0) throw InvalidArgument("dispatch: demand must be >= 0");
  if (!std::isfinite(wind_available) || wind_available < 0.0 ||
      wind_available > market.wind.p_max + 1e-9) {
    throw InvalidArgument("dispatch: wind availability outside [0, p_max]");
  }
  const auto& gens = market.generators;
  if (prev_outputs && prev_outputs->size() != gens.size()) {
    throw DimensionError("dispatch: prev_outputs must have one entry per generator");
  }

  std::vector<Unit> units;
  units.reserve(gens.size() + 1);
  for (std::size_t k = 0; k < gens.size(); ++k) {
    const auto& g = gens[k];
    double lo = g.p_min;
    double hi = g.p_max;
    if (prev_outputs) {
      const double prev = (*prev_outputs)[k];
      lo = std::max(lo, prev - g.ramp_down);
      hi = std::min(hi, prev + g.ramp_up);
      if (lo > hi) lo = hi = std::clamp(prev, g.p_min, g.p_max);
    }
    units.push_back({g.a1, g.a2, lo, hi});
  }
  units.push_back({market.wind.offer_price, 0.0, 0.0, std::min(wind_available, market.wind.p_max)});

  // Price breakpoints of the aggregate supply curve.
  std::vector<double> breaks;
  for (const auto& u : units) {
    if (u.hi <= u.lo) continue;
    breaks.push_back(u.mc(u.lo));
    if (!u.linear()) breaks.push_back(u.mc(u.hi));
  }
  std::sort(breaks.begin(), breaks.end());
  breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());

  double floor_total = 0.0;
  double cap_total = 0.0;
  for (const auto& u : units) {
    floor_total += u.lo;
    cap_total += u.hi;
  }

  DispatchResult r;
  std::vector<double> out;
  const double tol = 1e-9 * std::max(1.0, cap_total);
  const bool over = demand > cap_total + tol;
  const bool under = demand < floor_total - tol;
  if (over || under || breaks.empty()) {
    r.feasible = !(over || under);
    out.resize(units.size());
    for (std::size_t k = 0; k < units.size(); ++k) out[k] = over ? units[k].hi : units[k].lo;
    double top = -std::numeric_limits<double>::infinity();
    double cheapest = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < units.size(); ++k) {
      if (out[k] > 0.0) top = std::max(top, units[k].mc(out[k]));
      cheapest = std::min(cheapest, units[k].mc(units[k].lo));
    }
    if (under && !breaks.empty()) {
      r.lmp = breaks.front();
    } else {
      r.lmp = std::isfinite(top) ? top : cheapest;
    }
  } else if (demand <= total_high(units, breaks.front())) {
    // Demand sits at (or below) the first step: the cheapest flexible unit sets the price.
    r.lmp = breaks.front();
    out = outputs_at(units, r.lmp, demand);
  } else {
    std::size_t k = 1;
    while (k < breaks.size() && total_high(units, breaks[k]) < demand) ++k;
    if (k == breaks.size()) k = breaks.size() - 1;
    const double s_prev = total_high(units, breaks[k - 1]);
    const double s_left = total_low(units, breaks[k]);
    if (demand <= s_left) {
      // Continuous segment between two breakpoints.
      const double span = s_left - s_prev;
      const double frac = span > 0.0 ? (demand - s_prev) / span : 1.0;
      r.lmp = breaks[k - 1] + frac * (breaks[k] - breaks[k - 1]);
    } else {
      r.lmp = breaks[k];
    }
    out = outputs_at(units, r.lmp, demand);
  }

  r.outputs.assign(out.begin(), out.end() - 1);
  r.wind = out.back();
  r.total_cost = market.wind.offer_price * r.wind;
  for (std::size_t k = 0; k < gens.size(); ++k) r.total_cost += gens[k].cost(r.outputs[k]);
  return r;
}

std::vector<IntervalClearing> clear_series(const std::vector<double>& load,
                                           const std::vector<double>& wind,
                                           const MarketSpec& market) {
  if (load.size() != wind.size()) throw DimensionError("clearing: load and wind series differ in length");
  std::vector<IntervalClearing> rows;
  rows.reserve(load.size());
  std::optional<std::vector<double>> prev;
  for (std::size_t t = 0; t < load.size(); ++t) {
    auto res = economic_dispatch(load[t], wind[t], market, prev);
    prev = res.outputs;
    rows.push_back({std::move(res), load[t]});
  }
  return rows;
}

bool check_power_balance(const DispatchResult& result, double demand, double tol) {
  if (!result.feasible) return false;
  double s = result.wind;
  for (double p : result.outputs) s += p;
  return std::abs(s - demand) <= tol;
}

void write_dispatch_trace(const std::string& path, const std::vector<IntervalClearing>& rows,
                          const MarketSpec& market) {
  std::ofstream f(path);
  if (!f) throw IoError("cannot open '" + path + "' for writing");
  f.precision(17);
  f << "interval,lmp";
  for (const auto& g : market.generators) f << ',' << g.name << "_mw";
  f << ",wind_mw,demand_mw\n";
  for (std::size_t t = 0; t < rows.size(); ++t) {
    const auto& r = rows[t].result;
    f << t << ',' << r.lmp;
    for (double p : r.outputs) f << ',' << p;
    f << ',' << r.wind << ',' << rows[t].load << '\n';
  }
  if (!f) throw IoError("write failed for '" + path + "'");
}

}  // namespace gridmarl::market
