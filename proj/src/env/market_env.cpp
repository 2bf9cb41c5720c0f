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
#include <sstream>

#include "gridmarl/env.hpp"
#include "gridmarl/errors.hpp"
#include "gridmarl/text.hpp"

namespace gridmarl::env {

namespace {

std::size_t hour_of(std::size_t t, double dt) {
  return std::min<std::size_t>(23, static_cast<std::size_t>(std::floor(static_cast<double>(t) * dt + 1e-9)));
}

}  // namespace

MarketEnv::MarketEnv(EnvConfig config) : config_(std::move(config)) { config_.validate(); }

void MarketEnv::reset(const Exogenous& exo, std::vector<double> l_da) {
  const auto steps = static_cast<Eigen::Index>(config_.steps);
  const auto np = static_cast<Eigen::Index>(config_.profiles.prosumers);
  const auto nc = static_cast<Eigen::Index>(config_.profiles.consumers);
  if (exo.profile.prosumer_demand.rows() != np || exo.profile.pv.rows() != np ||
      exo.profile.consumer_demand.rows() != nc || exo.profile.prosumer_demand.cols() != steps ||
      exo.profile.pv.cols() != steps || exo.profile.consumer_demand.cols() != steps) {
    throw DimensionError("MarketEnv::reset: profile shape does not match the household roster");
  }
  if (l_da.size() != config_.steps) throw DimensionError("MarketEnv::reset: day-ahead load needs one value per step");
  if (exo.wind_actual.size() != 24 || exo.forecasts.issued.rows() != 24 || exo.forecasts.issued.cols() != 24) {
    throw DimensionError("MarketEnv::reset: wind data must be hourly over 24 hours");
  }
  exo_ = &exo;
  l_da_ = std::move(l_da);

  // Day-ahead clearing against the forecast issued at midnight, held per hour.
  const auto da_fc = exo.forecasts.row(0);
  std::vector<double> load_mw(config_.steps), wind_mw(config_.steps);
  const double wind_cap = config_.market.wind.p_max;
  for (std::size_t t = 0; t < config_.steps; ++t) {
    load_mw[t] = std::max(0.0, l_da_[t]) * config_.mw_per_model_kw;
    wind_mw[t] = std::clamp(da_fc[hour_of(t, config_.dt)], 0.0, wind_cap);
  }
  da_ = market::clear_day_ahead(load_mw, wind_mw, config_.market);

  soc_.assign(config_.profiles.prosumers, config_.battery.soc0);
  sell_hist_.clear();
  buy_hist_.clear();
  rho_da_hist_.clear();
  rho_rt_hist_.assign(1, da_.front().result.lmp);
  last_l_rt_ = l_da_.front();
  last_e_ = 0.0;
  prev_outputs_.reset();
  t_ = 0;
  done_ = false;
  log_.clear();
}

std::vector<double> MarketEnv::lsa_observation() const {
  if (exo_ == nullptr) throw StateError("MarketEnv: reset before observing");
  if (done_) throw StateError("MarketEnv: episode finished");
  std::vector<double> da;
  da.reserve(t_ + 1);
  for (std::size_t k = 0; k <= t_; ++k) da.push_back(da_[k].result.lmp);
  return build_lsa_observation(exo_->forecasts.row(hour_of(t_, config_.dt)), da, rho_rt_hist_,
                               config_.lmp_history, l_da_[t_], last_l_rt_, last_e_);
}

std::vector<std::vector<double>> MarketEnv::pa_observations(const retail::PriceSignal& price) const {
  if (exo_ == nullptr) throw StateError("MarketEnv: reset before observing");
  if (done_) throw StateError("MarketEnv: episode finished");
  std::vector<double> sell = sell_hist_, buy = buy_hist_;
  sell.push_back(price.sell);
  buy.push_back(price.buy);
  std::optional<double> label;
  if (config_.observe_weather_label) label = exo_->profile.sunny ? 1.0 : 0.0;
  std::vector<std::vector<double>> out;
  const auto t = static_cast<Eigen::Index>(t_);
  for (std::size_t i = 0; i < config_.profiles.prosumers; ++i) {
    const auto r = static_cast<Eigen::Index>(i);
    out.push_back(build_pa_observation(exo_->profile.prosumer_demand(r, t), exo_->profile.pv(r, t), soc_[i], sell,
                                       buy, config_.pa_history, label));
  }
  return out;
}

retail::PriceSignal MarketEnv::clip_price(const retail::PriceSignal& p) const {
  const double tol = 1e-12;
  auto check = [&](double v, const char* name) {
    if (!std::isfinite(v) || v < config_.price_min - tol || v > config_.price_max + tol) {
      throw InvalidArgument(std::string("MarketEnv::step: ") + name + " price " + text::format_double(v) +
                            " outside [" + text::format_double(config_.price_min) + ", " +
                            text::format_double(config_.price_max) + "]");
    }
    return std::clamp(v, config_.price_min, config_.price_max);
  };
  return {check(p.sell, "sell"), check(p.buy, "buy")};
}

StepRecord MarketEnv::step(const retail::PriceSignal& raw_price, const std::vector<double>& pa_actions) {
  if (exo_ == nullptr) throw StateError("MarketEnv: reset before stepping");
  if (done_) throw StateError("MarketEnv: episode finished; call reset");
  const std::size_t np = config_.profiles.prosumers;
  const std::size_t nc = config_.profiles.consumers;
  if (pa_actions.size() != np) {
    throw DimensionError("MarketEnv::step: expected " + std::to_string(np) + " prosumer actions, got " +
                         std::to_string(pa_actions.size()));
  }
  const retail::PriceSignal price = clip_price(raw_price);
  const double dt = config_.dt;
  const auto t = static_cast<Eigen::Index>(t_);
  const auto& prof = exo_->profile;

  StepRecord r;
  r.step = t_;
  r.price = price;
  r.lsa_obs = lsa_observation();
  r.pa_obs = pa_observations(price);
  r.soc_before = soc_;

  // Batteries and household net loads.
  for (std::size_t i = 0; i < np; ++i) {
    const auto row = static_cast<Eigen::Index>(i);
    const double d = prof.prosumer_demand(row, t);
    const double g = prof.pv(row, t);
    const auto bs = retail::battery_step(config_.battery, soc_[i], pa_actions[i], dt);
    r.demand.push_back(d);
    r.pv.push_back(g);
    r.b_requested.push_back(pa_actions[i]);
    r.b.push_back(bs.effective_b);
    r.net_load.push_back(retail::prosumer_net_load(d, g, bs.effective_b));
    soc_[i] = bs.new_soc;
  }
  for (std::size_t c = 0; c < nc; ++c) {
    const double d = prof.consumer_demand(static_cast<Eigen::Index>(c), t);
    r.demand.push_back(d);
    r.net_load.push_back(d);
  }
  r.soc_after = soc_;

  // Aggregation and retail settlement.
  r.settlement = retail::settle_interval(r.net_load, price, dt);
  r.l_da = l_da_[t_];
  r.surplus = r.settlement.aggregate < 0.0;
  r.l_dispatched = std::max(0.0, r.settlement.aggregate);
  r.e_bought = energy_bought(r.net_load);

  // Real-time clearing against the realized wind.
  r.wind_available = std::clamp(exo_->wind_actual[hour_of(t_, dt)], 0.0, config_.market.wind.p_max);
  r.demand_mw = r.l_dispatched * config_.mw_per_model_kw;
  r.dispatch = market::economic_dispatch(r.demand_mw, r.wind_available, config_.market, prev_outputs_);
  prev_outputs_ = r.dispatch.outputs;
  r.rho_rt = r.dispatch.lmp;
  r.rho_da = da_[t_].result.lmp;
  r.infeasible = !r.dispatch.feasible;

  double supplied_mw = r.dispatch.wind;
  for (double p : r.dispatch.outputs) supplied_mw += p;
  const double procured_kw = supplied_mw / config_.mw_per_model_kw;
  const double rho_kwh = r.rho_rt / 1000.0;
  r.procurement_cost = procured_kw * rho_kwh * dt;

  // Rewards.
  r.lsa_reward = lsa_reward(r.settlement.sales_kw, price.buy, r.settlement.buyback_kw, price.sell, procured_kw,
                            rho_kwh, dt, config_.lsa_reward_scale);
  if (r.infeasible) r.lsa_reward = config_.infeasible_penalty;
  for (std::size_t i = 0; i < np; ++i) {
    r.pa_rewards.push_back(pa_reward(r.net_load[i], price, dt, config_.pa_reward_scale));
  }

  // Histories.
  sell_hist_.push_back(price.sell);
  buy_hist_.push_back(price.buy);
  rho_rt_hist_.push_back(r.rho_rt);
  last_l_rt_ = r.settlement.aggregate;
  last_e_ = r.e_bought;
  ++t_;
  done_ = t_ >= config_.steps || r.infeasible;
  r.terminal = done_;
  log_.push_back(r);
  return r;
}

EpisodeSummary MarketEnv::summary() const {
  EpisodeSummary s;
  if (exo_ != nullptr) s.day = exo_->profile.day;
  s.steps = log_.size();
  s.truncated = !log_.empty() && log_.back().infeasible;
  const std::size_t np = config_.profiles.prosumers;
  const std::size_t nu = np + config_.profiles.consumers;
  s.pa_returns.assign(np, 0.0);
  s.bills.assign(nu, 0.0);
  std::vector<double> l_da, rho_da, l_rt, rho_rt, buyback, buyback_price, load;
  double gap = 0.0;
  for (const auto& r : log_) {
    s.retail_revenue += r.settlement.revenue;
    s.buyback_cost += r.settlement.buyback_cost;
    s.lsa_return += r.lsa_reward;
    for (std::size_t i = 0; i < np; ++i) s.pa_returns[i] += r.pa_rewards[i];
    for (std::size_t u = 0; u < nu; ++u) s.bills[u] += r.settlement.bills[u];
    l_da.push_back(std::max(0.0, r.l_da));
    rho_da.push_back(r.rho_da / 1000.0);
    l_rt.push_back(r.l_dispatched);
    rho_rt.push_back(r.rho_rt / 1000.0);
    buyback.push_back(r.settlement.buyback_kw);
    buyback_price.push_back(r.price.sell);
    load.push_back(r.settlement.aggregate);
    gap += std::abs(r.rho_rt - r.rho_da);
  }
  if (!log_.empty()) {
    s.total_cost = retail::lse_total_cost(l_da, rho_da, l_rt, rho_rt, buyback, buyback_price, config_.dt);
    s.lse_profit = retail::lse_profit(s.retail_revenue, s.total_cost);
    s.mean_abs_lmp_gap = gap / static_cast<double>(log_.size());
    const auto par = retail::peak_to_average(load);
    s.par = par ? *par : std::numeric_limits<double>::quiet_NaN();
  } else {
    s.par = std::numeric_limits<double>::quiet_NaN();
  }
  double pb = 0.0;
  for (std::size_t i = 0; i < np; ++i) pb += s.bills[i];
  s.mean_prosumer_bill = pb / static_cast<double>(np);
  return s;
}

bool step_is_consistent(const StepRecord& r, double rel_tol) {
  if (!retail::check_closure(r.settlement, rel_tol)) return false;
  if (r.infeasible) return true;
  return market::check_power_balance(r.dispatch, r.demand_mw, rel_tol * std::max(1.0, r.demand_mw));
}

namespace {

const char* kLogHeader =
    "step,c_sell,c_buy,l_d,l_dispatched,l_da,sales_kw,buyback_kw,revenue,buyback_cost,rho_da,rho_rt,"
    "wind_available,demand_mw,wind_mw,gen_mw,dispatch_cost,feasible,procurement_cost,e_bought,lsa_reward,"
    "surplus,infeasible,terminal,demand,pv,soc_before,soc_after,b_requested,b,net_load,bills,pa_rewards,"
    "lsa_obs,pa_obs";

std::string join_nested(const std::vector<std::vector<double>>& rows) {
  std::string out;
  for (std::size_t k = 0; k < rows.size(); ++k) {
    if (k) out += '|';
    out += text::join(rows[k], ' ');
  }
  return out;
}

}  // namespace

void write_episode_log_csv(const std::string& path, const std::vector<StepRecord>& rows) {
  std::ofstream f(path);
  if (!f) throw IoError("cannot open '" + path + "' for writing");
  using text::format_double;
  f << kLogHeader << '\n';
  for (const auto& r : rows) {
    f << r.step << ',' << format_double(r.price.sell) << ',' << format_double(r.price.buy) << ','
      << format_double(r.settlement.aggregate) << ',' << format_double(r.l_dispatched) << ','
      << format_double(r.l_da) << ',' << format_double(r.settlement.sales_kw) << ','
      << format_double(r.settlement.buyback_kw) << ',' << format_double(r.settlement.revenue) << ','
      << format_double(r.settlement.buyback_cost) << ',' << format_double(r.rho_da) << ','
      << format_double(r.rho_rt) << ',' << format_double(r.wind_available) << ',' << format_double(r.demand_mw)
      << ',' << format_double(r.dispatch.wind) << ',' << text::join(r.dispatch.outputs, ' ') << ','
      << format_double(r.dispatch.total_cost) << ',' << (r.dispatch.feasible ? 1 : 0) << ','
      << format_double(r.procurement_cost) << ',' << format_double(r.e_bought) << ','
      << format_double(r.lsa_reward) << ',' << (r.surplus ? 1 : 0) << ',' << (r.infeasible ? 1 : 0) << ','
      << (r.terminal ? 1 : 0) << ',' << text::join(r.demand, ' ') << ',' << text::join(r.pv, ' ') << ','
      << text::join(r.soc_before, ' ') << ',' << text::join(r.soc_after, ' ') << ','
      << text::join(r.b_requested, ' ') << ',' << text::join(r.b, ' ') << ',' << text::join(r.net_load, ' ')
      << ',' << text::join(r.settlement.bills, ' ') << ',' << text::join(r.pa_rewards, ' ') << ','
      << text::join(r.lsa_obs, ' ') << ',' << join_nested(r.pa_obs) << '\n';
  }
  if (!f) throw IoError("write failed for '" + path + "'");
}

std::vector<StepRecord> read_episode_log_csv(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw IoError("cannot open '" + path + "'");
  std::string line;
  if (!std::getline(f, line)) throw ParseError(path + ": empty file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kLogHeader) throw ParseError(path + ": unexpected episode log header");
  std::vector<StepRecord> rows;
  std::size_t line_no = 1;
  while (std::getline(f, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const std::string where = path + ":" + std::to_string(line_no);
    const auto cols = text::split(line, ',');
    if (cols.size() != 35) throw ParseError(where + ": expected 35 columns, got " + std::to_string(cols.size()));
    auto num = [&](std::size_t k) { return text::parse_double(cols[k], where); };
    auto list = [&](std::size_t k) { return text::parse_list(cols[k], ' ', where); };
    auto flag = [&](std::size_t k) { return text::parse_int(cols[k], where) != 0; };
    StepRecord r;
    r.step = static_cast<std::size_t>(text::parse_int(cols[0], where));
    r.price = {num(1), num(2)};
    r.settlement.aggregate = num(3);
    r.l_dispatched = num(4);
    r.l_da = num(5);
    r.settlement.sales_kw = num(6);
    r.settlement.buyback_kw = num(7);
    r.settlement.revenue = num(8);
    r.settlement.buyback_cost = num(9);
    r.rho_da = num(10);
    r.rho_rt = num(11);
    r.wind_available = num(12);
    r.demand_mw = num(13);
    r.dispatch.wind = num(14);
    r.dispatch.outputs = list(15);
    r.dispatch.total_cost = num(16);
    r.dispatch.feasible = flag(17);
    r.dispatch.lmp = r.rho_rt;
    r.procurement_cost = num(18);
    r.e_bought = num(19);
    r.lsa_reward = num(20);
    r.surplus = flag(21);
    r.infeasible = flag(22);
    r.terminal = flag(23);
    r.demand = list(24);
    r.pv = list(25);
    r.soc_before = list(26);
    r.soc_after = list(27);
    r.b_requested = list(28);
    r.b = list(29);
    r.net_load = list(30);
    r.settlement.bills = list(31);
    r.pa_rewards = list(32);
    r.lsa_obs = list(33);
    if (!cols[34].empty()) {
      for (auto part : text::split(cols[34], '|')) r.pa_obs.push_back(text::parse_list(part, ' ', where));
    }
    rows.push_back(std::move(r));
  }
  return rows;
}

std::vector<retail::LedgerRow> ledger_rows(const std::vector<StepRecord>& rows) {
  std::vector<retail::LedgerRow> out;
  for (const auto& r : rows) {
    for (std::size_t u = 0; u < r.settlement.bills.size(); ++u) {
      retail::LedgerRow l;
      l.interval = r.step;
      l.l_d = r.settlement.aggregate;
      l.c_s = r.price.sell;
      l.c_b = r.price.buy;
      l.lse_revenue = r.settlement.revenue;
      l.lse_cost = r.settlement.buyback_cost + r.procurement_cost;
      l.prosumer_id = u;
      l.bill = r.settlement.bills[u];
      out.push_back(l);
    }
  }
  return out;
}

}  // namespace gridmarl::env
