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


#include "gridmarl/commands.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <memory>
#include <mutex>
#include <new>
#include <thread>

#include "gridmarl/errors.hpp"
#include "gridmarl/scenarios.hpp"
#include "gridmarl/text.hpp"

namespace gridmarl::data {

namespace fs = std::filesystem;

namespace {

// An error whose message already starts with a module tag.
class TaggedError : public Error {
 public:
  using Error::Error;
};

template <class F>
auto in_module(const std::string& module, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const TaggedError&) {
    throw;
  } catch (const Error& e) {
    throw TaggedError(e.code(), module + ": " + e.what());
  } catch (const fs::filesystem_error& e) {
    throw TaggedError(ErrorCode::io, module + ": " + e.what());
  } catch (const std::bad_alloc&) {
    throw TaggedError(ErrorCode::internal, module + ": out of memory");
  }
}

struct Context {
  std::string command;
  RunConfig config;
  std::uint64_t seed = 0;
  fs::path out;
  CommandOptions options;
  nlohmann::json previous_inputs = nlohmann::json::object();
  RunManifest manifest;
  LogFn log;

  void say(const std::string& line) const {
    if (log) log(command + ": " + line);
  }
  std::string artifact(const std::string& name) {
    manifest.artifacts.push_back(name);
    return (out / name).string();
  }
  void input(const std::string& name, const std::string& path) {
    manifest.inputs[name] = {{"path", path}, {"hash", file_hash(path)}};
  }
  // An explicit option wins over the input recorded in a manifest.
  std::string input_path(const std::string& name, const std::string& option) const {
    if (!option.empty()) return option;
    if (previous_inputs.contains(name)) return previous_inputs.at(name).at("path").get<std::string>();
    return {};
  }
};

Context make_context(const std::string& command, const CommandOptions& o, const LogFn& log) {
  Context c;
  c.command = command;
  c.options = o;
  c.log = log;
  in_module("cli_data", [&] {
    if (!o.config_path.empty()) {
      std::ifstream f(o.config_path);
      if (!f) throw NotFound("config file '" + o.config_path + "' not found");
      nlohmann::json j;
      try {
        j = nlohmann::json::parse(f);
      } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(o.config_path + ": " + e.what());
      }
      if (j.is_object() && j.value("format", std::string()) == "gridmarl.manifest") {
        const RunManifest m = RunManifest::from_json(j);
        if (config_hash(m.config) != m.config_hash) {
          throw ConfigError("manifest '" + o.config_path + "' config does not match its hash");
        }
        c.config = run_config_from_json(m.config);
        c.config.seed = m.seed;
        c.previous_inputs = m.inputs;
      } else {
        c.config = run_config_from_json(j);
      }
    } else {
      c.config = preset_config(o.preset.empty() ? "default" : o.preset);
    }
    if (o.seed) c.config.seed = *o.seed;
    c.config.validate();
    c.seed = c.config.seed;
    if (!o.out_dir.empty()) {
      c.out = o.out_dir;
    } else if (const char* base = std::getenv("GRIDMARL_OUT"); base != nullptr && *base != '\0') {
      c.out = fs::path(base) / command;
    } else {
      c.out = fs::path("runs") / command;
    }
    fs::create_directories(c.out);
  });
  c.manifest.command = command;
  c.manifest.artifact_version = artifact_version();
  c.manifest.config = to_json(c.config);
  c.manifest.config_hash = config_hash(c.manifest.config);
  c.manifest.seed = c.seed;
  c.manifest.started_at = utc_now();
  return c;
}

RunManifest finish(Context& c) {
  c.manifest.finished_at = utc_now();
  in_module("cli_data", [&] { write_manifest(c.out.string(), c.manifest); });
  c.say("wrote " + (c.out / "manifest.json").string());
  return c.manifest;
}

nlohmann::json metrics_json(const forecast::Metrics& m) {
  nlohmann::json j = {{"rmse", m.rmse}, {"mae", m.mae}, {"mape_excluded", m.mape_excluded}};
  j["mape"] = m.mape ? nlohmann::json(*m.mape) : nlohmann::json(nullptr);
  return j;
}

void write_name_value_csv(const std::string& path, const std::vector<std::pair<std::string, double>>& rows) {
  std::ofstream f(path);
  if (!f) throw IoError("cannot open '" + path + "' for writing");
  f << "metric,value\n";
  for (const auto& [name, value] : rows) f << name << ',' << text::format_double(value) << '\n';
  if (!f) throw IoError("write failed for '" + path + "'");
}

std::vector<forecast::WindRecord> wind_records(Context& c) {
  const std::string path = c.input_path("data", c.options.data_path);
  if (path.empty()) {
    c.say("synthesizing " + std::to_string(c.config.data_days) + " days of wind data");
    return synthesize_wind(synthetic_spec(c.config), c.seed);
  }
  std::optional<double> scale;
  std::string scale_text = c.options.data_scale;
  if (scale_text.empty() && c.previous_inputs.contains("data")) {
    scale_text = c.previous_inputs.at("data").value("scale", std::string());
  }
  auto records = load_wind_csv(path);
  if (scale_text == "auto") {
    scale = scale_to_capacity(records, c.config.forecaster.p_max);
  } else if (!scale_text.empty()) {
    scale = text::parse_double(scale_text, "scale");
  }
  if (scale) records = load_wind_csv(path, scale, c.config.forecaster.p_max);
  c.input("data", path);
  if (!scale_text.empty()) c.manifest.inputs["data"]["scale"] = scale_text;
  c.say("loaded " + std::to_string(records.size()) + " records from " + path);
  return records;
}

nn::Matrix hourly_series(Context& c) {
  auto records = in_module("cli_data", [&] { return wind_records(c); });
  return in_module("forecast", [&] { return forecast::prepare_hourly(records, c.config.impute_k); });
}

forecast::ForecasterConfig forecaster_config(const Context& c) {
  auto fc = c.config.forecaster;
  fc.seed = c.seed;
  return fc;
}

struct TrainedForecaster {
  forecast::Forecaster model;
  forecast::TrainingHistory history;
  std::optional<forecast::Metrics> test;
  std::optional<forecast::Metrics> persistence;
};

TrainedForecaster train_forecaster(Context& c, const nn::Matrix& hourly) {
  return in_module("forecast", [&] {
    const auto fc = forecaster_config(c);
    auto split = forecast::make_windows(hourly, fc.window_len, fc.horizon, c.config.train_fraction);
    c.say("training " + std::string(nn::cell_kind_name(fc.cell)) + " forecaster on " +
          std::to_string(split.train.size()) + " windows");
    TrainedForecaster t;
    t.model = forecast::Forecaster::train(split.train, fc, &t.history);
    if (split.test.size() > 0) {
      t.test = forecast::eval_metrics(t.model.predict(split.test), split.test.targets);
      t.persistence = forecast::eval_metrics(forecast::persistence_forecast(split.test), split.test.targets);
    }
    return t;
  });
}

forecast::Forecaster read_forecaster(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw NotFound("forecaster document '" + path + "' not found; run train-lstm first");
  try {
    return forecast::Forecaster::from_json(nlohmann::json::parse(f));
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(path + ": " + e.what());
  }
}

void write_json(const std::string& path, const nlohmann::json& j) {
  std::ofstream f(path);
  if (!f) throw IoError("cannot open '" + path + "' for writing");
  f << j.dump(1) << '\n';
  if (!f) throw IoError("write failed for '" + path + "'");
}

nlohmann::json read_json(const std::string& path, const std::string& what) {
  std::ifstream f(path);
  if (!f) throw NotFound(what + " '" + path + "' not found");
  try {
    return nlohmann::json::parse(f);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(path + ": " + e.what());
  }
}

env::WindCalendar calendar(const Context& c, const nn::Matrix& hourly, std::size_t window_len) {
  return in_module("env", [&] {
    return env::WindCalendar(hourly, std::max<std::size_t>(24, window_len), 0, c.config.forecaster.p_max);
  });
}

// The forecaster of a run: --model when given (or recorded), else trained
// in place and saved next to the run's other artifacts.
std::shared_ptr<const forecast::Forecaster> run_forecaster(Context& c, const nn::Matrix& hourly) {
  const std::string model = c.input_path("model", c.options.model_path);
  if (!model.empty()) {
    auto f = in_module("cli_data", [&] { return read_forecaster(model); });
    c.input("model", model);
    return std::make_shared<const forecast::Forecaster>(std::move(f));
  }
  auto t = train_forecaster(c, hourly);
  if (t.test) c.manifest.metrics["forecaster"] = metrics_json(*t.test);
  in_module("cli_data", [&] { write_json(c.artifact("forecaster.json"), t.model.to_json()); });
  return std::make_shared<const forecast::Forecaster>(std::move(t.model));
}

bool needs_lstm(const std::vector<scenarios::PricingPolicy>& policies) {
  return std::any_of(policies.begin(), policies.end(), [](const scenarios::PricingPolicy& p) {
    return p.to_env().forecast == env::ForecastMode::lstm;
  });
}

std::size_t thread_count(const CommandOptions& o) {
  if (o.threads > 0) return o.threads;
  if (const char* t = std::getenv("GRIDMARL_THREADS"); t != nullptr && *t != '\0') {
    const double v = text::parse_double(t, "GRIDMARL_THREADS");
    if (v >= 1.0) return static_cast<std::size_t>(v);
    throw ConfigError("GRIDMARL_THREADS must be at least 1");
  }
  return 1;
}

env::EpisodeCallback progress(const Context& c, const std::string& label, std::size_t episodes) {
  const std::size_t every = std::max<std::size_t>(1, episodes / 10);
  return [&c, label, every, episodes](const env::EpisodeMetrics& m, const env::Trainer&) {
    if ((m.episode + 1) % every != 0) return;
    c.say(label + " episode " + std::to_string(m.episode + 1) + "/" + std::to_string(episodes) + " profit " +
          text::format_double(m.summary.lse_profit) + " par " + text::format_double(m.summary.par));
  };
}

// ---- subcommands ----

void synth_data(Context& c) {
  auto records = in_module("cli_data", [&] { return synthesize_wind(synthetic_spec(c.config), c.seed); });
  in_module("cli_data", [&] { write_wind_csv(c.artifact("wind.csv"), records); });
  double mean = 0.0;
  for (const auto& r : records) mean += r.active_power.value_or(0.0);
  c.manifest.metrics = {{"records", records.size()},
                        {"days", c.config.data_days},
                        {"mean_active_power", records.empty() ? 0.0 : mean / static_cast<double>(records.size())}};
}

void train_lstm(Context& c) {
  const auto hourly = hourly_series(c);
  auto t = train_forecaster(c, hourly);
  in_module("cli_data", [&] {
    write_json(c.artifact("forecaster.json"), t.model.to_json());
    std::ofstream f(c.artifact("loss.csv"));
    f << "epoch,loss\n";
    for (std::size_t e = 0; e < t.history.epoch_loss.size(); ++e) {
      f << e + 1 << ',' << text::format_double(t.history.epoch_loss[e]) << '\n';
    }
    if (!f) throw IoError("write failed for loss.csv");
    std::vector<std::pair<std::string, double>> rows = {
        {"final_loss", t.history.epoch_loss.empty() ? 0.0 : t.history.epoch_loss.back()}};
    if (t.test) {
      rows.emplace_back("rmse", t.test->rmse);
      rows.emplace_back("mae", t.test->mae);
      if (t.test->mape) rows.emplace_back("mape", *t.test->mape);
      rows.emplace_back("persistence_rmse", t.persistence->rmse);
    }
    write_name_value_csv(c.artifact("metrics.csv"), rows);
  });
  c.manifest.metrics["final_loss"] = t.history.epoch_loss.empty() ? 0.0 : t.history.epoch_loss.back();
  if (t.test) {
    c.manifest.metrics["test"] = metrics_json(*t.test);
    c.manifest.metrics["persistence"] = metrics_json(*t.persistence);
    c.say("test rmse " + text::format_double(t.test->rmse) + " MW (persistence " +
          text::format_double(t.persistence->rmse) + ")");
  }
}

void forecast_cmd(Context& c) {
  const std::string model_path = c.input_path("model", c.options.model_path);
  if (model_path.empty()) throw TaggedError(ErrorCode::not_found, "cli_data: forecast needs --model <forecaster.json>; run train-lstm first");
  auto model = in_module("cli_data", [&] { return read_forecaster(model_path); });
  c.input("model", model_path);
  const auto hourly = hourly_series(c);
  in_module("forecast", [&] {
    const auto& fc = model.config();
    auto split = forecast::make_windows(hourly, fc.window_len, fc.horizon, c.config.train_fraction);
    if (split.test.size() == 0) throw InsufficientData("no held-out windows to forecast");
    // One forecast per held-out day.
    forecast::WindowedDataset days;
    days.window_len = split.test.window_len;
    days.horizon = split.test.horizon;
    std::vector<Eigen::Index> rows;
    for (std::size_t s = 0; s < split.test.size(); s += 24) {
      days.inputs.push_back(split.test.inputs[s]);
      rows.push_back(static_cast<Eigen::Index>(s));
    }
    days.targets.resize(static_cast<Eigen::Index>(rows.size()), split.test.targets.cols());
    for (std::size_t k = 0; k < rows.size(); ++k) days.targets.row(static_cast<Eigen::Index>(k)) = split.test.targets.row(rows[k]);
    const auto pred = model.predict(days);
    const auto persist = forecast::persistence_forecast(days);
    std::ofstream f(c.artifact("forecast.csv"));
    f << "origin,lead_hours,forecast,persistence,actual\n";
    for (Eigen::Index k = 0; k < pred.rows(); ++k) {
      for (Eigen::Index h = 0; h < pred.cols(); ++h) {
        f << k << ',' << h + 1 << ',' << text::format_double(pred(k, h)) << ','
          << text::format_double(persist(k, h)) << ',' << text::format_double(days.targets(k, h)) << '\n';
      }
    }
    if (!f) throw IoError("write failed for forecast.csv");
    const auto m = forecast::eval_metrics(pred, days.targets);
    const auto p = forecast::eval_metrics(persist, days.targets);
    c.manifest.metrics = {{"forecast", metrics_json(m)}, {"persistence", metrics_json(p)}, {"days", pred.rows()}};
    std::vector<std::pair<std::string, double>> rows_out = {{"rmse", m.rmse}, {"mae", m.mae}, {"persistence_rmse", p.rmse}};
    write_name_value_csv(c.artifact("metrics.csv"), rows_out);
  });
}

std::shared_ptr<const env::ExogenousSource> make_source(const Context& c, const env::WindCalendar& wind,
                                                         env::ForecastMode mode,
                                                         std::shared_ptr<const forecast::Forecaster> model) {
  return in_module("env", [&] {
    if (mode == env::ForecastMode::lstm) model = std::make_shared<const forecast::Forecaster>(*model);
    return std::make_shared<const env::ExogenousSource>(c.config.env, wind, c.seed, mode, model);
  });
}

void train_agents(Context& c) {
  auto policy = in_module("scenarios", [&] {
    return scenarios::make_policy(c.options.scenario, c.config.scenarios, c.config.env.steps);
  });
  const auto hourly = hourly_series(c);
  std::shared_ptr<const forecast::Forecaster> model;
  if (needs_lstm({policy})) model = run_forecaster(c, hourly);
  const auto wind = calendar(c, hourly, model ? model->config().window_len : 24);
  const auto source = make_source(c, wind, policy.to_env().forecast, model);
  auto training = c.config.training;
  training.checkpoint_dir = c.out.string();
  const auto label = policy.name;
  auto run = in_module("env", [&] {
    return scenarios::run_scenario(policy, c.config.env, training, source, c.seed, training.eval_days,
                                   progress(c, label, training.episodes));
  });
  in_module("cli_data", [&] {
    env::write_metrics_csv(c.artifact("metrics.csv"), run.history);
    nlohmann::json doc = {{"format", "gridmarl.agents"},
                          {"version", 1},
                          {"scenario", policy.name},
                          {"config", c.manifest.config},
                          {"seed", c.seed},
                          {"inputs", c.manifest.inputs},
                          {"trainer", run.trainer->to_json()}};
    doc["forecaster"] = model ? model->to_json() : nlohmann::json(nullptr);
    write_json(c.artifact("agents.json"), doc);
  });
  if (training.checkpoint_every > 0) c.manifest.artifacts.push_back("checkpoint.json");
  c.manifest.metrics["scenario"] = scenarios::to_json(run.report);
  c.say("last " + std::to_string(run.report.days) + " episodes: profit " + text::format_double(run.report.profit_mean) +
        " $/day, par " + text::format_double(run.report.par_mean));
}

void evaluate(Context& c) {
  const std::string checkpoint = c.input_path("checkpoint", c.options.checkpoint_path);
  if (checkpoint.empty()) {
    throw TaggedError(ErrorCode::not_found,
                      "cli_data: evaluate needs an agent checkpoint (--checkpoint <run>/agents.json from train-agents)");
  }
  const auto doc = in_module("cli_data", [&] {
    auto j = read_json(checkpoint, "agent checkpoint");
    if (j.value("format", std::string()) != "gridmarl.agents") {
      throw ParseError("'" + checkpoint + "' is not an agent checkpoint written by train-agents");
    }
    return j;
  });
  c.input("checkpoint", checkpoint);
  // The training run's config and inputs define the environment.
  in_module("cli_data", [&] {
    c.config = run_config_from_json(doc.at("config"));
    c.seed = doc.at("seed").get<std::uint64_t>();
    if (c.options.seed && *c.options.seed != c.seed) {
      throw ConfigError("--seed differs from the checkpoint's training seed");
    }
    c.config.seed = c.seed;
    c.manifest.config = to_json(c.config);
    c.manifest.config_hash = config_hash(c.manifest.config);
    c.manifest.seed = c.seed;
    c.previous_inputs = doc.at("inputs");
  });
  const auto scenario = doc.at("scenario").get<std::string>();
  auto policy = in_module("scenarios", [&] {
    return scenarios::make_policy(scenario, c.config.scenarios, c.config.env.steps);
  });
  const auto hourly = hourly_series(c);
  std::shared_ptr<const forecast::Forecaster> model;
  if (!doc.at("forecaster").is_null()) {
    model = in_module("forecast", [&] {
      return std::make_shared<const forecast::Forecaster>(forecast::Forecaster::from_json(doc.at("forecaster")));
    });
  }
  const auto wind = calendar(c, hourly, model ? model->config().window_len : 24);
  const auto source = make_source(c, wind, policy.to_env().forecast, model);
  const std::size_t days = c.options.days > 0 ? c.options.days : c.config.training.eval_days;
  std::vector<env::EpisodeMetrics> history;
  std::vector<env::StepRecord> first_log;
  in_module("env", [&] {
    env::Trainer trainer(c.config.env, c.config.training, policy.to_env(), source, c.seed);
    trainer.load_state(doc.at("trainer"));
    for (std::size_t k = 0; k < days; ++k) {
      history.push_back(trainer.run_episode(false, false, k == 0 ? &first_log : nullptr));
    }
  });
  const auto report = in_module("scenarios", [&] { return scenarios::summarize(scenario, history, days); });
  in_module("cli_data", [&] {
    env::write_metrics_csv(c.artifact("eval_metrics.csv"), history);
    env::write_episode_log_csv(c.artifact("episode_log.csv"), first_log);
  });
  c.manifest.metrics = scenarios::to_json(report);
  c.say(std::to_string(days) + " greedy days: profit " + text::format_double(report.profit_mean) + " $/day, par " +
        text::format_double(report.par_mean));
}

void compare(Context& c) {
  const auto names = c.options.scenarios.empty() ? c.config.compare : c.options.scenarios;
  auto policies = in_module("scenarios", [&] {
    if (names.size() < 2) throw InvalidArgument("compare needs at least two scenarios");
    std::vector<scenarios::PricingPolicy> out;
    for (const auto& n : names) out.push_back(scenarios::make_policy(n, c.config.scenarios, c.config.env.steps));
    return out;
  });
  const auto hourly = hourly_series(c);
  std::shared_ptr<const forecast::Forecaster> model;
  if (needs_lstm(policies)) model = run_forecaster(c, hourly);
  const auto wind = calendar(c, hourly, model ? model->config().window_len : 24);
  const std::size_t threads = in_module("cli_data", [&] { return std::min(thread_count(c.options), policies.size()); });

  std::vector<scenarios::ScenarioRun> runs(policies.size());
  std::vector<std::exception_ptr> errors(policies.size());
  std::mutex log_mutex;
  Context quiet = c;
  quiet.log = [&](const std::string& line) {
    std::lock_guard<std::mutex> lock(log_mutex);
    if (c.log) c.log(line);
  };
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t k = next++; k < policies.size(); k = next++) {
      try {
        // Each scenario reads its own copy of the same exogenous streams.
        const auto source = make_source(c, wind, policies[k].to_env().forecast, model);
        runs[k] = in_module("env", [&] {
          return scenarios::run_scenario(policies[k], c.config.env, c.config.training, source, c.seed,
                                         c.config.training.eval_days,
                                         progress(quiet, policies[k].name, c.config.training.episodes));
        });
      } catch (...) {
        errors[k] = std::current_exception();
      }
    }
  };
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  std::vector<scenarios::ScenarioReport> reports;
  for (const auto& r : runs) reports.push_back(r.report);
  const auto table = in_module("scenarios", [&] { return scenarios::compare_scenarios(reports); });
  in_module("cli_data", [&] {
    scenarios::write_scenarios_csv(c.artifact("scenarios.csv"), table);
    write_json(c.artifact("comparison.json"), scenarios::to_json(table));
    for (std::size_t k = 0; k < runs.size(); ++k) {
      env::write_metrics_csv(c.artifact("metrics_" + policies[k].name + ".csv"), runs[k].history);
    }
  });
  c.manifest.metrics = scenarios::to_json(table);
  for (const auto& row : table.rows) {
    c.say(row.report.scenario + ": profit " + text::format_double(row.report.profit_mean) + " $/day, par " +
          text::format_double(row.report.par_mean));
  }
}

// ---- export-plots ----

void export_episode_log(const std::string& run, const std::vector<env::StepRecord>& log, std::ofstream& prices,
                        std::ofstream& socs, double dt) {
  using text::format_double;
  for (const auto& r : log) {
    const double hour = static_cast<double>(r.step) * dt;
    prices << run << ',' << r.step << ',' << format_double(hour) << ',' << format_double(r.price.buy) << ','
           << format_double(r.price.sell) << ',' << format_double(r.l_da) << ','
           << format_double(r.settlement.aggregate) << ',' << format_double(r.settlement.aggregate - r.l_da) << ','
           << format_double(r.rho_da) << ',' << format_double(r.rho_rt) << ',' << format_double(r.wind_available)
           << '\n';
    for (std::size_t i = 0; i < r.soc_after.size(); ++i) {
      socs << run << ',' << r.step << ',' << format_double(hour) << ',' << i << ',' << format_double(r.demand[i])
           << ',' << format_double(r.pv[i]) << ',' << format_double(r.b[i]) << ',' << format_double(r.soc_after[i])
           << '\n';
    }
  }
}

void export_plots(Context& c) {
  if (c.options.from.empty()) {
    throw TaggedError(ErrorCode::invalid_argument, "cli_data: export-plots needs at least one --from <run directory>");
  }
  in_module("cli_data", [&] {
    for (const auto& dir : c.options.from) {
      const fs::path d(dir);
      if (!fs::is_directory(d)) throw NotFound("run directory '" + dir + "' not found");
      if (!fs::exists(d / "episode_log.csv") && !fs::exists(d / "scenarios.csv") && !fs::exists(d / "forecast.csv")) {
        throw NotFound("'" + dir + "' holds no episode_log.csv, scenarios.csv or forecast.csv");
      }
    }
    std::ofstream prices, socs, par, fva;
    std::size_t written = 0;
    auto open = [&](std::ofstream& f, const std::string& name, const char* header) {
      if (f.is_open()) return;
      f.open(c.artifact(name));
      if (!f) throw IoError("cannot open '" + name + "' for writing");
      f << header << '\n';
    };
    for (const auto& dir : c.options.from) {
      const fs::path d(dir);
      const std::string run = d.filename().empty() ? d.parent_path().filename().string() : d.filename().string();
      bool used = false;
      if (fs::exists(d / "episode_log.csv")) {
        open(prices, "price_trace.csv", "run,step,hour,price_buy,price_sell,load_da_kw,load_rt_kw,deficiency_kw,lmp_da,lmp_rt,wind_mw");
        open(socs, "soc_profile.csv", "run,step,hour,prosumer,demand_kw,pv_kw,battery_kw,soc");
        const auto log = env::read_episode_log_csv((d / "episode_log.csv").string());
        export_episode_log(run, log, prices, socs, c.config.env.dt);
        c.input(run + "/episode_log.csv", (d / "episode_log.csv").string());
        used = true;
      }
      if (fs::exists(d / "scenarios.csv")) {
        open(par, "par_bars.csv", "run,scenario,par_mean,profit_mean,bill_mean");
        std::ifstream f(d / "scenarios.csv");
        std::string line;
        std::getline(f, line);
        while (std::getline(f, line)) {
          if (line.empty()) continue;
          const auto cells = text::split(line, ',');
          if (cells.size() != 6) throw ParseError((d / "scenarios.csv").string() + ": malformed row '" + line + "'");
          par << run << ',' << cells[0] << ',' << cells[3] << ',' << cells[1] << ',' << cells[4] << '\n';
        }
        c.input(run + "/scenarios.csv", (d / "scenarios.csv").string());
        used = true;
      }
      if (fs::exists(d / "forecast.csv")) {
        open(fva, "forecast_vs_actual.csv", "run,origin,lead_hours,forecast,persistence,actual");
        std::ifstream f(d / "forecast.csv");
        std::string line;
        std::getline(f, line);
        while (std::getline(f, line)) {
          if (!line.empty()) fva << run << ',' << line << '\n';
        }
        c.input(run + "/forecast.csv", (d / "forecast.csv").string());
        used = true;
      }
      if (used) ++written;
    }
    for (auto* f : {&prices, &socs, &par, &fva}) {
      if (f->is_open() && !*f) throw IoError("write failed while exporting plot data");
    }
    c.manifest.metrics = {{"runs", written}};
  });
}

}  // namespace

const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names = {"synth-data", "train-lstm", "forecast",    "train-agents",
                                                 "evaluate",   "compare",    "export-plots"};
  return names;
}

std::string artifact_version() { return "gridmarl 0.1.0"; }

RunManifest run_command(const std::string& command, const CommandOptions& options, const LogFn& log) {
  const auto& names = command_names();
  if (std::find(names.begin(), names.end(), command) == names.end()) {
    throw TaggedError(ErrorCode::invalid_argument, "cli_data: unknown command '" + command + "'");
  }
  Context c = make_context(command, options, log);
  try {
    if (command == "synth-data") synth_data(c);
    else if (command == "train-lstm") train_lstm(c);
    else if (command == "forecast") forecast_cmd(c);
    else if (command == "train-agents") train_agents(c);
    else if (command == "evaluate") evaluate(c);
    else if (command == "compare") compare(c);
    else export_plots(c);
  } catch (const TaggedError&) {
    throw;
  } catch (const Error& e) {
    throw TaggedError(e.code(), "cli_data: " + std::string(e.what()));
  } catch (const nlohmann::json::exception& e) {
    throw TaggedError(ErrorCode::parse, "cli_data: " + std::string(e.what()));
  }
  return finish(c);
}

}  // namespace gridmarl::data
