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


// gridmarl command-line tool. Parses arguments and calls the C API.

#include <cstdio>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "gridmarl/gridmarl.h"

namespace {

struct Flags {
  std::string config, preset, out, data, scale, model, checkpoint, scenario, scenarios;
  std::vector<std::string> from;
  std::string seed;
  std::size_t days = 0;
  std::size_t threads = 0;
};

void log_line(void*, const char* line) { std::fprintf(stderr, "%s\n", line); }

int fail(gm_context* ctx, gm_status s) {
  std::fprintf(stderr, "gridmarl: error [%s]: %s\n", gm_status_name(s), gm_last_error(ctx));
  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Wind-aware retail pricing with LSTM forecasts and multi-agent DDPG"};
  app.require_subcommand(1);
  app.fallthrough();
  bool quiet = false;
  bool print_manifest = false;
  app.add_flag("-q,--quiet", quiet, "suppress progress lines");
  app.add_flag("--print-manifest", print_manifest, "print the run manifest to stdout");
  app.set_version_flag("--version", std::string(gm_version()));

  Flags f;
  auto common = [&](CLI::App* sub, bool takes_config) {
    if (takes_config) {
      sub->add_option("--config", f.config, "config document or run manifest (JSON)");
      sub->add_option("--preset", f.preset, "preset used without --config")->check(CLI::IsMember({"default", "test"}));
      sub->add_option("--seed", f.seed, "master seed (overrides the config)")->check(CLI::NonNegativeNumber);
    }
    sub->add_option("--out", f.out, "run directory (default $GRIDMARL_OUT/<command> or runs/<command>)");
  };
  auto data_opts = [&](CLI::App* sub) {
    sub->add_option("--data", f.data, "wind CSV; synthesized from the config when omitted");
    sub->add_option("--scale", f.scale, "active power scale factor, or 'auto' to map the maximum onto the plant");
  };

  auto* synth = app.add_subcommand("synth-data", "write a synthetic 10-minute wind dataset");
  common(synth, true);
  auto* lstm = app.add_subcommand("train-lstm", "train the day-ahead wind forecaster");
  common(lstm, true);
  data_opts(lstm);
  auto* fc = app.add_subcommand("forecast", "day-ahead forecasts on the held-out days");
  common(fc, true);
  data_opts(fc);
  fc->add_option("--model", f.model, "forecaster document from train-lstm");
  auto* agents = app.add_subcommand("train-agents", "train the LSA and prosumer agents");
  common(agents, true);
  data_opts(agents);
  agents->add_option("--model", f.model, "forecaster document; trained in place when omitted");
  agents->add_option("--scenario", f.scenario, "pricing scenario")
      ->check(CLI::IsMember({"fixed", "tou_a", "tou_b", "dynamic", "dynamic_band"}));
  auto* eval = app.add_subcommand("evaluate", "greedy evaluation of trained agents");
  common(eval, true);
  eval->add_option("--checkpoint", f.checkpoint, "agents.json written by train-agents");
  eval->add_option("--days", f.days, "evaluation days (default: the config's eval_days)")->check(CLI::PositiveNumber);
  auto* cmp = app.add_subcommand("compare", "train and compare pricing scenarios");
  common(cmp, true);
  data_opts(cmp);
  cmp->add_option("--model", f.model, "forecaster document; trained in place when omitted");
  cmp->add_option("--scenarios", f.scenarios, "comma-separated scenario names");
  cmp->add_option("--threads", f.threads, "scenarios trained concurrently")->check(CLI::PositiveNumber);
  auto* plots = app.add_subcommand("export-plots", "tidy CSVs for plotting from run directories");
  common(plots, false);
  plots->add_option("--from", f.from, "run directory (repeatable)")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  gm_context* ctx = nullptr;
  if (gm_context_create(&ctx) != GM_OK) {
    std::fprintf(stderr, "gridmarl: error: cannot create context\n");
    return 1;
  }
  if (!quiet) gm_set_log(ctx, log_line, nullptr);
  gm_options* opts = nullptr;
  gm_status s = gm_options_create(ctx, &opts);
  if (s != GM_OK) return fail(ctx, s);

  const std::vector<std::pair<const char*, const std::string*>> pairs = {
      {"config", &f.config},     {"preset", &f.preset},         {"seed", &f.seed},
      {"out", &f.out},           {"data", &f.data},             {"scale", &f.scale},
      {"model", &f.model},       {"checkpoint", &f.checkpoint}, {"scenario", &f.scenario},
      {"scenarios", &f.scenarios}};
  for (const auto& [key, value] : pairs) {
    if (!value->empty() && (s = gm_options_set(ctx, opts, key, value->c_str())) != GM_OK) break;
  }
  for (const auto& dir : f.from) {
    if (s == GM_OK) s = gm_options_set(ctx, opts, "from", dir.c_str());
  }
  if (s == GM_OK && f.days > 0) s = gm_options_set(ctx, opts, "days", std::to_string(f.days).c_str());
  if (s == GM_OK && f.threads > 0) s = gm_options_set(ctx, opts, "threads", std::to_string(f.threads).c_str());
  if (s == GM_OK) s = gm_run(ctx, app.get_subcommands().front()->get_name().c_str(), opts);

  int code = 0;
  if (s != GM_OK) {
    code = fail(ctx, s);
  } else if (print_manifest) {
    std::printf("%s\n", gm_result(ctx));
  }
  gm_options_destroy(opts);
  gm_context_destroy(ctx);
  return code;
}
