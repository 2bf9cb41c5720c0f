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

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "gridmarl/config.hpp"
#include "gridmarl/data.hpp"

namespace gridmarl::data {

struct CommandOptions {
  std::string config_path;  // a config document or a run manifest
  std::string preset;       // used when config_path is empty
  std::optional<std::uint64_t> seed;
  std::string out_dir;
  std::string data_path;  // wind CSV; synthesized from the config when empty
  std::string data_scale;  // empty, "auto" or a factor
  std::string model_path;  // forecaster document
  std::string checkpoint_path;
  std::string scenario = "dynamic";
  std::vector<std::string> scenarios;  // empty means the config's list
  std::vector<std::string> from;       // export-plots inputs
  std::size_t days = 0;                // 0 means the config's eval_days
  std::size_t threads = 0;             // 0 means GRIDMARL_THREADS or 1
};

using LogFn = std::function<void(const std::string&)>;

const std::vector<std::string>& command_names();
std::string artifact_version();

// Runs one CLI subcommand and returns the manifest it wrote. Errors carry
// the name of the module that raised them.
RunManifest run_command(const std::string& command, const CommandOptions& options, const LogFn& log = {});

}  // namespace gridmarl::data
