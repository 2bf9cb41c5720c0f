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


#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iterator>

#include "gridmarl/data.hpp"
#include "gridmarl/errors.hpp"
#include "gridmarl/rng.hpp"

namespace gridmarl::data {

nlohmann::json RunManifest::to_json() const {
  return {{"format", "gridmarl.manifest"},
          {"version", 1},
          {"command", command},
          {"artifact_version", artifact_version},
          {"config_hash", config_hash},
          {"seed", seed},
          {"started_at", started_at},
          {"finished_at", finished_at},
          {"artifacts", artifacts},
          {"inputs", inputs},
          {"metrics", metrics},
          {"config", config}};
}

RunManifest RunManifest::from_json(const nlohmann::json& j) {
  try {
    if (j.value("format", std::string()) != "gridmarl.manifest") throw ParseError("not a run manifest");
    RunManifest m;
    m.command = j.at("command").get<std::string>();
    m.artifact_version = j.at("artifact_version").get<std::string>();
    m.config_hash = j.at("config_hash").get<std::string>();
    m.seed = j.at("seed").get<std::uint64_t>();
    m.started_at = j.value("started_at", std::string());
    m.finished_at = j.value("finished_at", std::string());
    m.artifacts = j.value("artifacts", std::vector<std::string>{});
    m.inputs = j.value("inputs", nlohmann::json::object());
    m.metrics = j.value("metrics", nlohmann::json::object());
    m.config = j.at("config");
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("manifest: ") + e.what());
  }
}

std::string config_hash(const nlohmann::json& config) {
  char buf[20];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(fnv1a64(config.dump())));
  return buf;
}

std::string file_hash(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw NotFound("cannot open '" + path + "'");
  const std::string bytes((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
  char buf[20];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(fnv1a64(bytes)));
  return buf;
}

std::string utc_now() {
  const auto now = std::chrono::system_clock::now();
  return format_timestamp(std::chrono::duration_cast<std::chrono::seconds>(now.time_since_epoch()).count());
}

void write_manifest(const std::string& run_dir, const RunManifest& m) {
  std::filesystem::create_directories(run_dir);
  const auto path = std::filesystem::path(run_dir) / "manifest.json";
  std::ofstream f(path);
  if (!f) throw IoError("cannot write manifest '" + path.string() + "'");
  f << m.to_json().dump(2) << '\n';
  if (!f) throw IoError("write failed for '" + path.string() + "'");
}

RunManifest read_manifest(const std::string& run_dir) {
  const auto path = std::filesystem::path(run_dir) / "manifest.json";
  std::ifstream f(path);
  if (!f) throw NotFound("no manifest at '" + path.string() + "'");
  try {
    return RunManifest::from_json(nlohmann::json::parse(f));
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

}  // namespace gridmarl::data
