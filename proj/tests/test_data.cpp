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
#include <numeric>

#include "gridmarl/config.hpp"
#include "gridmarl/data.hpp"
#include "gridmarl/errors.hpp"

using namespace gridmarl;
using namespace gridmarl::data;

namespace {

std::filesystem::path scratch_dir(const std::string& name) {
  auto p = std::filesystem::temp_directory_path() / ("gridmarl_test_data_" + name);
  std::filesystem::remove_all(p);
  std::filesystem::create_directories(p);
  return p;
}

std::string write_text(const std::filesystem::path& path, const std::string& body) {
  std::ofstream f(path);
  f << body;
  return path.string();
}

const char* kHeader = "timestamp,wind_speed,wind_direction,temperature,active_power\n";

double lag1_autocorrelation(const std::vector<double>& x) {
  const double mean = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
  double num = 0.0, den = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    den += (x[k] - mean) * (x[k] - mean);
    if (k > 0) num += (x[k] - mean) * (x[k - 1] - mean);
  }
  return num / den;
}

template <class F>
std::string error_text(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.what();
  }
  return {};
}

}  // namespace

TEST_SUITE("synthetic wind") {
  TEST_CASE("ar(1) noise has the configured lag-1 autocorrelation") {
    SyntheticProfileSpec s;
    s.days = 70;  // 10080 records
    s.wind.ar_coefficient = 0.9;
    s.wind.noise_std = 2.0;
    s.wind.diurnal_amplitude = 0.0;
    s.wind.mean_speed = 40.0;  // keeps the speed clear of the zero floor
    const auto rec = synthesize_wind(s, 3);
    REQUIRE(rec.size() >= 10000);
    std::vector<double> speed;
    for (const auto& r : rec) speed.push_back(*r.wind_speed);
    const double rho = lag1_autocorrelation(speed);
    CHECK(rho >= 0.85);
    CHECK(rho <= 0.95);
  }

  TEST_CASE("zero noise gives a daily periodic series") {
    SyntheticProfileSpec s;
    s.days = 4;
    s.wind.noise_std = 0.0;
    s.wind.direction_noise = 0.0;
    s.wind.temperature_noise = 0.0;
    const auto rec = synthesize_wind(s, 1);
    for (std::size_t k = 144; k < rec.size(); ++k) {
      for (std::size_t f = 0; f < forecast::kFeatureCount; ++f) {
        CHECK(*rec[k].field(f) == doctest::Approx(*rec[k - 144].field(f)).epsilon(1e-12));
      }
    }
  }

  TEST_CASE("cadence, capacity and seeding") {
    SyntheticProfileSpec s;
    s.days = 5;
    const auto a = synthesize_wind(s, 7);
    const auto b = synthesize_wind(s, 7);
    const auto c = synthesize_wind(s, 8);
    REQUIRE(a.size() == 5 * 144);
    CHECK(a == b);
    CHECK(a != c);
    for (std::size_t k = 0; k < a.size(); ++k) {
      if (k > 0) CHECK(a[k].timestamp - a[k - 1].timestamp == kRecordSpacing);
      CHECK(*a[k].active_power >= 0.0);
      CHECK(*a[k].active_power <= 50.0);
      CHECK(*a[k].wind_speed >= 0.0);
    }
  }

  TEST_CASE("zero days is rejected") {
    SyntheticProfileSpec s;
    s.days = 0;
    CHECK_THROWS_AS(synthesize_wind(s, 1), InvalidArgument);
  }

  TEST_CASE("power curve") {
    WindModelSpec w;
    CHECK(power_curve(w, 2.0) == 0.0);
    CHECK(power_curve(w, 12.0) == doctest::Approx(50.0));
    CHECK(power_curve(w, 20.0) == doctest::Approx(50.0));
    CHECK(power_curve(w, 26.0) == 0.0);
    CHECK(power_curve(w, 7.0) > 0.0);
    CHECK(power_curve(w, 7.0) < power_curve(w, 9.0));
  }

  TEST_CASE("household profiles stay within capacity") {
    env::ProfileSpec p;
    for (std::int64_t d = 1; d <= 20; ++d) {
      const auto prof = env::make_day_profile(p, 4, d, 96);
      CHECK(prof.prosumer_demand.minCoeff() >= 0.0);
      CHECK(prof.consumer_demand.minCoeff() >= 0.0);
      CHECK(prof.pv.minCoeff() >= 0.0);
      CHECK(prof.pv.maxCoeff() <= p.pv_max_kw);
      CHECK(prof.sunny == env::day_is_sunny(p, 4, d));
    }
  }
}

TEST_SUITE("wind csv") {
  TEST_CASE("round trip reproduces the records") {
    SyntheticProfileSpec s;
    s.days = 3;
    auto rec = synthesize_wind(s, 5);
    rec[10].temperature.reset();
    rec[11].active_power.reset();
    const auto dir = scratch_dir("roundtrip");
    const auto path = (dir / "wind.csv").string();
    write_wind_csv(path, rec);
    CHECK(load_wind_csv(path) == rec);
    std::filesystem::remove_all(dir);
  }

  TEST_CASE("header only gives an empty list") {
    const auto dir = scratch_dir("empty");
    CHECK(load_wind_csv(write_text(dir / "w.csv", kHeader)).empty());
    std::filesystem::remove_all(dir);
  }

  TEST_CASE("empty field marks a missing value") {
    const auto dir = scratch_dir("missing");
    const auto path = write_text(dir / "w.csv", std::string(kHeader) + "2020-01-01T00:00:00Z,7.5,180,10,\n" +
                                                    "1577836800600,8,190,,20\n");
    const auto rec = load_wind_csv(path);
    REQUIRE(rec.size() == 2);
    CHECK_FALSE(rec[0].active_power.has_value());
    CHECK(*rec[0].wind_speed == 7.5);
    CHECK(rec[1].timestamp == 1577836800600);
    CHECK_FALSE(rec[1].temperature.has_value());
    CHECK_FALSE(rec[0].complete());
    std::filesystem::remove_all(dir);
  }

  TEST_CASE("scaling keeps power within the plant capacity") {
    const auto dir = scratch_dir("scale");
    const auto path = write_text(dir / "w.csv", std::string(kHeader) + "2020-01-01T00:00:00Z,7,180,10,400\n" +
                                                    "2020-01-01T00:10:00Z,7,180,10,1000\n" +
                                                    "2020-01-01T00:20:00Z,7,180,10,\n");
    const auto raw = load_wind_csv(path);
    const double s = scale_to_capacity(raw, 50.0);
    CHECK(s == doctest::Approx(0.05));
    const auto scaled = load_wind_csv(path, s, 50.0);
    CHECK(*scaled[1].active_power == doctest::Approx(50.0));
    CHECK(*scaled[0].active_power == doctest::Approx(20.0));
    CHECK_FALSE(scaled[2].active_power.has_value());
    for (const auto& r : load_wind_csv(path, 1.0, 50.0)) {
      if (r.active_power) CHECK(*r.active_power <= 50.0);
    }
    std::filesystem::remove_all(dir);
  }

  TEST_CASE("malformed rows name their line") {
    const auto dir = scratch_dir("malformed");
    const auto bad_value = write_text(dir / "a.csv", std::string(kHeader) + "2020-01-01T00:00:00Z,7,180,10,1\n" +
                                                         "2020-01-01T00:10:00Z,7,x,10,1\n");
    CHECK_THROWS_AS(load_wind_csv(bad_value), ParseError);
    CHECK(error_text([&] { load_wind_csv(bad_value); }).find("a.csv:3") != std::string::npos);

    const auto bad_count = write_text(dir / "b.csv", std::string(kHeader) + "2020-01-01T00:00:00Z,7,180,10\n");
    CHECK(error_text([&] { load_wind_csv(bad_count); }).find("b.csv:2") != std::string::npos);

    const auto bad_time = write_text(dir / "c.csv", std::string(kHeader) + "yesterday,7,180,10,1\n");
    CHECK(error_text([&] { load_wind_csv(bad_time); }).find("c.csv:2") != std::string::npos);

    const auto bad_header = write_text(dir / "d.csv", "time,speed\n");
    CHECK_THROWS_AS(load_wind_csv(bad_header), ParseError);
    std::filesystem::remove_all(dir);
  }

  TEST_CASE("non-increasing timestamps are an ordering error") {
    const auto dir = scratch_dir("order");
    const auto path = write_text(dir / "w.csv", std::string(kHeader) + "2020-01-01T00:10:00Z,7,180,10,1\n" +
                                                    "2020-01-01T00:00:00Z,7,180,10,1\n");
    const auto msg = error_text([&] { load_wind_csv(path); });
    CHECK(msg.find("not strictly increasing") != std::string::npos);
    std::filesystem::remove_all(dir);
  }

  TEST_CASE("missing file") { CHECK_THROWS_AS(load_wind_csv("/nonexistent/wind.csv"), IoError); }

  TEST_CASE("timestamps") {
    CHECK(format_timestamp(0) == "1970-01-01T00:00:00Z");
    CHECK(parse_timestamp("2020-01-01T00:00:00Z") == 1577836800);
    CHECK(parse_timestamp("1577836800") == 1577836800);
    CHECK(parse_timestamp(format_timestamp(1600000123)) == 1600000123);
    CHECK_THROWS_AS(parse_timestamp("2020-13-01T00:00:00Z"), ParseError);
  }
}

TEST_SUITE("config") {
  TEST_CASE("round trip through json") {
    for (const auto& name : preset_names()) {
      const auto c = preset_config(name);
      const auto j = to_json(c);
      CHECK(to_json(run_config_from_json(j)) == j);
    }
  }

  TEST_CASE("overrides are laid over the preset") {
    const auto c = run_config_from_json(
        {{"version", 1}, {"preset", "test"}, {"seed", 9}, {"training", {{"episodes", 12}, {"eval_days", 3}}}});
    CHECK(c.preset == "test");
    CHECK(c.seed == 9);
    CHECK(c.training.episodes == 12);
    CHECK(c.data_days == preset_config("test").data_days);
    CHECK(c.training.lsa.actor.hidden == preset_config("test").training.lsa.actor.hidden);
  }

  TEST_CASE("unknown keys are rejected with their path") {
    const auto msg = error_text([] { run_config_from_json({{"version", 1}, {"env", {{"stepz", 96}}}}); });
    CHECK(msg.find("env.stepz") != std::string::npos);
    CHECK_THROWS_AS(run_config_from_json({{"version", 1}, {"colour", "red"}}), ConfigError);
  }

  TEST_CASE("wrong version and unknown preset are rejected") {
    CHECK_THROWS_AS(run_config_from_json({{"version", 2}}), ConfigError);
    CHECK_THROWS_AS(run_config_from_json({{"seed", 1}}), ConfigError);
    CHECK_THROWS_AS(run_config_from_json({{"version", 1}, {"preset", "huge"}}), ConfigError);
  }

  TEST_CASE("evaluation window must fit the episode count") {
    CHECK_THROWS_AS(run_config_from_json({{"version", 1}, {"training", {{"episodes", 5}, {"eval_days", 6}}}}),
                    ConfigError);
  }
}

TEST_SUITE("manifest") {
  TEST_CASE("config hash matches the stored config") {
    const auto dir = scratch_dir("manifest");
    RunManifest m;
    m.command = "train-lstm";
    m.artifact_version = "test";
    m.seed = 4;
    m.config = to_json(preset_config("test"));
    m.config_hash = config_hash(m.config);
    m.artifacts = {"forecaster.json"};
    m.metrics = {{"rmse", 1.5}};
    write_manifest(dir.string(), m);
    const auto back = read_manifest(dir.string());
    CHECK(back.config == m.config);
    CHECK(config_hash(back.config) == m.config_hash);
    CHECK(back.seed == 4);
    CHECK(back.artifacts == m.artifacts);
    CHECK(back.metrics == m.metrics);
    CHECK(config_hash(to_json(preset_config("default"))) != m.config_hash);
    std::filesystem::remove_all(dir);
  }

  TEST_CASE("missing manifest") { CHECK_THROWS_AS(read_manifest("/nonexistent/run"), NotFound); }

  TEST_CASE("file hash follows the bytes") {
    const auto dir = scratch_dir("hash");
    const auto a = write_text(dir / "a.txt", "abc");
    const auto b = write_text(dir / "b.txt", "abc");
    const auto c = write_text(dir / "c.txt", "abd");
    CHECK(file_hash(a) == file_hash(b));
    CHECK(file_hash(a) != file_hash(c));
    CHECK(file_hash(a).size() == 16);
    std::filesystem::remove_all(dir);
  }
}
