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
#include <chrono>
#include <cstdio>
#include <fstream>

#include "gridmarl/data.hpp"
#include "gridmarl/errors.hpp"
#include "gridmarl/text.hpp"

namespace gridmarl::data {

namespace {

const char* kHeader = "timestamp,wind_speed,wind_direction,temperature,active_power";

}  // namespace

std::string format_timestamp(std::int64_t unix_seconds) {
  using namespace std::chrono;
  const sys_seconds tp{seconds{unix_seconds}};
  const auto day = floor<days>(tp);
  const year_month_day ymd{day};
  const hh_mm_ss hms{tp - day};
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%04d-%02u-%02uT%02d:%02d:%02dZ", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()),
                static_cast<int>(hms.hours().count()), static_cast<int>(hms.minutes().count()),
                static_cast<int>(hms.seconds().count()));
  return buf;
}

std::int64_t parse_timestamp(const std::string& s) {
  if (!s.empty() && s.find('-') == std::string::npos) return text::parse_int(s, "timestamp");
  int y = 0;
  unsigned mo = 0, d = 0;
  int h = 0, mi = 0, se = 0;
  char tail = 0;
  const int got = std::sscanf(s.c_str(), "%4d-%2u-%2uT%2d:%2d:%2d%c", &y, &mo, &d, &h, &mi, &se, &tail);
  if (got < 6 || (got == 7 && tail != 'Z')) throw ParseError("timestamp: cannot parse '" + s + "'");
  using namespace std::chrono;
  const year_month_day ymd{year{y}, month{mo}, day{d}};
  if (!ymd.ok() || h < 0 || h > 23 || mi < 0 || mi > 59 || se < 0 || se > 60) {
    throw ParseError("timestamp: invalid date or time '" + s + "'");
  }
  const sys_seconds tp = sys_days{ymd} + hours{h} + minutes{mi} + seconds{se};
  return tp.time_since_epoch().count();
}

void write_wind_csv(const std::string& path, const std::vector<forecast::WindRecord>& records) {
  std::ofstream f(path);
  if (!f) throw IoError("cannot open '" + path + "' for writing");
  f << kHeader << '\n';
  for (const auto& r : records) {
    f << format_timestamp(r.timestamp);
    for (std::size_t k = 0; k < forecast::kFeatureCount; ++k) {
      f << ',';
      if (r.field(k)) f << text::format_double(*r.field(k));
    }
    f << '\n';
  }
  if (!f) throw IoError("write failed for '" + path + "'");
}

std::vector<forecast::WindRecord> load_wind_csv(const std::string& path, std::optional<double> scale, double p_max) {
  std::ifstream f(path);
  if (!f) throw IoError("cannot open wind data '" + path + "'");
  std::string line;
  std::vector<forecast::WindRecord> out;
  if (!std::getline(f, line)) return out;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kHeader) throw ParseError(path + ":1: expected header '" + std::string(kHeader) + "'");
  std::size_t line_no = 1;
  while (std::getline(f, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const std::string where = path + ":" + std::to_string(line_no);
    const auto cols = text::split(line, ',');
    if (cols.size() != 1 + forecast::kFeatureCount) {
      throw ParseError(where + ": expected " + std::to_string(1 + forecast::kFeatureCount) + " fields, got " +
                       std::to_string(cols.size()));
    }
    forecast::WindRecord r;
    try {
      r.timestamp = parse_timestamp(std::string(cols[0]));
    } catch (const ParseError& e) {
      throw ParseError(where + ": " + e.what());
    }
    for (std::size_t k = 0; k < forecast::kFeatureCount; ++k) {
      if (!cols[k + 1].empty()) r.field(k) = text::parse_double(cols[k + 1], where);
    }
    if (scale && r.active_power) r.active_power = std::clamp(*r.active_power * *scale, 0.0, p_max);
    out.push_back(r);
  }
  try {
    forecast::check_ordering(out);
  } catch (const Error& e) {
    throw InvalidArgument(path + ": " + e.what());
  }
  return out;
}

double scale_to_capacity(const std::vector<forecast::WindRecord>& records, double p_max) {
  double hi = 0.0;
  for (const auto& r : records) {
    if (r.active_power) hi = std::max(hi, *r.active_power);
  }
  if (!(hi > 0.0)) throw InsufficientData("scale_to_capacity: no positive active power in the data");
  return p_max / hi;
}

}  // namespace gridmarl::data
