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

#include <string>
#include <string_view>
#include <vector>

namespace gridmarl::text {

// Shortest representation that parses back to the same double.
std::string format_double(double v);
// Throws ParseError mentioning `what` on malformed input.
double parse_double(std::string_view s, const std::string& what);
long long parse_int(std::string_view s, const std::string& what);

std::vector<std::string_view> split(std::string_view s, char sep);
std::string join(const std::vector<double>& values, char sep);
std::vector<double> parse_list(std::string_view s, char sep, const std::string& what);

}  // namespace gridmarl::text
