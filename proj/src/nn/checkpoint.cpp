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

#include <fstream>
#include <sstream>

#include "gridmarl/nn.hpp"

namespace gridmarl::nn {

nlohmann::json matrix_to_json(const Matrix& m) {
  std::vector<double> values(m.data(), m.data() + m.size());
  return {{"shape", {m.rows(), m.cols()}}, {"values", std::move(values)}};
}

Matrix matrix_from_json(const nlohmann::json& j) {
  const auto shape = j.at("shape").get<std::vector<Eigen::Index>>();
  if (shape.size() != 2 || shape[0] < 0 || shape[1] < 0) throw ParseError("matrix: bad shape");
  const auto& values = j.at("values");
  if (static_cast<Eigen::Index>(values.size()) != shape[0] * shape[1]) {
    throw ParseError("matrix: value count does not match shape");
  }
  Matrix m(shape[0], shape[1]);
  for (Eigen::Index k = 0; k < m.size(); ++k) m.data()[k] = values[static_cast<std::size_t>(k)].get<double>();
  return m;
}

nlohmann::json to_json(const ParamStore& store) {
  nlohmann::json j = nlohmann::json::object();
  for (const auto& [name, m] : store) j[name] = matrix_to_json(m);
  return j;
}

ParamStore param_store_from_json(const nlohmann::json& j) {
  ParamStore store;
  for (const auto& [name, value] : j.items()) store.add(name, matrix_from_json(value));
  return store;
}

void write_json_file(const std::string& path, const nlohmann::json& doc) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << doc.dump(1) << '\n';
  if (!out) throw IoError("failed writing '" + path + "'");
}

nlohmann::json read_json_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw NotFound("missing file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return nlohmann::json::parse(ss.str());
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError("'" + path + "': " + e.what());
  }
}

nlohmann::json make_checkpoint(const ParamStore& params, const Optimizer* optimizer) {
  nlohmann::json doc;
  doc["format"] = "gridmarl.checkpoint";
  doc["version"] = 1;
  doc["params"] = to_json(params);
  if (optimizer) doc["optimizer"] = optimizer->to_json();
  return doc;
}

}  // namespace gridmarl::nn
