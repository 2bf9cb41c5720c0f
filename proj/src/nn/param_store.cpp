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

#include <cmath>

#include "gridmarl/nn.hpp"

namespace gridmarl::nn {

void ParamStore::add(const std::string& name, Matrix value) {
  if (name.empty()) throw InvalidArgument("parameter name must not be empty");
  if (!entries_.emplace(name, std::move(value)).second) {
    throw InvalidArgument("duplicate parameter name '" + name + "'");
  }
}

Matrix& ParamStore::at(const std::string& name) {
  auto it = entries_.find(name);
  if (it == entries_.end()) throw NotFound("no parameter named '" + name + "'");
  return it->second;
}

const Matrix& ParamStore::at(const std::string& name) const {
  auto it = entries_.find(name);
  if (it == entries_.end()) throw NotFound("no parameter named '" + name + "'");
  return it->second;
}

std::size_t ParamStore::scalar_count() const {
  std::size_t n = 0;
  for (const auto& [_, m] : entries_) n += static_cast<std::size_t>(m.size());
  return n;
}

std::vector<std::string> ParamStore::names() const {
  std::vector<std::string> out;
  out.reserve(entries_.size());
  for (const auto& [name, _] : entries_) out.push_back(name);
  return out;
}

ParamStore ParamStore::zeros_like() const {
  ParamStore out;
  for (const auto& [name, m] : entries_) out.entries_.emplace(name, Matrix::Zero(m.rows(), m.cols()));
  return out;
}

void ParamStore::set_zero() {
  for (auto& [_, m] : entries_) m.setZero();
}

bool ParamStore::all_finite() const { return !first_non_finite().has_value(); }

std::optional<std::string> ParamStore::first_non_finite() const {
  for (const auto& [name, m] : entries_) {
    if (!m.allFinite()) return name;
  }
  return std::nullopt;
}

double ParamStore::squared_norm() const {
  double s = 0.0;
  for (const auto& [_, m] : entries_) s += m.squaredNorm();
  return s;
}

void ParamStore::scale(double factor) {
  for (auto& [_, m] : entries_) m *= factor;
}

void ParamStore::require_same_layout(const ParamStore& other, std::string_view context) const {
  if (entries_.size() != other.entries_.size()) {
    throw DimensionError(std::string(context) + ": parameter count mismatch");
  }
  auto a = entries_.begin();
  auto b = other.entries_.begin();
  for (; a != entries_.end(); ++a, ++b) {
    if (a->first != b->first) {
      throw DimensionError(std::string(context) + ": parameter '" + a->first + "' vs '" +
                           b->first + "'");
    }
    if (a->second.rows() != b->second.rows() || a->second.cols() != b->second.cols()) {
      throw DimensionError(std::string(context) + ": shape mismatch for '" + a->first + "'");
    }
  }
}

void ParamStore::add_scaled(const ParamStore& other, double alpha) {
  require_same_layout(other, "add_scaled");
  auto b = other.entries_.begin();
  for (auto& [_, m] : entries_) {
    m += alpha * b->second;
    ++b;
  }
}

std::vector<double> ParamStore::flatten() const {
  std::vector<double> out;
  out.reserve(scalar_count());
  for (const auto& [_, m] : entries_) out.insert(out.end(), m.data(), m.data() + m.size());
  return out;
}

void ParamStore::unflatten(const std::vector<double>& values) {
  if (values.size() != scalar_count()) throw DimensionError("unflatten: size mismatch");
  std::size_t k = 0;
  for (auto& [_, m] : entries_) {
    std::copy(values.begin() + static_cast<std::ptrdiff_t>(k),
              values.begin() + static_cast<std::ptrdiff_t>(k + m.size()), m.data());
    k += static_cast<std::size_t>(m.size());
  }
}

}  // namespace gridmarl::nn
