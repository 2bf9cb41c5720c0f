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

Activation parse_activation(std::string_view tag) {
  if (tag == "relu") return Activation::relu;
  if (tag == "leaky-relu" || tag == "leaky_relu") return Activation::leaky_relu;
  if (tag == "rrelu" || tag == "rrelu-deterministic") return Activation::rrelu;
  if (tag == "tanh") return Activation::tanh;
  if (tag == "sigmoid") return Activation::sigmoid;
  if (tag == "linear") return Activation::linear;
  throw ConfigError("unknown activation '" + std::string(tag) + "'");
}

std::string_view activation_name(Activation a) {
  switch (a) {
    case Activation::relu: return "relu";
    case Activation::leaky_relu: return "leaky-relu";
    case Activation::rrelu: return "rrelu";
    case Activation::tanh: return "tanh";
    case Activation::sigmoid: return "sigmoid";
    case Activation::linear: return "linear";
  }
  return "linear";
}

double sigmoid(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

namespace {

double negative_slope(Activation a) {
  switch (a) {
    case Activation::relu: return 0.0;
    case Activation::leaky_relu: return kLeakyReluSlope;
    case Activation::rrelu: return kRreluSlope;
    default: return 1.0;
  }
}

}  // namespace

Matrix activate(Activation a, const Matrix& z) {
  switch (a) {
    case Activation::relu:
    case Activation::leaky_relu:
    case Activation::rrelu: {
      const double s = negative_slope(a);
      return z.unaryExpr([s](double v) { return v > 0 ? v : s * v; });
    }
    case Activation::tanh: return z.array().tanh().matrix();
    case Activation::sigmoid: return z.unaryExpr([](double v) { return sigmoid(v); });
    case Activation::linear: return z;
  }
  return z;
}

Matrix activation_grad(Activation a, const Matrix& z, const Matrix& y) {
  switch (a) {
    case Activation::relu:
    case Activation::leaky_relu:
    case Activation::rrelu: {
      const double s = negative_slope(a);
      return z.unaryExpr([s](double v) { return v > 0 ? 1.0 : s; });
    }
    case Activation::tanh: return (1.0 - y.array().square()).matrix();
    case Activation::sigmoid: return (y.array() * (1.0 - y.array())).matrix();
    case Activation::linear: return Matrix::Ones(z.rows(), z.cols());
  }
  return Matrix::Ones(z.rows(), z.cols());
}

}  // namespace gridmarl::nn
