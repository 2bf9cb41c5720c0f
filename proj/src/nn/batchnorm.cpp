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

BatchNormState BatchNormState::identity(std::size_t features) {
  const auto n = static_cast<Eigen::Index>(features);
  BatchNormState s;
  s.gamma = RowVector::Ones(n);
  s.beta = RowVector::Zero(n);
  s.running_mean = RowVector::Zero(n);
  s.running_var = RowVector::Ones(n);
  return s;
}

Matrix batchnorm_forward(const Matrix& x, const RowVector& gamma, const RowVector& beta,
                         RowVector& running_mean, RowVector& running_var, double momentum,
                         double epsilon, Mode mode, BatchNormCache* cache) {
  const Eigen::Index n = x.rows();
  const Eigen::Index f = x.cols();
  if (gamma.size() != f || beta.size() != f || running_mean.size() != f ||
      running_var.size() != f) {
    throw DimensionError("batchnorm: feature count mismatch");
  }
  RowVector mean;
  RowVector var;
  if (mode == Mode::train) {
    if (n < 2) throw InvalidArgument("batchnorm: train mode needs a batch of at least 2");
    mean = x.colwise().mean();
    var = (x.rowwise() - mean).array().square().colwise().mean().matrix();
    running_mean = (1.0 - momentum) * running_mean + momentum * mean;
    // Running variance tracks the unbiased estimate, as in common frameworks.
    const double unbias = static_cast<double>(n) / static_cast<double>(n - 1);
    running_var = (1.0 - momentum) * running_var + momentum * unbias * var;
  } else {
    mean = running_mean;
    var = running_var;
  }
  RowVector inv_std = (var.array() + epsilon).rsqrt().matrix();
  Matrix x_hat = (x.rowwise() - mean).array().rowwise() * inv_std.array();
  Matrix y = (x_hat.array().rowwise() * gamma.array()).rowwise() + beta.array();
  if (cache) {
    cache->mode = mode;
    cache->x_hat = std::move(x_hat);
    cache->inv_std = std::move(inv_std);
  }
  return y;
}

Matrix batchnorm_backward(const Matrix& dy, const RowVector& gamma, const BatchNormCache& cache,
                          RowVector& dgamma, RowVector& dbeta) {
  const auto n = static_cast<double>(dy.rows());
  dbeta += dy.colwise().sum();
  dgamma += (dy.array() * cache.x_hat.array()).colwise().sum().matrix();
  Matrix dx_hat = dy.array().rowwise() * gamma.array();
  if (cache.mode == Mode::eval) {
    return dx_hat.array().rowwise() * cache.inv_std.array();
  }
  // dx = inv_std/n * (n*dx_hat - sum(dx_hat) - x_hat*sum(dx_hat*x_hat))
  const RowVector sum_dxh = dx_hat.colwise().sum();
  const RowVector sum_dxh_xh = (dx_hat.array() * cache.x_hat.array()).colwise().sum().matrix();
  Matrix dx = (n * dx_hat).rowwise() - sum_dxh;
  dx -= (cache.x_hat.array().rowwise() * sum_dxh_xh.array()).matrix();
  return (dx.array().rowwise() * (cache.inv_std.array() / n)).matrix();
}

Matrix batchnorm_apply(BatchNormState& state, const Matrix& input) {
  return batchnorm_forward(input, state.gamma, state.beta, state.running_mean, state.running_var,
                           state.momentum, state.epsilon, state.mode, nullptr);
}

}  // namespace gridmarl::nn
