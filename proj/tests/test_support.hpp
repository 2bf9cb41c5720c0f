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

// Test-only oracles. Nothing here calls into the kernels under test except
// through a black-box scalar objective.

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>
#include <vector>

#include "gridmarl/nn.hpp"

namespace gridmarl::testing {

using nn::Matrix;

inline Matrix random_matrix(Eigen::Index rows, Eigen::Index cols, std::mt19937_64& rng,
                            double scale = 1.0) {
  std::uniform_real_distribution<double> d(-scale, scale);
  Matrix m(rows, cols);
  for (Eigen::Index k = 0; k < m.size(); ++k) m.data()[k] = d(rng);
  return m;
}

inline double relative_error(double analytic, double numeric) {
  const double denom = std::max({std::abs(analytic), std::abs(numeric), 1e-6});
  return std::abs(analytic - numeric) / denom;
}

// Central differences of a scalar objective over every entry of `params`.
// Returns the largest relative deviation from `analytic`.
inline double max_fd_error(nn::ParamStore& params, const nn::GradStore& analytic,
                           const std::function<double()>& objective, double h = 1e-5) {
  double worst = 0.0;
  for (auto& [name, m] : params) {
    const Matrix& g = analytic.at(name);
    for (Eigen::Index k = 0; k < m.size(); ++k) {
      const double saved = m.data()[k];
      m.data()[k] = saved + h;
      const double up = objective();
      m.data()[k] = saved - h;
      const double down = objective();
      m.data()[k] = saved;
      worst = std::max(worst, relative_error(g.data()[k], (up - down) / (2.0 * h)));
    }
  }
  return worst;
}

inline double weighted_sum(const Matrix& out, const Matrix& weights) {
  return out.cwiseProduct(weights).sum();
}

}  // namespace gridmarl::testing
