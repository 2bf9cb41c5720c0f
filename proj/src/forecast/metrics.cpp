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

#include "gridmarl/errors.hpp"
#include "gridmarl/forecast.hpp"

namespace gridmarl::forecast {

Metrics eval_metrics(const std::vector<double>& pred, const std::vector<double>& actual) {
  if (pred.size() != actual.size()) throw DimensionError("eval_metrics: length mismatch");
  if (pred.empty()) throw InvalidArgument("eval_metrics: empty input");
  Metrics m;
  double sq = 0.0, ab = 0.0, pct = 0.0;
  std::size_t used = 0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const double err = pred[i] - actual[i];
    sq += err * err;
    ab += std::abs(err);
    if (std::abs(actual[i]) < 1e-6) {
      ++m.mape_excluded;
    } else {
      pct += std::abs(err / actual[i]);
      ++used;
    }
  }
  const auto n = static_cast<double>(pred.size());
  m.rmse = std::sqrt(sq / n);
  m.mae = ab / n;
  if (used > 0) m.mape = 100.0 * pct / static_cast<double>(used);
  return m;
}

Metrics eval_metrics(const Matrix& pred, const Matrix& actual) {
  if (pred.rows() != actual.rows() || pred.cols() != actual.cols()) {
    throw DimensionError("eval_metrics: shape mismatch");
  }
  return eval_metrics(std::vector<double>(pred.data(), pred.data() + pred.size()),
                      std::vector<double>(actual.data(), actual.data() + actual.size()));
}

Band uncertainty_band_forecast(const std::vector<double>& last_24h, double margin) {
  if (last_24h.size() != 24) throw InvalidArgument("uncertainty band: need exactly 24 hourly values");
  if (!(margin >= 0.0)) throw InvalidArgument("uncertainty band: margin must be non-negative");
  Band b;
  b.point = last_24h;
  for (double v : last_24h) {
    b.low.push_back(v * (1.0 - margin));
    b.high.push_back(v * (1.0 + margin));
  }
  return b;
}

}  // namespace gridmarl::forecast
