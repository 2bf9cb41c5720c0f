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

#include <cmath>
#include <numeric>
#include <random>

#include "gridmarl/errors.hpp"
#include "gridmarl/forecast.hpp"
#include "checks.hpp"

using namespace gridmarl;
using namespace gridmarl::forecast;

namespace {

std::vector<WindRecord> power_only(const std::vector<std::optional<double>>& p) {
  std::vector<WindRecord> out;
  for (std::size_t i = 0; i < p.size(); ++i) {
    WindRecord r;
    r.timestamp = static_cast<std::int64_t>(i) * 600;
    r.wind_speed = 5.0;
    r.wind_direction = 90.0;
    r.temperature = 10.0;
    r.active_power = p[i];
    out.push_back(r);
  }
  return out;
}

using gridmarl::testing::sine_series;

ForecasterConfig small_config() { return gridmarl::testing::small_forecaster_config(); }

}  // namespace

TEST_SUITE("preprocess") {
  TEST_CASE("gap filled by its two neighbours") {
    auto out = impute_missing(power_only({1.0, std::nullopt, 3.0}), 2);
    CHECK(*out[1].active_power == doctest::Approx(2.0));
    CHECK(*out[0].active_power == 1.0);
    CHECK(*out[2].active_power == 3.0);
  }

  TEST_CASE("leading gap uses the two following values") {
    auto out = impute_missing(power_only({std::nullopt, 4.0, 6.0}), 2);
    CHECK(*out[0].active_power == doctest::Approx(5.0));
  }

  TEST_CASE("complete input passes through") {
    auto in = power_only({1.0, 2.0, 7.0});
    CHECK(impute_missing(in, 2) == in);
  }

  TEST_CASE("imputation errors") {
    CHECK_THROWS_AS(impute_missing(power_only({std::nullopt, std::nullopt}), 1), InsufficientData);
    CHECK_THROWS_AS(impute_missing(power_only({std::nullopt, 1.0}), 2), InsufficientData);
    auto bad = power_only({1.0, 2.0});
    bad[1].timestamp = bad[0].timestamp;
    CHECK_THROWS_AS(impute_missing(bad, 1), InvalidArgument);
  }

  TEST_CASE("imputation is idempotent") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(0, 50), coin(0, 1);
    for (int trial = 0; trial < 20; ++trial) {
      std::vector<std::optional<double>> p(60);
      for (auto& v : p) {
        if (coin(rng) > 0.3) v = u(rng);
      }
      p[0] = 1.0;
      p[1] = 2.0;
      p[2] = 3.0;
      auto once = impute_missing(power_only(p), 3);
      CHECK(impute_missing(once, 3) == once);
    }
  }

  TEST_CASE("hourly resampling averages within the hour") {
    auto in = power_only({1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12});
    auto h = resample_hourly(in);
    REQUIRE(h.size() == 2);
    CHECK(*h[0].active_power == doctest::Approx(3.5));
    CHECK(*h[1].active_power == doctest::Approx(9.5));
    CHECK(h[1].timestamp == 3600);
  }

  TEST_CASE("empty hours stay missing until the second imputation") {
    auto in = power_only({1, 1, 1, 1, 1, 1});
    WindRecord late = in.back();
    late.timestamp = 3 * 3600;
    late.active_power = 7.0;
    in.push_back(late);
    auto h = resample_hourly(in);
    REQUIRE(h.size() == 4);
    CHECK_FALSE(h[1].active_power.has_value());
    auto m = prepare_hourly(in, 2);
    CHECK(m(1, 3) == doctest::Approx(4.0));
  }

  TEST_CASE("window counts") {
    Matrix s = Matrix::Zero(100, 4);
    auto split = make_windows(s, 24, 24, 0.8);
    CHECK(split.train.size() + split.test.size() == 53);
    CHECK(split.train.size() == 42);
    CHECK(split.test.size() == 11);
    auto one = make_windows(Matrix::Zero(48, 4), 24, 24, 1.0);
    CHECK(one.train.size() == 1);
    CHECK_THROWS_AS(make_windows(Matrix::Zero(47, 4), 24, 24, 0.8), InsufficientData);
  }

  TEST_CASE("ramp targets continue the ramp") {
    Matrix s(200, 4);
    for (Eigen::Index t = 0; t < 200; ++t) s.row(t).setConstant(static_cast<double>(t));
    auto split = make_windows(s, 24, 12, 0.7);
    std::size_t offset = 0;
    for (const auto* d : {&split.train, &split.test}) {
      for (std::size_t k = 0; k < d->size(); ++k) {
        const double start = static_cast<double>(offset + k);
        CHECK(d->inputs[k](0, 3) == start);
        for (Eigen::Index h = 0; h < 12; ++h) {
          CHECK(d->targets(static_cast<Eigen::Index>(k), h) == start + 24.0 + static_cast<double>(h));
        }
      }
      offset += d->size();
    }
  }

  TEST_CASE("scaler standardizes its fitting data") {
    std::mt19937_64 rng(2);
    std::normal_distribution<double> n(3.0, 7.0);
    Matrix x(500, 3);
    for (Eigen::Index k = 0; k < x.size(); ++k) x.data()[k] = n(rng);
    auto s = Scaler::fit(x);
    Matrix z = s.transform(x);
    for (Eigen::Index f = 0; f < 3; ++f) {
      const double mean = z.col(f).mean();
      const double var = (z.col(f).array() - mean).square().mean();
      CHECK(std::abs(mean) < 1e-9);
      CHECK(std::abs(var - 1.0) < 1e-9);
    }
    CHECK((s.inverse(z) - x).cwiseAbs().maxCoeff() < 1e-12);
    Matrix c = Matrix::Ones(10, 2);
    c.col(0).setLinSpaced(10, 0.0, 1.0);
    CHECK_THROWS_AS(Scaler::fit(c), InvalidArgument);
    CHECK(Scaler::fit(c, ConstantFeaturePolicy::center_only).std[1] == 1.0);
  }
}

TEST_SUITE("metrics") {
  TEST_CASE("perfect prediction") {
    auto m = eval_metrics(std::vector<double>{1, 2, 3}, std::vector<double>{1, 2, 3});
    CHECK(m.rmse == 0.0);
    CHECK(m.mae == 0.0);
    CHECK(*m.mape == 0.0);
  }

  TEST_CASE("hand-computed triples") {
    auto a = eval_metrics(std::vector<double>{0, 0}, std::vector<double>{3, 4});
    CHECK(a.rmse == doctest::Approx(std::sqrt(12.5)));
    CHECK(a.mae == doctest::Approx(3.5));
    CHECK(*a.mape == doctest::Approx(100.0));
    auto b = eval_metrics(std::vector<double>{2}, std::vector<double>{4});
    CHECK(b.rmse == doctest::Approx(2.0));
    CHECK(b.mae == doctest::Approx(2.0));
    CHECK(*b.mape == doctest::Approx(50.0));
  }

  TEST_CASE("zero actuals are excluded from mape") {
    auto m = eval_metrics(std::vector<double>{1, 2}, std::vector<double>{0, 4});
    CHECK(m.mape_excluded == 1);
    CHECK(*m.mape == doctest::Approx(50.0));
    CHECK(m.rmse == doctest::Approx(std::sqrt(2.5)));
    auto z = eval_metrics(std::vector<double>{1}, std::vector<double>{0});
    CHECK_FALSE(z.mape.has_value());
    CHECK_THROWS_AS(eval_metrics(std::vector<double>{}, std::vector<double>{}), InvalidArgument);
  }

  TEST_CASE("rmse dominates mae") {
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> u(-10, 10);
    for (int i = 0; i < 300; ++i) {
      std::vector<double> p(17), a(17);
      for (auto& v : p) v = u(rng);
      for (auto& v : a) v = u(rng);
      auto m = eval_metrics(p, a);
      CHECK(m.rmse >= m.mae - 1e-12);
    }
  }

  TEST_CASE("uncertainty band") {
    std::vector<double> last(24, 10.0);
    auto b = uncertainty_band_forecast(last, 0.10);
    CHECK(b.point == last);
    CHECK(b.low.back() == doctest::Approx(9.0));
    CHECK(b.high.back() == doctest::Approx(11.0));
    auto z = uncertainty_band_forecast(last, 0.0);
    CHECK(z.low == z.point);
    CHECK(z.high == z.point);
    auto zero = uncertainty_band_forecast(std::vector<double>(24, 0.0), 0.1);
    CHECK(*std::max_element(zero.high.begin(), zero.high.end()) == 0.0);
    CHECK_THROWS_AS(uncertainty_band_forecast(std::vector<double>(23, 1.0), 0.1), InvalidArgument);
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(0, 50), m(0, 2);
    for (int i = 0; i < 100; ++i) {
      std::vector<double> v(24);
      for (auto& x : v) x = u(rng);
      auto r = uncertainty_band_forecast(v, m(rng));
      for (std::size_t k = 0; k < 24; ++k) {
        CHECK(r.low[k] <= r.point[k]);
        CHECK(r.point[k] <= r.high[k]);
      }
    }
  }
}

TEST_SUITE("forecaster") {
  TEST_CASE("constant target is learned") {
    Matrix s = sine_series(24 * 120, 0.0, 1, 0.0);
    s.col(3).setConstant(10.0);
    for (Eigen::Index t = 0; t < s.rows(); ++t) s(t, 0) = 6.0 + 3.0 * std::cos(0.3 * static_cast<double>(t));
    auto split = make_windows(s, 24, 24, 0.8);
    auto cfg = small_config();
    auto fc = Forecaster::train(split.train, cfg);
    auto m = eval_metrics(fc.predict(split.test), split.test.targets);
    CHECK(m.rmse < 1e-3);
    auto day = fc.predict_day_ahead(split.test.inputs.front());
    REQUIRE(day.size() == 24);
    for (double v : day) CHECK(v == doctest::Approx(10.0).epsilon(0.05));
  }

  TEST_CASE("sinusoid with and without noise") {
    auto cfg = small_config();
    {
      auto split = make_windows(sine_series(24 * 60, 0.0, 1), 24, 24, 0.8);
      TrainingHistory h;
      auto fc = Forecaster::train(split.train, cfg, &h);
      CHECK(eval_metrics(fc.predict(split.test), split.test.targets).rmse < 0.5);
      // Loss on a 5-epoch moving average never rises.
      std::vector<double> smooth;
      for (std::size_t e = 4; e < h.epoch_loss.size(); ++e) {
        smooth.push_back(std::accumulate(h.epoch_loss.begin() + static_cast<long>(e) - 4,
                                         h.epoch_loss.begin() + static_cast<long>(e) + 1, 0.0) / 5.0);
      }
      for (std::size_t k = 1; k < smooth.size(); ++k) CHECK(smooth[k] <= smooth[k - 1]);
    }
    {
      const double sigma = 1.0;
      auto split = make_windows(sine_series(24 * 60, sigma, 2), 24, 24, 0.8);
      auto fc = Forecaster::train(split.train, cfg);
      const double rmse = eval_metrics(fc.predict(split.test), split.test.targets).rmse;
      const double persist = eval_metrics(persistence_forecast(split.test), split.test.targets).rmse;
      CHECK(rmse <= 1.5 * sigma);
      CHECK(rmse < persist);
    }
  }

  TEST_CASE("forecasts are clipped to the plant range") {
    Matrix s = sine_series(24 * 10, 0.0, 1);
    s.col(3).setConstant(0.0);
    s.col(3).tail(48).setConstant(1.0);
    auto split = make_windows(s, 24, 24, 1.0);
    auto cfg = small_config();
    cfg.epochs = 2;
    auto fc = Forecaster::train(split.train, cfg);
    Matrix zero_hist = split.train.inputs.front();
    for (double v : fc.predict_day_ahead(zero_hist)) {
      CHECK(v >= 0.0);
      CHECK(v <= 50.0);
    }
    CHECK_THROWS_AS(fc.predict_day_ahead(zero_hist.topRows(23)), InvalidArgument);
  }

  TEST_CASE("divergence names the epoch") {
    auto split = make_windows(sine_series(24 * 10, 1.0, 1), 24, 24, 1.0);
    auto cfg = small_config();
    cfg.optimizer.learning_rate = 1e12;
    cfg.grad_clip = 0.0;
    cfg.epochs = 5;
    try {
      Forecaster::train(split.train, cfg);
      FAIL("expected TrainingError");
    } catch (const TrainingError& e) {
      CHECK(std::string(e.what()).find("epoch") != std::string::npos);
    }
  }

  TEST_CASE("document round trip reproduces predictions") {
    auto split = make_windows(sine_series(24 * 10, 1.0, 1), 24, 24, 0.8);
    auto cfg = small_config();
    cfg.epochs = 2;
    auto fc = Forecaster::train(split.train, cfg);
    auto doc = fc.to_json();
    auto back = Forecaster::from_json(nlohmann::json::parse(doc.dump()));
    CHECK(back.to_json().dump() == doc.dump());
    CHECK(back.predict(split.test) == fc.predict(split.test));
    auto again = Forecaster::train(split.train, cfg);
    CHECK(again.model_id() == fc.model_id());
  }
}
