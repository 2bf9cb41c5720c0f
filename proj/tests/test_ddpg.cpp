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
#include <random>

#include "gridmarl/ddpg.hpp"
#include "gridmarl/errors.hpp"
#include "checks.hpp"
#include "test_support.hpp"

using namespace gridmarl;
using namespace gridmarl::ddpg;
using gridmarl::testing::random_matrix;

namespace {

AgentConfig tiny_config(std::size_t obs, std::vector<double> low, std::vector<double> high,
                        nn::Activation out = nn::Activation::tanh, bool bn = false) {
  return gridmarl::testing::tiny_agent_config(obs, std::move(low), std::move(high), out, bn);
}

void zero_all(nn::Mlp& net) {
  for (auto& [_, m] : net.params()) m.setZero();
}

Transition make_transition(double r, bool terminal, std::size_t obs = 2) {
  return {std::vector<double>(obs, 0.5), {0.0}, r, std::vector<double>(obs, 0.25), terminal};
}

}  // namespace

TEST_SUITE("select_action") {
  TEST_CASE("zero tanh actor gives the midpoint") {
    Agent a(tiny_config(3, {-2.0}, {2.0}), 1);
    zero_all(a.actor());
    Rng rng(1);
    CHECK(a.act({1, 2, 3}, 0.0, rng)[0] == doctest::Approx(0.0));
  }

  TEST_CASE("zero sigmoid actor gives the midpoint") {
    Agent a(tiny_config(3, {0.05}, {0.20}, nn::Activation::sigmoid), 1);
    zero_all(a.actor());
    Rng rng(1);
    CHECK(a.act({1, 2, 3}, 0.0, rng)[0] == doctest::Approx(0.125));
  }

  TEST_CASE("saturated actor hits the ceiling exactly") {
    Agent a(tiny_config(3, {-2.0}, {2.0}), 1);
    zero_all(a.actor());
    a.actor().params().at(nn::mlp_bias_name(2))(0, 0) = 1e3;
    Rng rng(1);
    CHECK(a.act({1, 2, 3}, 0.0, rng)[0] == 2.0);
  }

  TEST_CASE("noisy actions stay inside the bounds") {
    Agent a(tiny_config(2, {-2.0, 0.05}, {2.0, 0.2}), 4);
    Rng rng(9);
    std::uniform_real_distribution<double> u(-10, 10);
    for (int i = 0; i < 2000; ++i) {
      auto act = a.act({u(rng), u(rng)}, 5.0, rng);
      CHECK(act[0] >= -2.0);
      CHECK(act[0] <= 2.0);
      CHECK(act[1] >= 0.05);
      CHECK(act[1] <= 0.2);
    }
    CHECK_THROWS_AS(a.act({1.0}, 0.0, rng), DimensionError);
  }

  TEST_CASE("noise schedule decays linearly then holds") {
    AgentConfig c = tiny_config(1, {-1}, {1});
    c.noise_std_initial = 0.7;
    c.noise_std_final = 0.05;
    CHECK(noise_std_at(c, 0, 100) == doctest::Approx(0.7));
    CHECK(noise_std_at(c, 40, 100) == doctest::Approx(0.375));
    CHECK(noise_std_at(c, 80, 100) == doctest::Approx(0.05));
    CHECK(noise_std_at(c, 99, 100) == doctest::Approx(0.05));
  }
}

TEST_SUITE("replay") {
  TEST_CASE("fifo eviction") {
    ReplayBuffer b(3);
    for (int i = 0; i < 4; ++i) b.push(make_transition(i, false));
    CHECK(b.size() == 3);
    CHECK(b.at(0).r == 1.0);
    CHECK(b.at(2).r == 3.0);
  }

  TEST_CASE("full-size sample is a permutation") {
    ReplayBuffer b(10);
    for (int i = 0; i < 10; ++i) b.push(make_transition(i, false));
    Rng rng(3);
    auto batch = b.sample(10, rng);
    std::vector<double> r(batch.r.data(), batch.r.data() + 10);
    std::sort(r.begin(), r.end());
    for (int i = 0; i < 10; ++i) CHECK(r[static_cast<std::size_t>(i)] == i);
  }

  TEST_CASE("seeded sampling is reproducible and distinct within a batch") {
    ReplayBuffer b(100);
    for (int i = 0; i < 100; ++i) b.push(make_transition(i, false));
    Rng r1(7), r2(7);
    auto i1 = b.sample_indices(30, r1);
    auto i2 = b.sample_indices(30, r2);
    CHECK(i1 == i2);
    std::sort(i1.begin(), i1.end());
    CHECK(std::adjacent_find(i1.begin(), i1.end()) == i1.end());
    CHECK_THROWS_AS(b.sample(101, r1), InsufficientData);
  }
}

TEST_SUITE("critic") {
  TEST_CASE("bellman target arithmetic") {
    AgentConfig c = tiny_config(2, {-1}, {1});
    Agent a(c, 2);
    auto& tc = a.target_critic();
    tc.params().at(nn::mlp_weight_name(2)).setZero();
    tc.params().at(nn::mlp_bias_name(2)).setConstant(2.0);
    auto y = a.critic_targets(make_batch({make_transition(1.0, false)}));
    CHECK(y(0, 0) == doctest::Approx(2.9));
    auto yt = a.critic_targets(make_batch({make_transition(1.0, true)}));
    CHECK(yt(0, 0) == doctest::Approx(1.0));
  }

  TEST_CASE("exact fit is a fixed point") {
    AgentConfig c = tiny_config(2, {-1}, {1});
    c.gamma = 0.0;
    c.critic_optimizer = {nn::OptimizerKind::sgd_momentum, 0.1, 0.0};
    Agent a(c, 2);
    a.critic().params().at(nn::mlp_weight_name(2)).setZero();
    a.critic().params().at(nn::mlp_bias_name(2)).setConstant(0.75);
    const auto before = a.critic().params().flatten();
    std::vector<Transition> same(8, make_transition(0.75, false));
    CHECK(a.critic_update(make_batch(same)) == 0.0);
    CHECK(a.critic().params().flatten() == before);
  }

  TEST_CASE("critic regression reduces the loss") {
    AgentConfig c = tiny_config(2, {-1}, {1}, nn::Activation::tanh, true);
    c.gamma = 0.0;
    c.critic_optimizer = {nn::OptimizerKind::adam, 1e-2};
    Agent a(c, 5);
    Rng rng(1);
    std::uniform_real_distribution<double> u(-1, 1);
    std::vector<Transition> data;
    for (int i = 0; i < 64; ++i) {
      Transition t{{u(rng), u(rng)}, {u(rng)}, 0.0, {0.0, 0.0}, true};
      t.r = t.s[0] - t.a[0];
      data.push_back(t);
    }
    auto batch = make_batch(data);
    const double first = a.critic_update(batch);
    double last = first;
    for (int i = 0; i < 300; ++i) last = a.critic_update(batch);
    CHECK(last < 0.1 * first);
  }
}

TEST_SUITE("actor") {
  TEST_CASE("quadratic bowl drives the policy to its centre") {
    AgentConfig c = tiny_config(2, {-1}, {1});
    c.actor_optimizer = {nn::OptimizerKind::adam, 1e-2};
    Agent a(c, 3);
    Rng rng(2);
    std::uniform_real_distribution<double> u(-1, 1);
    std::vector<Transition> data;
    for (int i = 0; i < 16; ++i) data.push_back({{u(rng), u(rng)}, {0.0}, 0.0, {0.0, 0.0}, true});
    auto batch = make_batch(data);
    const double centre = 0.3;
    auto bowl = [&](const Matrix&, const Matrix& act) { return Matrix((-2.0 * (act.array() - centre)).matrix()); };
    for (int step = 0; step < 500; ++step) a.actor_update_with(batch, bowl);
    double worst = 0.0;
    for (const auto& t : data) worst = std::max(worst, std::abs(a.act_greedy(t.s)[0] - centre));
    CHECK(worst < 0.01);
  }

  TEST_CASE("zero critic leaves the actor unchanged") {
    AgentConfig c = tiny_config(2, {-1}, {1});
    Agent a(c, 3);
    zero_all(a.critic());
    const auto before = a.actor().params().flatten();
    std::vector<Transition> data(8, make_transition(0.0, false));
    data[1].s = {0.1, -0.4};
    a.actor_update(make_batch(data));
    CHECK(a.actor().params().flatten() == before);
  }

  TEST_CASE("composed actor-through-critic gradient matches finite differences") {
    double worst = 0.0;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      worst = std::max(worst, gridmarl::testing::composed_fd_worst(seed));
    }
    CHECK(worst < 1e-3);
  }
}

TEST_SUITE("targets") {
  TEST_CASE("soft update formula") {
    nn::ParamStore t, o;
    t.add("w", Matrix::Zero(2, 2));
    o.add("w", Matrix::Ones(2, 2));
    soft_update(t, o, 0.005);
    CHECK(t.at("w")(1, 1) == doctest::Approx(0.005));
    soft_update(t, o, 1.0);
    CHECK(t.at("w") == o.at("w"));
    soft_update(t, o, 0.3);
    CHECK(t.at("w") == o.at("w"));
    nn::ParamStore bad;
    bad.add("w", Matrix::Zero(3, 2));
    CHECK_THROWS_AS(soft_update(t, bad, 0.1), DimensionError);
  }

  TEST_CASE("soft update contracts toward the online parameters") {
    std::mt19937_64 rng(6);
    nn::ParamStore t, o;
    t.add("w", random_matrix(4, 3, rng));
    o.add("w", random_matrix(4, 3, rng));
    const Matrix gap = (t.at("w") - o.at("w")).cwiseAbs();
    soft_update(t, o, 0.2);
    CHECK(((t.at("w") - o.at("w")).cwiseAbs() - 0.8 * gap).cwiseAbs().maxCoeff() < 1e-12);
  }

  TEST_CASE("targets start as copies") {
    Agent a(tiny_config(2, {-1}, {1}, nn::Activation::tanh, true), 8);
    CHECK(a.actor().params().flatten() == a.target_actor().params().flatten());
    CHECK(a.critic().params().flatten() == a.target_critic().params().flatten());
  }
}

TEST_SUITE("loop") {
  TEST_CASE("stateless bowl converges within 2000 steps") {
    int converged = 0;
    for (std::uint64_t seed = 1; seed <= 3; ++seed) {
      if (std::abs(gridmarl::testing::bowl_greedy_action(seed) - 0.7) < 0.05) ++converged;
    }
    CHECK(converged == 3);
  }

  TEST_CASE("warm-up gate and checkpoint round trip") {
    AgentConfig c = tiny_config(2, {-1}, {1}, nn::Activation::tanh, true);
    Agent a(c, 12);
    Rng rng(4);
    const auto before = a.actor().params().flatten();
    for (std::size_t i = 0; i + 1 < c.effective_warmup(); ++i) {
      CHECK_FALSE(a.observe(make_transition(1.0, false), rng).has_value());
    }
    CHECK(a.actor().params().flatten() == before);
    CHECK(a.observe(make_transition(1.0, false), rng).has_value());
    CHECK(a.updates() == 1);
    auto doc = a.to_json();
    auto back = Agent::from_json(nlohmann::json::parse(doc.dump()));
    CHECK(back.to_json().dump() == doc.dump());
    CHECK(back.act_greedy({0.3, -0.2}) == a.act_greedy({0.3, -0.2}));
  }
}
