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
#include <unordered_set>

#include "gridmarl/ddpg.hpp"
#include "gridmarl/errors.hpp"

namespace gridmarl::ddpg {

Batch make_batch(const std::vector<Transition>& items) {
  if (items.empty()) throw InvalidArgument("make_batch: no transitions");
  const auto n = static_cast<Eigen::Index>(items.size());
  const auto ds = static_cast<Eigen::Index>(items.front().s.size());
  const auto da = static_cast<Eigen::Index>(items.front().a.size());
  Batch b{Matrix(n, ds), Matrix(n, da), Matrix(n, 1), Matrix(n, ds), Matrix(n, 1)};
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& t = items[static_cast<std::size_t>(i)];
    if (static_cast<Eigen::Index>(t.s.size()) != ds || static_cast<Eigen::Index>(t.s_next.size()) != ds ||
        static_cast<Eigen::Index>(t.a.size()) != da) {
      throw DimensionError("make_batch: inconsistent transition dimensions");
    }
    for (Eigen::Index k = 0; k < ds; ++k) {
      b.s(i, k) = t.s[static_cast<std::size_t>(k)];
      b.s_next(i, k) = t.s_next[static_cast<std::size_t>(k)];
    }
    for (Eigen::Index k = 0; k < da; ++k) b.a(i, k) = t.a[static_cast<std::size_t>(k)];
    b.r(i, 0) = t.r;
    b.terminal(i, 0) = t.terminal ? 1.0 : 0.0;
  }
  return b;
}

ReplayBuffer::ReplayBuffer(std::size_t capacity) : capacity_(capacity) {
  if (capacity == 0) throw InvalidArgument("replay buffer: capacity must be positive");
}

void ReplayBuffer::push(Transition t) {
  if (items_.size() < capacity_) {
    items_.push_back(std::move(t));
    return;
  }
  items_[head_] = std::move(t);
  head_ = (head_ + 1) % capacity_;
}

const Transition& ReplayBuffer::at(std::size_t k) const {
  if (k >= items_.size()) throw InvalidArgument("replay buffer: index out of range");
  return items_[(head_ + k) % items_.size()];
}

std::vector<std::size_t> ReplayBuffer::sample_indices(std::size_t n, Rng& rng) const {
  if (n > items_.size()) {
    throw InsufficientData("replay buffer: requested " + std::to_string(n) + " samples, only " +
                           std::to_string(items_.size()) + " stored");
  }
  // Floyd's algorithm, then a shuffle so the order is uniform too.
  const std::size_t m = items_.size();
  std::unordered_set<std::size_t> chosen;
  std::vector<std::size_t> out;
  out.reserve(n);
  for (std::size_t j = m - n; j < m; ++j) {
    std::uniform_int_distribution<std::size_t> d(0, j);
    const std::size_t t = d(rng);
    const std::size_t pick = chosen.count(t) ? j : t;
    chosen.insert(pick);
    out.push_back(pick);
  }
  std::shuffle(out.begin(), out.end(), rng);
  return out;
}

Batch ReplayBuffer::sample(std::size_t n, Rng& rng) const {
  std::vector<Transition> picked;
  picked.reserve(n);
  for (std::size_t i : sample_indices(n, rng)) picked.push_back(items_[i]);
  return make_batch(picked);
}

}  // namespace gridmarl::ddpg
