// Copyright 2026 The tvrvi Authors.
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
#include "tvrvi/bellman.hpp"

#include <algorithm>
#include <string>

#include "tvrvi/errors.hpp"

namespace tvrvi {

namespace {

void check_values(const DmdpInstance& instance, const ValueVector& v) {
  if (v.size() != instance.num_states()) {
    throw InvalidInput("value vector has " + std::to_string(v.size()) + " entries, expected " +
                       std::to_string(instance.num_states()));
  }
}

}  // namespace

void check_policy(const DmdpInstance& instance, const Policy& pi) {
  if (pi.size() != instance.num_states()) {
    throw InvalidInput("policy has " + std::to_string(pi.size()) + " entries, expected " +
                       std::to_string(instance.num_states()));
  }
  for (std::size_t s = 0; s < pi.size(); ++s) {
    if (pi[s] >= instance.num_actions(static_cast<StateIndex>(s))) {
      throw InvalidInput("policy action " + std::to_string(pi[s]) + " invalid for state " +
                         std::to_string(s));
    }
  }
}

QVector transition_product(const DmdpInstance& instance, const ValueVector& v, Execution exec) {
  check_values(instance, v);
  QVector out(instance.a_tot());
  kernels::transition_product(instance.transitions(), v.span(), out.span(), exec);
  return out;
}

GreedyResult greedy(std::span<const std::size_t> state_offsets, const QVector& q,
                    Execution exec) {
  const std::size_t n = state_offsets.size() - 1;
  GreedyResult out{ValueVector(n), Policy(n)};
  kernels::greedy_rows(state_offsets, q.span(), out.values.span(), out.policy.span(), exec);
  return out;
}

GreedyResult bellman(const DmdpInstance& instance, const ValueVector& v, Execution exec) {
  QVector q = transition_product(instance, v, exec);
  const auto r = instance.rewards();
  for (std::size_t p = 0; p < q.size(); ++p) q[p] = r[p] + instance.gamma() * q[p];
  return greedy(instance.state_offsets(), q, exec);
}

ValueVector bellman_policy(const DmdpInstance& instance, const Policy& pi, const ValueVector& v) {
  check_values(instance, v);
  check_policy(instance, pi);
  ValueVector out(instance.num_states());
  for (std::size_t s = 0; s < out.size(); ++s) {
    const PairIndex p = instance.pair_index(static_cast<StateIndex>(s), pi[s]);
    out[s] = instance.reward(p) + instance.gamma() * instance.row(p).dot(v.span());
  }
  return out;
}

ValueVector truncate_median(const ValueVector& a, const ValueVector& b, double step) {
  if (a.size() != b.size()) throw InvalidInput("truncate_median: length mismatch");
  if (!(step >= 0.0)) throw InvalidInput("truncate_median: step must be nonnegative");
  ValueVector out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    out[i] = std::clamp(b[i], a[i] - step, a[i] + step);
  }
  return out;
}

}  // namespace tvrvi
