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
#pragma once

#include "tvrvi/instance.hpp"
#include "tvrvi/kernels.hpp"
#include "tvrvi/types.hpp"

namespace tvrvi {

struct GreedyResult {
  ValueVector values;
  Policy policy;
};

/// Bellman value operator: T(v)(s) = max_a r_a(s) + gamma p_a(s)^T v, with the
/// argmax (lowest action index on ties).
GreedyResult bellman(const DmdpInstance& instance, const ValueVector& v,
                     Execution exec = Execution::parallel);

/// T_pi(v)(s) = r_{pi(s)}(s) + gamma p_{pi(s)}(s)^T v.
ValueVector bellman_policy(const DmdpInstance& instance, const Policy& pi, const ValueVector& v);

/// Entrywise median{a - step, b, a + step}, i.e. clamp(b, a - step, a + step).
ValueVector truncate_median(const ValueVector& a, const ValueVector& b, double step);

/// The utility vector P v (one entry per state-action pair).
QVector transition_product(const DmdpInstance& instance, const ValueVector& v,
                           Execution exec = Execution::parallel);

/// Greedy values and policy of an explicit per-pair Q vector.
GreedyResult greedy(std::span<const std::size_t> state_offsets, const QVector& q,
                    Execution exec = Execution::parallel);

void check_policy(const DmdpInstance& instance, const Policy& pi);

}  // namespace tvrvi
