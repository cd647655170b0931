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
#include "tvrvi/kernels.hpp"

#include <omp.h>

#include <cstdint>

namespace tvrvi::kernels {

namespace {

inline double row_dot(const TransitionMatrix& P, std::size_t row, std::span<const double> v) {
  double acc = 0.0;
  for (std::size_t j = P.row_offsets[row]; j < P.row_offsets[row + 1]; ++j) {
    acc += P.probabilities[j] * v[P.columns[j]];
  }
  return acc;
}

inline void greedy_row(std::span<const std::size_t> offsets, std::span<const double> q,
                       std::size_t s, double& best, ActionIndex& arg) {
  const std::size_t b = offsets[s];
  double m = q[b];
  ActionIndex a = 0;
  for (std::size_t p = b + 1; p < offsets[s + 1]; ++p) {
    if (q[p] > m) {  // strict: ties keep the lowest index
      m = q[p];
      a = static_cast<ActionIndex>(p - b);
    }
  }
  best = m;
  arg = a;
}

}  // namespace

void transition_product(const TransitionMatrix& P, std::span<const double> v,
                        std::span<double> out, Execution exec) {
  const auto rows = static_cast<std::int64_t>(P.num_rows());
  if (exec == Execution::serial) {
    for (std::int64_t p = 0; p < rows; ++p) out[p] = row_dot(P, p, v);
    return;
  }
#pragma omp parallel for schedule(static)
  for (std::int64_t p = 0; p < rows; ++p) out[p] = row_dot(P, p, v);
}

void greedy_rows(std::span<const std::size_t> state_offsets, std::span<const double> q,
                 std::span<double> best, std::span<ActionIndex> argmax, Execution exec) {
  const auto n = static_cast<std::int64_t>(state_offsets.size() - 1);
  if (exec == Execution::serial) {
    for (std::int64_t s = 0; s < n; ++s) greedy_row(state_offsets, q, s, best[s], argmax[s]);
    return;
  }
#pragma omp parallel for schedule(static)
  for (std::int64_t s = 0; s < n; ++s) greedy_row(state_offsets, q, s, best[s], argmax[s]);
}

void affine_q(std::span<const double> rewards, double gamma, std::span<const double> x,
              std::span<const double> g, std::span<double> q, Execution exec) {
  const auto n = static_cast<std::int64_t>(rewards.size());
  if (exec == Execution::serial) {
    for (std::int64_t p = 0; p < n; ++p) q[p] = rewards[p] + gamma * (x[p] + g[p]);
    return;
  }
#pragma omp parallel for schedule(static)
  for (std::int64_t p = 0; p < n; ++p) q[p] = rewards[p] + gamma * (x[p] + g[p]);
}

void set_num_threads(int n) { omp_set_num_threads(n); }
int max_threads() { return omp_get_max_threads(); }

}  // namespace tvrvi::kernels
