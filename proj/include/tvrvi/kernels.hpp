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

// Data-parallel inner loops. Every kernel has a serial reference path and an
// OpenMP path selected by Execution; both compute each output entry with the
// same fixed accumulation order, so results are bitwise identical for any
// thread count.

#include <cstddef>
#include <span>

#include "tvrvi/instance.hpp"
#include "tvrvi/types.hpp"

namespace tvrvi {

enum class Execution { serial, parallel };

namespace kernels {

/// out[p] = p_p^T v for every row p of P.
void transition_product(const TransitionMatrix& P, std::span<const double> v,
                        std::span<double> out, Execution exec = Execution::parallel);

/// Per-state maximum of q over the state's pairs and the lowest maximizing
/// action index.
void greedy_rows(std::span<const std::size_t> state_offsets, std::span<const double> q,
                 std::span<double> best, std::span<ActionIndex> argmax,
                 Execution exec = Execution::parallel);

/// q[p] = r[p] + gamma * (x[p] + g[p]).
void affine_q(std::span<const double> rewards, double gamma, std::span<const double> x,
              std::span<const double> g, std::span<double> q,
              Execution exec = Execution::parallel);

/// Thread count used by the parallel path (wraps omp_set_num_threads).
void set_num_threads(int n);
int max_threads();

}  // namespace kernels
}  // namespace tvrvi
