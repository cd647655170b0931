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

#include <cstddef>
#include <cstdint>

#include "tvrvi/bellman.hpp"
#include "tvrvi/instance.hpp"
#include "tvrvi/types.hpp"

namespace tvrvi {

/// Above this many states exact_policy_values iterates T_pi instead of
/// solving the dense linear system.
inline constexpr std::size_t kDenseSolveLimit = 2000;

/// Value iteration count after which ||v^(t) - v*||_inf <= tol when starting
/// from 0: ceil(log(1 / (tol (1 - gamma))) / (1 - gamma)), or 0 when 0 is
/// already tol-optimal.
std::uint64_t classic_vi_iterations(double gamma, double tol);

/// Solves (I - gamma P^pi) y = rhs, returning y with
/// ||rhs + gamma P^pi y - y||_inf <= tol. Dense LU up to kDenseSolveLimit
/// states, fixed-point iteration beyond. Throws NumericalFailure if the
/// iteration hits its cap.
ValueVector policy_resolvent(const DmdpInstance& instance, const Policy& pi,
                             const ValueVector& rhs, double tol);

/// v^pi with ||T_pi(v) - v||_inf <= tol. Throws NumericalFailure if the
/// iterative path hits its cap.
ValueVector exact_policy_values(const DmdpInstance& instance, const Policy& pi, double tol);

/// v* within tol (classic value iteration from 0) and its greedy policy.
GreedyResult exact_optimal_values(const DmdpInstance& instance, double tol);

struct OptimalityGap {
  double values;  // ||v* - v||_inf
  double policy;  // ||v* - v^pi||_inf
};

OptimalityGap epsilon_optimality_gap(const DmdpInstance& instance, const ValueVector& v,
                                     const Policy& pi, double oracle_tol);

/// Same as above with a precomputed v*.
OptimalityGap epsilon_optimality_gap(const DmdpInstance& instance, const ValueVector& v_star,
                                     const ValueVector& v, const Policy& pi, double oracle_tol);

}  // namespace tvrvi
