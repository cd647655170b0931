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
// Shared fixtures and independent dense reference computations for tests.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "tvrvi/instance.hpp"
#include "tvrvi/instances.hpp"
#include "tvrvi/types.hpp"

namespace tvrvi::testing {

using Dense = std::vector<std::vector<double>>;

/// One state, one action, self-loop with reward r.
inline DmdpInstance self_loop(double r = 1.0, double gamma = 0.5) {
  DmdpBuilder b(1, gamma);
  b.add_action(0, r, {{0, 1.0}});
  return b.build();
}

/// 0 -> 1 -> 2 -> 2 with reward 1 only on the final self-loop.
inline DmdpInstance chain3(double gamma = 0.5) {
  DmdpBuilder b(3, gamma);
  b.add_action(0, 0.0, {{1, 1.0}});
  b.add_action(1, 0.0, {{2, 1.0}});
  b.add_action(2, 1.0, {{2, 1.0}});
  return b.build();
}

inline DmdpInstance random_instance(std::size_t states, std::size_t actions, std::size_t support,
                                    double gamma, std::uint64_t seed) {
  GeneratorSpec spec;
  spec.kind = GeneratorKind::random_sparse;
  spec.num_states = states;
  spec.actions_per_state = actions;
  spec.support_size = support;
  spec.gamma = gamma;
  spec.seed = seed;
  return generate(spec);
}

inline DmdpInstance generated(GeneratorKind kind, std::size_t states, std::size_t actions,
                              double gamma, std::uint64_t seed, std::size_t support = 1) {
  GeneratorSpec spec;
  spec.kind = kind;
  spec.num_states = states;
  spec.actions_per_state = actions;
  spec.support_size = support;
  spec.gamma = gamma;
  spec.seed = seed;
  return generate(spec);
}

/// Dense a_tot x n transition matrix read straight from the CSR arrays.
inline Dense dense_transitions(const DmdpInstance& inst) {
  const TransitionMatrix& P = inst.transitions();
  Dense d(inst.a_tot(), std::vector<double>(inst.num_states(), 0.0));
  for (std::size_t p = 0; p < inst.a_tot(); ++p) {
    for (std::size_t j = P.row_offsets[p]; j < P.row_offsets[p + 1]; ++j) {
      d[p][P.columns[j]] += P.probabilities[j];
    }
  }
  return d;
}

inline double dense_dot(const std::vector<double>& row, const std::vector<double>& v) {
  double acc = 0.0;
  for (std::size_t i = 0; i < row.size(); ++i) acc += row[i] * v[i];
  return acc;
}

/// max_a r + gamma p^T v by brute force over the dense matrix.
inline std::vector<double> dense_bellman(const DmdpInstance& inst, const Dense& P,
                                         const std::vector<double>& v) {
  std::vector<double> out(inst.num_states(), -INFINITY);
  for (std::size_t p = 0; p < inst.a_tot(); ++p) {
    const std::size_t s = inst.state_of(p);
    out[s] = std::max(out[s], inst.reward(p) + inst.gamma() * dense_dot(P[p], v));
  }
  return out;
}

/// Solves A x = b by Gaussian elimination with partial pivoting.
inline std::vector<double> gauss_solve(Dense A, std::vector<double> b) {
  const std::size_t n = b.size();
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t piv = c;
    for (std::size_t r = c + 1; r < n; ++r) {
      if (std::abs(A[r][c]) > std::abs(A[piv][c])) piv = r;
    }
    std::swap(A[c], A[piv]);
    std::swap(b[c], b[piv]);
    for (std::size_t r = c + 1; r < n; ++r) {
      const double f = A[r][c] / A[c][c];
      for (std::size_t k = c; k < n; ++k) A[r][k] -= f * A[c][k];
      b[r] -= f * b[c];
    }
  }
  std::vector<double> x(n);
  for (std::size_t i = n; i-- > 0;) {
    double acc = b[i];
    for (std::size_t k = i + 1; k < n; ++k) acc -= A[i][k] * x[k];
    x[i] = acc / A[i][i];
  }
  return x;
}

/// v^pi = (I - gamma P^pi)^{-1} r^pi, densely.
inline std::vector<double> dense_policy_values(const DmdpInstance& inst, const Dense& P,
                                               const std::vector<ActionIndex>& pi) {
  const std::size_t n = inst.num_states();
  Dense A(n, std::vector<double>(n, 0.0));
  std::vector<double> r(n);
  for (std::size_t s = 0; s < n; ++s) {
    const std::size_t p = inst.pair_index(static_cast<StateIndex>(s), pi[s]);
    A[s][s] += 1.0;
    for (std::size_t t = 0; t < n; ++t) A[s][t] -= inst.gamma() * P[p][t];
    r[s] = inst.reward(p);
  }
  return gauss_solve(A, r);
}

/// v* by enumerating every deterministic policy (tiny instances only).
inline std::vector<double> enumerate_optimal(const DmdpInstance& inst) {
  const Dense P = dense_transitions(inst);
  const std::size_t n = inst.num_states();
  std::vector<ActionIndex> pi(n, 0);
  std::vector<double> best(n, -INFINITY);
  while (true) {
    const auto v = dense_policy_values(inst, P, pi);
    for (std::size_t s = 0; s < n; ++s) best[s] = std::max(best[s], v[s]);
    std::size_t s = 0;
    while (s < n && ++pi[s] == inst.num_actions(static_cast<StateIndex>(s))) pi[s++] = 0;
    if (s == n) break;
  }
  return best;
}

inline std::vector<double> random_vector(std::mt19937_64& rng, std::size_t n, double lo, double hi) {
  std::uniform_real_distribution<double> d(lo, hi);
  std::vector<double> v(n);
  for (double& x : v) x = d(rng);
  return v;
}

inline double max_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

}  // namespace tvrvi::testing
