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
#include "tvrvi/oracle.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <string>

#include "tvrvi/errors.hpp"

namespace tvrvi {

namespace {

void check_tol(double tol) {
  if (!(tol > 0.0)) throw InvalidInput("oracle tolerance must be positive");
}

// y -> rhs + gamma P^pi y
ValueVector resolvent_step(const DmdpInstance& instance, const Policy& pi,
                           const ValueVector& rhs, const ValueVector& y) {
  ValueVector out(y.size());
  for (std::size_t s = 0; s < y.size(); ++s) {
    const PairIndex p = instance.pair_index(static_cast<StateIndex>(s), pi[s]);
    out[s] = rhs[s] + instance.gamma() * instance.row(p).dot(y.span());
  }
  return out;
}

ValueVector solve_dense(const DmdpInstance& instance, const Policy& pi, const ValueVector& rhs) {
  const auto n = static_cast<Eigen::Index>(instance.num_states());
  Eigen::MatrixXd A = Eigen::MatrixXd::Identity(n, n);
  Eigen::VectorXd b(n);
  for (Eigen::Index s = 0; s < n; ++s) {
    b(s) = rhs[s];
    const SparseRow row = instance.row(instance.pair_index(static_cast<StateIndex>(s), pi[s]));
    for (std::size_t j = 0; j < row.size(); ++j) {
      A(s, row.states[j]) -= instance.gamma() * row.probabilities[j];
    }
  }
  const Eigen::VectorXd y = A.partialPivLu().solve(b);
  return ValueVector(std::vector<double>(y.data(), y.data() + n));
}

}  // namespace

std::uint64_t classic_vi_iterations(double gamma, double tol) {
  const double arg = 1.0 / (tol * (1.0 - gamma));
  if (arg <= 1.0) return 0;
  return static_cast<std::uint64_t>(std::ceil(std::log(arg) / (1.0 - gamma)));
}

ValueVector policy_resolvent(const DmdpInstance& instance, const Policy& pi,
                             const ValueVector& rhs, double tol) {
  check_tol(tol);
  check_policy(instance, pi);
  if (rhs.size() != instance.num_states()) throw InvalidInput("right-hand side length mismatch");
  ValueVector y(instance.num_states());
  if (instance.num_states() <= kDenseSolveLimit) {
    y = solve_dense(instance, pi, rhs);
    if (max_abs_diff(resolvent_step(instance, pi, rhs, y).span(), y.span()) <= tol) return y;
    // Ill-conditioned; polish the direct solution by iteration below.
  }
  const double scale = std::max(1.0, max_norm(rhs.span()));
  const std::uint64_t cap = std::max<std::uint64_t>(
      1000, 20 * classic_vi_iterations(instance.gamma(), tol * 1e-3 / scale));
  double residual = 0.0;
  for (std::uint64_t it = 0; it < cap; ++it) {
    ValueVector next = resolvent_step(instance, pi, rhs, y);
    residual = max_abs_diff(next.span(), y.span());
    if (residual <= tol) return y;
    y = std::move(next);
  }
  throw NumericalFailure(
      "policy evaluation did not converge, last residual " + std::to_string(residual), residual);
}

ValueVector exact_policy_values(const DmdpInstance& instance, const Policy& pi, double tol) {
  check_policy(instance, pi);
  ValueVector r(instance.num_states());
  for (std::size_t s = 0; s < r.size(); ++s) {
    r[s] = instance.reward(instance.pair_index(static_cast<StateIndex>(s), pi[s]));
  }
  return policy_resolvent(instance, pi, r, tol);
}

GreedyResult exact_optimal_values(const DmdpInstance& instance, double tol) {
  check_tol(tol);
  const std::uint64_t iterations = classic_vi_iterations(instance.gamma(), tol);
  ValueVector v(instance.num_states());
  for (std::uint64_t t = 0; t < iterations; ++t) v = bellman(instance, v).values;
  return GreedyResult{v, bellman(instance, v).policy};
}

OptimalityGap epsilon_optimality_gap(const DmdpInstance& instance, const ValueVector& v_star,
                                     const ValueVector& v, const Policy& pi, double oracle_tol) {
  if (v.size() != instance.num_states() || v_star.size() != instance.num_states()) {
    throw InvalidInput("value vector length mismatch");
  }
  const ValueVector v_pi = exact_policy_values(instance, pi, oracle_tol);
  return OptimalityGap{max_abs_diff(v_star.span(), v.span()),
                       max_abs_diff(v_star.span(), v_pi.span())};
}

OptimalityGap epsilon_optimality_gap(const DmdpInstance& instance, const ValueVector& v,
                                     const Policy& pi, double oracle_tol) {
  const GreedyResult opt = exact_optimal_values(instance, oracle_tol);
  return epsilon_optimality_gap(instance, opt.values, v, pi, oracle_tol);
}

}  // namespace tvrvi
