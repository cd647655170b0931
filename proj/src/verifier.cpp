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
#include "tvrvi/verifier.hpp"

#include <algorithm>
#include <cmath>

namespace tvrvi {

Verifier::Verifier(const DmdpInstance& instance, double oracle_tol)
    : instance_(instance),
      oracle_tol_(oracle_tol),
      optimal_(exact_optimal_values(instance, oracle_tol)) {}

double Verifier::policy_operator_excess(const ValueVector& v, const Policy& pi) const {
  const ValueVector tv = bellman_policy(instance_, pi, v);
  double excess = -INFINITY;
  for (std::size_t s = 0; s < v.size(); ++s) excess = std::max(excess, v[s] - tv[s]);
  return excess;
}

EpochAudit Verifier::audit_epoch(const ValueVector& v_prev, const ValueVector& v,
                                 const Policy& pi, const ValueVector& v0, const QVector& g,
                                 double alpha) const {
  EpochAudit a;
  const double gamma = instance_.gamma();
  const double band = (1.0 - gamma) * alpha;
  // v + band is rounded once, so the realized step can exceed band by an ulp.
  const double fp_slack = 1e-12 * std::max(1.0, max_norm(v.span()));
  ValueVector drift_target(v.size());
  for (std::size_t s = 0; s < v.size(); ++s) {
    const double step = v[s] - v_prev[s];
    if (step < 0.0) a.monotone = false;
    if (step > band + fp_slack) a.step_within_band = false;
    if (v[s] > optimal_.values[s] + oracle_tol_) a.below_optimal = false;
    drift_target[s] = v[s] - v0[s];
  }
  a.below_policy_operator = policy_operator_excess(v, pi) <= kOperatorSlack;
  const QVector exact = transition_product(instance_, drift_target);
  a.max_drift = max_abs_diff(g.span(), exact.span());
  a.drift_bound = band / 8.0;
  return a;
}

double Verifier::value_gap(const ValueVector& v) const {
  return max_abs_diff(optimal_.values.span(), v.span());
}

double Verifier::overestimate(const ValueVector& v) const {
  double m = -INFINITY;
  for (std::size_t s = 0; s < v.size(); ++s) m = std::max(m, v[s] - optimal_.values[s]);
  return m;
}

OptimalityGap Verifier::gaps(const ValueVector& v, const Policy& pi) const {
  return epsilon_optimality_gap(instance_, optimal_.values, v, pi, oracle_tol_);
}

}  // namespace tvrvi
