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

#include "tvrvi/bellman.hpp"
#include "tvrvi/instance.hpp"
#include "tvrvi/oracle.hpp"
#include "tvrvi/types.hpp"

namespace tvrvi {

/// Slack for v <= T_pi(v) checks.
inline constexpr double kOperatorSlack = 1e-9;

/// Invariants of one inner-loop epoch, checked against the exact model.
struct EpochAudit {
  bool monotone = true;               // v^(l-1) <= v^(l)
  bool step_within_band = true;       // ||v^(l) - v^(l-1)||_inf <= (1 - gamma) alpha
  bool below_policy_operator = true;  // v^(l) <= T_pi(v^(l)) + 1e-9
  bool below_optimal = true;          // v^(l) <= v* + oracle_tol
  double max_drift = 0.0;             // max |g - P (v^(l) - v^(0))|
  double drift_bound = 0.0;           // (1 - gamma) alpha / 8

  /// The almost-sure invariants (drift is probabilistic and reported apart).
  bool invariants_hold() const noexcept {
    return monotone && step_within_band && below_policy_operator && below_optimal;
  }
  bool drift_within_bound() const noexcept { return max_drift <= drift_bound; }
};

/// Holds v* for one instance and checks solver iterates against it. All
/// checks read P; sample-setting solvers only touch P through this class.
class Verifier {
 public:
  Verifier(const DmdpInstance& instance, double oracle_tol);

  const DmdpInstance& instance() const noexcept { return instance_; }
  const ValueVector& optimal_values() const noexcept { return optimal_.values; }
  const Policy& optimal_policy() const noexcept { return optimal_.policy; }
  double oracle_tol() const noexcept { return oracle_tol_; }

  /// max_s (v(s) - T_pi(v)(s)); <= 0 when v is below its policy operator.
  double policy_operator_excess(const ValueVector& v, const Policy& pi) const;

  EpochAudit audit_epoch(const ValueVector& v_prev, const ValueVector& v, const Policy& pi,
                         const ValueVector& v0, const QVector& g, double alpha) const;

  /// ||v* - v||_inf.
  double value_gap(const ValueVector& v) const;
  /// max_s (v(s) - v*(s)); positive means v overestimates somewhere.
  double overestimate(const ValueVector& v) const;

  OptimalityGap gaps(const ValueVector& v, const Policy& pi) const;

 private:
  const DmdpInstance& instance_;
  double oracle_tol_;
  GreedyResult optimal_;
};

}  // namespace tvrvi
