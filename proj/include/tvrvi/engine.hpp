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
#include <optional>
#include <vector>

#include "tvrvi/generative_model.hpp"
#include "tvrvi/kernels.hpp"
#include "tvrvi/types.hpp"
#include "tvrvi/verifier.hpp"

namespace tvrvi {

/// Inner-loop sizes: epochs L = ceil(ln 8 / (1 - gamma)) and per-pair
/// samples per epoch M = ceil(L * 2^8 * ln(2 a_tot / delta)).
struct InnerSchedule {
  std::uint64_t epochs = 0;
  std::uint64_t samples = 0;
};

InnerSchedule schedule(double gamma, double delta, std::size_t a_tot);

struct EpochTrace {
  std::size_t epoch = 0;   // 1-based
  double step_norm = 0.0;  // ||v^(l) - v^(l-1)||_inf
  std::uint64_t queries = 0;
  std::optional<EpochAudit> audit;
};

struct EngineResult {
  ValueVector values;
  Policy policy;
  std::vector<EpochTrace> epochs;
  std::uint64_t queries = 0;  // always epochs * samples * a_tot
  InnerSchedule schedule;
};

struct EngineOptions {
  /// Epoch l samples on stream stream_base + l.
  std::uint64_t stream_base = 0;
  /// When set, checks v0 <= T_pi0(v0) on entry and audits every epoch.
  const Verifier* verifier = nullptr;
  Execution exec = Execution::parallel;
};

/// Truncated variance-reduced value iteration from (v0, pi0).
///
/// Requires v0 <= T_pi0(v0), alpha in [0, 1/(1-gamma)], and x an entrywise
/// underestimate of P v0 (the last one cannot be checked without P and is a
/// caller contract). Runs L epochs; each epoch forms
/// Q = r + gamma (x + g_hat), raises v(s) towards max_a Q(s, a) by at most
/// (1 - gamma) alpha, keeps only non-decreasing updates, and then folds a
/// fresh M-sample estimate of P (v^(l) - v^(l-1)) into the running sum g.
/// g_hat = g - (1 - gamma) alpha / 8 after the first epoch.
///
/// When v0 is an alpha-underestimate of v* and x is exact, the result is an
/// alpha/2-underestimate with probability at least 1 - delta.
EngineResult truncated_vrvi(const GenerativeModel& model, const ValueVector& v0,
                            const Policy& pi0, const QVector& x, double alpha, double delta,
                            const EngineOptions& options = {});

}  // namespace tvrvi
