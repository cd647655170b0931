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
#include "tvrvi/engine.hpp"

#include <cmath>
#include <string>

#include "tvrvi/bellman.hpp"
#include "tvrvi/errors.hpp"
#include "tvrvi/estimation.hpp"

namespace tvrvi {

InnerSchedule schedule(double gamma, double delta, std::size_t a_tot) {
  if (!(gamma > 0.0 && gamma < 1.0)) throw InvalidInput("gamma must lie in (0, 1)");
  if (!(delta > 0.0 && delta < 1.0)) throw InvalidInput("delta must lie in (0, 1)");
  if (a_tot == 0) throw InvalidInput("a_tot must be positive");
  InnerSchedule s;
  s.epochs = static_cast<std::uint64_t>(std::ceil(std::log(8.0) / (1.0 - gamma)));
  s.samples = static_cast<std::uint64_t>(std::ceil(
      static_cast<double>(s.epochs) * 256.0 * std::log(2.0 * static_cast<double>(a_tot) / delta)));
  return s;
}

EngineResult truncated_vrvi(const GenerativeModel& model, const ValueVector& v0,
                            const Policy& pi0, const QVector& x, double alpha, double delta,
                            const EngineOptions& options) {
  const std::size_t n = model.num_states();
  const std::size_t a_tot = model.a_tot();
  const double gamma = model.gamma();
  if (v0.size() != n || pi0.size() != n) throw InvalidInput("truncated_vrvi: v0/pi0 length mismatch");
  if (x.size() != a_tot) throw InvalidInput("truncated_vrvi: offsets length mismatch");
  if (!(alpha >= 0.0 && alpha <= (1.0 / (1.0 - gamma)) * (1.0 + 1e-12))) {
    throw InvalidInput("alpha " + std::to_string(alpha) + " outside [0, 1/(1-gamma)]");
  }
  const auto offsets = model.state_offsets();
  for (std::size_t s = 0; s < n; ++s) {
    if (pi0[s] >= offsets[s + 1] - offsets[s]) throw InvalidInput("pi0 has an invalid action");
  }
  const Verifier* verifier = options.verifier;
  if (verifier != nullptr &&
      verifier->policy_operator_excess(v0, pi0) > kOperatorSlack) {
    throw InvalidInput("truncated_vrvi: v0 <= T_pi0(v0) does not hold");
  }

  EngineResult out;
  out.schedule = schedule(gamma, delta, a_tot);
  const std::uint64_t L = out.schedule.epochs;
  const std::uint64_t M = out.schedule.samples;
  const double band = (1.0 - gamma) * alpha;

  ValueVector v = v0;
  Policy pi = pi0;
  QVector g(a_tot);
  QVector g_hat(a_tot);
  QVector q(a_tot);
  ValueVector best(n);
  Policy argmax(n);
  out.epochs.reserve(L);

  for (std::uint64_t ell = 1; ell <= L; ++ell) {
    kernels::affine_q(model.rewards(), gamma, x.span(), g_hat.span(), q.span(), options.exec);
    kernels::greedy_rows(offsets, q.span(), best.span(), argmax.span(), options.exec);
    const ValueVector candidate = truncate_median(v, best, band);
    const ValueVector v_prev = v;
    for (std::size_t s = 0; s < n; ++s) {
      if (candidate[s] >= v[s]) {
        v[s] = candidate[s];
        pi[s] = argmax[s];
      }
    }

    ValueVector diff(n);
    for (std::size_t s = 0; s < n; ++s) diff[s] = v[s] - v_prev[s];
    const QVector delta_g =
        apx_utility(diff, M, 0.0, model, options.stream_base + ell, options.exec);
    for (std::size_t p = 0; p < a_tot; ++p) {
      g[p] += delta_g[p];
      g_hat[p] = g[p] - band / 8.0;
    }

    EpochTrace trace;
    trace.epoch = ell;
    trace.step_norm = max_norm(diff.span());
    trace.queries = M * a_tot;
    if (verifier != nullptr) trace.audit = verifier->audit_epoch(v_prev, v, pi, v0, g, alpha);
    out.queries += trace.queries;
    out.epochs.push_back(std::move(trace));
  }
  out.values = std::move(v);
  out.policy = std::move(pi);
  return out;
}

}  // namespace tvrvi
