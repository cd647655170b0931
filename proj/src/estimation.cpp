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
#include "tvrvi/estimation.hpp"

#include <cmath>
#include <string>

#include "tvrvi/errors.hpp"

namespace tvrvi {

namespace {

void check_args(const ValueVector& u, std::uint64_t M, double eta, const GenerativeModel& model) {
  if (M == 0) throw InvalidInput("sample size M must be positive");
  if (!(eta >= 0.0)) throw InvalidInput("offset eta must be nonnegative");
  if (u.size() != model.num_states()) {
    throw InvalidInput("value vector has " + std::to_string(u.size()) + " entries, expected " +
                       std::to_string(model.num_states()));
  }
}

SampleEstimate estimate_pair(std::span<const double> u, double u_norm, PairIndex pair,
                             std::uint64_t M, double eta, const GenerativeModel& model,
                             std::uint64_t stream) {
  StreamCursor cursor{pair, stream, 0};
  const DrawSums sums = model.draw_sums(cursor, M, u);
  const auto m = static_cast<double>(M);
  const double mean = sums.sum / m;
  const double variance = sums.sum_sq / m - mean * mean;
  return shift_estimate(mean, variance, u_norm, M, eta);
}

}  // namespace

SampleEstimate shift_estimate(double raw_mean, double empirical_variance, double u_norm,
                              std::uint64_t num_samples, double eta) {
  SampleEstimate e;
  e.raw_mean = raw_mean;
  e.empirical_variance = empirical_variance > 0.0 ? empirical_variance : 0.0;
  e.num_samples = num_samples;
  e.eta = eta;
  e.shifted_value = raw_mean;
  if (eta > 0.0) {
    e.shifted_value = raw_mean - std::sqrt(2.0 * eta * e.empirical_variance) -
                      4.0 * std::pow(eta, 0.75) * u_norm - (2.0 / 3.0) * eta * u_norm;
  }
  return e;
}

SampleEstimate sample_dot(const ValueVector& u, PairIndex pair, std::uint64_t M, double eta,
                          const GenerativeModel& model, std::uint64_t stream) {
  check_args(u, M, eta, model);
  return estimate_pair(u.span(), max_norm(u.span()), pair, M, eta, model, stream);
}

QVector apx_utility(const ValueVector& u, std::uint64_t M, double eta,
                    const GenerativeModel& model, std::uint64_t stream, Execution exec) {
  check_args(u, M, eta, model);
  const double u_norm = max_norm(u.span());
  const auto pairs = static_cast<std::int64_t>(model.a_tot());
  QVector out(model.a_tot());
  if (exec == Execution::serial) {
    for (std::int64_t p = 0; p < pairs; ++p) {
      out[p] = estimate_pair(u.span(), u_norm, p, M, eta, model, stream).shifted_value;
    }
    return out;
  }
#pragma omp parallel for schedule(dynamic, 16)
  for (std::int64_t p = 0; p < pairs; ++p) {
    out[p] = estimate_pair(u.span(), u_norm, p, M, eta, model, stream).shifted_value;
  }
  return out;
}

}  // namespace tvrvi
