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

#include <cstdint>

#include "tvrvi/generative_model.hpp"
#include "tvrvi/kernels.hpp"
#include "tvrvi/types.hpp"

namespace tvrvi {

/// Monte-Carlo estimate of p^T u from M generative-model queries, with the
/// variance-aware downward offset
///   shifted = mean - sqrt(2 eta var) - 4 eta^{3/4} |u|_inf - (2/3) eta |u|_inf.
struct SampleEstimate {
  double shifted_value = 0.0;
  double raw_mean = 0.0;
  double empirical_variance = 0.0;  // clamped at 0
  std::uint64_t num_samples = 0;
  double eta = 0.0;
};

/// Applies the offset formula to already-computed moments.
SampleEstimate shift_estimate(double raw_mean, double empirical_variance, double u_norm,
                              std::uint64_t num_samples, double eta);

/// Estimate for one pair from M fresh queries on substream (pair, stream).
SampleEstimate sample_dot(const ValueVector& u, PairIndex pair, std::uint64_t M, double eta,
                          const GenerativeModel& model, std::uint64_t stream);

/// sample_dot for every pair; shifted values assembled into a QVector.
/// Spends exactly M * a_tot queries. Each pair uses its own substream
/// (pair, stream), so the result does not depend on the thread count.
QVector apx_utility(const ValueVector& u, std::uint64_t M, double eta,
                    const GenerativeModel& model, std::uint64_t stream,
                    Execution exec = Execution::parallel);

}  // namespace tvrvi
