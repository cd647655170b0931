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

#include <atomic>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "tvrvi/instance.hpp"
#include "tvrvi/types.hpp"

namespace tvrvi {

/// Position in one (pair, stream) substream. Owned by one thread at a time;
/// the draws it produces depend only on (model seed, pair, stream, ordinal).
struct StreamCursor {
  PairIndex pair = 0;
  std::uint64_t stream = 0;
  std::uint64_t ordinal = 0;
};

/// Sufficient statistics of a batch of draws i_1..i_n: sum u(i_j) and
/// sum u(i_j)^2.
struct DrawSums {
  double sum = 0.0;
  double sum_sq = 0.0;
};

/// Generative-model oracle built from an explicit instance: returns
/// independent next-state samples from p_a(s) in O(1) per query (Vose alias
/// tables) and counts every query.
///
/// The model carries what a sampling algorithm may legitimately know: the
/// action structure, the rewards and gamma. It keeps private copies of the
/// row supports and probabilities and holds no reference to the instance.
class GenerativeModel {
 public:
  static GenerativeModel build(const DmdpInstance& instance, std::uint64_t seed);

  GenerativeModel(GenerativeModel&&) noexcept = default;
  GenerativeModel& operator=(GenerativeModel&&) noexcept = default;

  /// One query: a successor of cursor.pair. Advances cursor.ordinal by one.
  StateIndex sample_next(StreamCursor& cursor) const;

  /// Convenience form on a fresh cursor at ordinal 0.
  StateIndex sample_next(PairIndex pair, std::uint64_t stream) const;

  /// n queries from cursor.pair reduced to (sum u, sum u^2). Small batches
  /// draw each query from the alias table; large batches draw the histogram
  /// of the n queries from Multinomial(n, p) by conditional binomials, which
  /// has the same distribution at O(support) cost. Either way the query
  /// counter grows by exactly n.
  DrawSums draw_sums(StreamCursor& cursor, std::uint64_t n, std::span<const double> u) const;

  /// Total queries since build. Monotone; safe to call concurrently with
  /// sampling.
  std::uint64_t query_count() const noexcept;

  std::uint64_t seed() const noexcept { return seed_; }
  std::size_t num_states() const noexcept { return num_states_; }
  std::size_t a_tot() const noexcept { return rewards_.size(); }
  double gamma() const noexcept { return gamma_; }
  std::span<const std::size_t> state_offsets() const noexcept { return state_offsets_; }
  std::span<const double> rewards() const noexcept { return rewards_; }

  /// States reachable from pair (the alias table's outcomes).
  std::span<const StateIndex> support(PairIndex pair) const;

  /// Probabilities recovered from the alias table of pair, aligned with
  /// support(pair). Exact up to rounding of the table entries.
  std::vector<double> decode_alias(PairIndex pair) const;

 private:
  GenerativeModel() = default;
  void check_pair(PairIndex pair) const;
  void record(std::uint64_t n) const noexcept;

  struct alignas(64) Shard {
    std::atomic<std::uint64_t> count{0};
  };
  static constexpr std::size_t kShards = 64;

  std::uint64_t seed_ = 0;
  std::size_t num_states_ = 0;
  double gamma_ = 0.0;
  std::vector<std::size_t> state_offsets_;
  std::vector<double> rewards_;
  std::vector<std::size_t> row_offsets_;
  std::vector<StateIndex> states_;
  std::vector<double> alias_prob_;
  std::vector<std::uint32_t> alias_index_;
  std::vector<double> conditional_;  // p_j / sum_{i >= j} p_i
  std::unique_ptr<Shard[]> shards_;
};

}  // namespace tvrvi
