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
#include "tvrvi/generative_model.hpp"

#include <omp.h>

#include <algorithm>
#include <random>
#include <string>

#include "tvrvi/errors.hpp"
#include "tvrvi/philox.hpp"

namespace tvrvi {

namespace {

// Batches of at most this many draws per support entry use the alias table.
constexpr std::uint64_t kAliasBatchFactor = 4;

// Vose's alias method for one row.
void build_alias(std::span<const double> probs, std::span<double> prob_out,
                 std::span<std::uint32_t> alias_out) {
  const std::size_t k = probs.size();
  std::vector<double> scaled(k);
  std::vector<std::uint32_t> small;
  std::vector<std::uint32_t> large;
  for (std::size_t j = 0; j < k; ++j) {
    scaled[j] = probs[j] * static_cast<double>(k);
    (scaled[j] < 1.0 ? small : large).push_back(static_cast<std::uint32_t>(j));
  }
  while (!small.empty() && !large.empty()) {
    const std::uint32_t s = small.back();
    small.pop_back();
    const std::uint32_t l = large.back();
    prob_out[s] = scaled[s];
    alias_out[s] = l;
    scaled[l] = (scaled[l] + scaled[s]) - 1.0;
    if (scaled[l] < 1.0) {
      large.pop_back();
      small.push_back(l);
    }
  }
  for (std::uint32_t j : large) {
    prob_out[j] = 1.0;
    alias_out[j] = j;
  }
  for (std::uint32_t j : small) {  // rounding leftovers
    prob_out[j] = 1.0;
    alias_out[j] = j;
  }
}

}  // namespace

GenerativeModel GenerativeModel::build(const DmdpInstance& instance, std::uint64_t seed) {
  GenerativeModel m;
  m.seed_ = seed;
  m.num_states_ = instance.num_states();
  m.gamma_ = instance.gamma();
  m.state_offsets_.assign(instance.state_offsets().begin(), instance.state_offsets().end());
  m.rewards_.assign(instance.rewards().begin(), instance.rewards().end());
  const TransitionMatrix& P = instance.transitions();
  m.row_offsets_ = P.row_offsets;
  m.states_ = P.columns;
  m.alias_prob_.resize(P.nnz());
  m.alias_index_.resize(P.nnz());
  m.conditional_.resize(P.nnz());
  for (std::size_t row = 0; row < P.num_rows(); ++row) {
    const std::size_t b = P.row_offsets[row];
    const std::size_t k = P.row_offsets[row + 1] - b;
    const auto probs = std::span<const double>(P.probabilities).subspan(b, k);
    build_alias(probs, std::span<double>(m.alias_prob_).subspan(b, k),
                std::span<std::uint32_t>(m.alias_index_).subspan(b, k));
    double tail = 0.0;
    for (std::size_t j = k; j-- > 0;) {
      tail += probs[j];
      m.conditional_[b + j] = tail > 0.0 ? std::clamp(probs[j] / tail, 0.0, 1.0) : 0.0;
    }
  }
  m.shards_ = std::make_unique<Shard[]>(kShards);
  return m;
}

void GenerativeModel::check_pair(PairIndex pair) const {
  if (pair >= a_tot()) {
    throw InvalidInput("pair index " + std::to_string(pair) + " out of range (a_tot " +
                       std::to_string(a_tot()) + ")");
  }
}

void GenerativeModel::record(std::uint64_t n) const noexcept {
  shards_[static_cast<std::size_t>(omp_get_thread_num()) % kShards].count.fetch_add(
      n, std::memory_order_relaxed);
}

std::uint64_t GenerativeModel::query_count() const noexcept {
  std::uint64_t total = 0;
  for (std::size_t i = 0; i < kShards; ++i) total += shards_[i].count.load(std::memory_order_relaxed);
  return total;
}

std::span<const StateIndex> GenerativeModel::support(PairIndex pair) const {
  check_pair(pair);
  const std::size_t b = row_offsets_[pair];
  return std::span<const StateIndex>(states_).subspan(b, row_offsets_[pair + 1] - b);
}

std::vector<double> GenerativeModel::decode_alias(PairIndex pair) const {
  check_pair(pair);
  const std::size_t b = row_offsets_[pair];
  const std::size_t k = row_offsets_[pair + 1] - b;
  std::vector<double> p(k, 0.0);
  for (std::size_t j = 0; j < k; ++j) {
    p[j] += alias_prob_[b + j];
    p[alias_index_[b + j]] += 1.0 - alias_prob_[b + j];
  }
  for (double& x : p) x /= static_cast<double>(k);
  return p;
}

StateIndex GenerativeModel::sample_next(StreamCursor& cursor) const {
  check_pair(cursor.pair);
  const std::size_t b = row_offsets_[cursor.pair];
  const std::size_t k = row_offsets_[cursor.pair + 1] - b;
  PhiloxStream rng(seed_, cursor.stream, cursor.pair, cursor.ordinal);
  const auto words = rng.next_block();
  ++cursor.ordinal;
  record(1);
  const std::size_t col = b + bounded_index(words[0], k);
  const bool keep = unit_double(words[1]) < alias_prob_[col];
  return states_[keep ? col : b + alias_index_[col]];
}

StateIndex GenerativeModel::sample_next(PairIndex pair, std::uint64_t stream) const {
  StreamCursor cursor{pair, stream, 0};
  return sample_next(cursor);
}

DrawSums GenerativeModel::draw_sums(StreamCursor& cursor, std::uint64_t n,
                                    std::span<const double> u) const {
  check_pair(cursor.pair);
  if (u.size() != num_states_) throw InvalidInput("draw_sums: value vector length mismatch");
  const std::size_t b = row_offsets_[cursor.pair];
  const std::size_t k = row_offsets_[cursor.pair + 1] - b;
  DrawSums out;
  if (n == 0) return out;
  record(n);
  const auto count = static_cast<double>(n);

  if (k == 1) {
    const double x = u[states_[b]];
    out.sum = count * x;
    out.sum_sq = count * x * x;
    return out;
  }

  PhiloxStream rng(seed_, cursor.stream, cursor.pair, cursor.ordinal);
  if (n <= kAliasBatchFactor * k) {
    for (std::uint64_t i = 0; i < n; ++i) {
      const auto words = rng.next_block();
      const std::size_t col = b + bounded_index(words[0], k);
      const bool keep = unit_double(words[1]) < alias_prob_[col];
      const double x = u[states_[keep ? col : b + alias_index_[col]]];
      out.sum += x;
      out.sum_sq += x * x;
    }
  } else {
    auto remaining = static_cast<std::int64_t>(n);
    for (std::size_t j = 0; j < k && remaining > 0; ++j) {
      std::int64_t c = remaining;
      const double q = conditional_[b + j];
      if (j + 1 < k && q < 1.0) {
        c = q > 0.0 ? std::binomial_distribution<std::int64_t>(remaining, q)(rng) : 0;
      }
      if (c > 0) {
        const double x = u[states_[b + j]];
        const auto cd = static_cast<double>(c);
        out.sum += cd * x;
        out.sum_sq += cd * x * x;
        remaining -= c;
      }
    }
  }
  cursor.ordinal = rng.position();
  return out;
}

}  // namespace tvrvi
