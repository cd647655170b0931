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
#include <span>
#include <utility>
#include <vector>

#include "tvrvi/types.hpp"

namespace tvrvi {

struct TransitionEntry {
  StateIndex state;
  double probability;
};

/// Row-stochastic transition matrix in CSR layout, one row per
/// state-action pair.
struct TransitionMatrix {
  std::vector<std::size_t> row_offsets;  // a_tot + 1 entries
  std::vector<StateIndex> columns;
  std::vector<double> probabilities;

  std::size_t num_rows() const noexcept {
    return row_offsets.empty() ? 0 : row_offsets.size() - 1;
  }
  std::size_t nnz() const noexcept { return columns.size(); }

  friend bool operator==(const TransitionMatrix&, const TransitionMatrix&) = default;
};

struct SparseRow {
  std::span<const StateIndex> states;
  std::span<const double> probabilities;

  std::size_t size() const noexcept { return states.size(); }
  double dot(std::span<const double> v) const {
    double acc = 0.0;
    for (std::size_t j = 0; j < states.size(); ++j) acc += probabilities[j] * v[states[j]];
    return acc;
  }
};

struct ValidationOptions {
  /// Accept rewards outside [0, 1]. Experimental use only: the error bounds
  /// of every solver assume bounded rewards.
  bool allow_unbounded_rewards = false;
  double row_sum_tolerance = 1e-9;
};

/// A discounted MDP with explicit sparse transitions. Immutable after
/// construction; the constructor enforces all invariants and throws
/// ValidationError naming the offending (state, action).
///
/// Pairs are laid out state-major: the actions of state s occupy pair indices
/// [state_offsets[s], state_offsets[s + 1]).
///
/// Reads of P through row() or transitions() are counted, which lets tests
/// confirm that sample-setting code paths never touch P directly.
class DmdpInstance {
 public:
  DmdpInstance(std::size_t num_states, std::vector<std::size_t> state_offsets,
               TransitionMatrix transitions, std::vector<double> rewards, double gamma,
               const ValidationOptions& options = {});

  DmdpInstance(const DmdpInstance& other);
  DmdpInstance& operator=(const DmdpInstance& other);
  DmdpInstance(DmdpInstance&& other) noexcept;
  DmdpInstance& operator=(DmdpInstance&& other) noexcept;
  ~DmdpInstance() = default;

  std::size_t num_states() const noexcept { return num_states_; }
  std::size_t a_tot() const noexcept { return rewards_.size(); }
  std::size_t nnz() const noexcept { return transitions_.nnz(); }
  double gamma() const noexcept { return gamma_; }

  std::size_t num_actions(StateIndex s) const { return state_offsets_[s + 1] - state_offsets_[s]; }
  PairIndex pair_index(StateIndex s, ActionIndex a) const { return state_offsets_[s] + a; }
  StateIndex state_of(PairIndex pair) const { return pair_state_[pair]; }
  ActionIndex action_of(PairIndex pair) const {
    return static_cast<ActionIndex>(pair - state_offsets_[pair_state_[pair]]);
  }
  std::span<const std::size_t> state_offsets() const noexcept { return state_offsets_; }

  std::span<const double> rewards() const noexcept { return rewards_; }
  double reward(PairIndex pair) const { return rewards_[pair]; }

  SparseRow row(PairIndex pair) const;
  const TransitionMatrix& transitions() const;

  /// Number of row()/transitions() calls since construction.
  std::uint64_t transition_reads() const noexcept {
    return transition_reads_.load(std::memory_order_relaxed);
  }

  /// Same instance with a different discount factor.
  DmdpInstance with_gamma(double gamma) const;

  /// Structural and bitwise equality; the read counter is ignored.
  friend bool operator==(const DmdpInstance& a, const DmdpInstance& b);

 private:
  void validate(const ValidationOptions& options) const;

  std::size_t num_states_ = 0;
  std::vector<std::size_t> state_offsets_;
  std::vector<StateIndex> pair_state_;
  TransitionMatrix transitions_;
  std::vector<double> rewards_;
  double gamma_ = 0.0;
  ValidationOptions options_;
  mutable std::atomic<std::uint64_t> transition_reads_{0};
};

/// Incremental construction; actions may be added to states in any order and
/// keep their insertion order within a state.
class DmdpBuilder {
 public:
  DmdpBuilder(std::size_t num_states, double gamma);

  DmdpBuilder& add_action(StateIndex state, double reward, std::vector<TransitionEntry> row);

  DmdpInstance build(const ValidationOptions& options = {}) const;

 private:
  struct Action {
    double reward;
    std::vector<TransitionEntry> row;
  };
  std::size_t num_states_;
  double gamma_;
  std::vector<std::vector<Action>> actions_;
};

}  // namespace tvrvi
