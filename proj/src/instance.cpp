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
#include "tvrvi/instance.hpp"

#include <cmath>
#include <string>
#include <unordered_set>

#include "tvrvi/errors.hpp"

namespace tvrvi {

DmdpInstance::DmdpInstance(std::size_t num_states, std::vector<std::size_t> state_offsets,
                           TransitionMatrix transitions, std::vector<double> rewards,
                           double gamma, const ValidationOptions& options)
    : num_states_(num_states),
      state_offsets_(std::move(state_offsets)),
      transitions_(std::move(transitions)),
      rewards_(std::move(rewards)),
      gamma_(gamma),
      options_(options) {
  validate(options);
  pair_state_.resize(rewards_.size());
  for (std::size_t s = 0; s < num_states_; ++s) {
    for (std::size_t p = state_offsets_[s]; p < state_offsets_[s + 1]; ++p) {
      pair_state_[p] = static_cast<StateIndex>(s);
    }
  }
}

DmdpInstance::DmdpInstance(const DmdpInstance& other)
    : num_states_(other.num_states_),
      state_offsets_(other.state_offsets_),
      pair_state_(other.pair_state_),
      transitions_(other.transitions_),
      rewards_(other.rewards_),
      gamma_(other.gamma_),
      options_(other.options_) {}

DmdpInstance& DmdpInstance::operator=(const DmdpInstance& other) {
  if (this != &other) {
    num_states_ = other.num_states_;
    state_offsets_ = other.state_offsets_;
    pair_state_ = other.pair_state_;
    transitions_ = other.transitions_;
    rewards_ = other.rewards_;
    gamma_ = other.gamma_;
    options_ = other.options_;
    transition_reads_.store(0, std::memory_order_relaxed);
  }
  return *this;
}

DmdpInstance::DmdpInstance(DmdpInstance&& other) noexcept
    : num_states_(other.num_states_),
      state_offsets_(std::move(other.state_offsets_)),
      pair_state_(std::move(other.pair_state_)),
      transitions_(std::move(other.transitions_)),
      rewards_(std::move(other.rewards_)),
      gamma_(other.gamma_),
      options_(other.options_),
      transition_reads_(other.transition_reads_.load(std::memory_order_relaxed)) {}

DmdpInstance& DmdpInstance::operator=(DmdpInstance&& other) noexcept {
  if (this != &other) {
    num_states_ = other.num_states_;
    state_offsets_ = std::move(other.state_offsets_);
    pair_state_ = std::move(other.pair_state_);
    transitions_ = std::move(other.transitions_);
    rewards_ = std::move(other.rewards_);
    gamma_ = other.gamma_;
    options_ = other.options_;
    transition_reads_.store(other.transition_reads_.load(std::memory_order_relaxed),
                            std::memory_order_relaxed);
  }
  return *this;
}

SparseRow DmdpInstance::row(PairIndex pair) const {
  if (pair >= a_tot()) throw InvalidInput("pair index " + std::to_string(pair) + " out of range");
  transition_reads_.fetch_add(1, std::memory_order_relaxed);
  const std::size_t b = transitions_.row_offsets[pair];
  const std::size_t e = transitions_.row_offsets[pair + 1];
  return SparseRow{std::span<const StateIndex>(transitions_.columns).subspan(b, e - b),
                   std::span<const double>(transitions_.probabilities).subspan(b, e - b)};
}

const TransitionMatrix& DmdpInstance::transitions() const {
  transition_reads_.fetch_add(1, std::memory_order_relaxed);
  return transitions_;
}

DmdpInstance DmdpInstance::with_gamma(double gamma) const {
  return DmdpInstance(num_states_, state_offsets_, transitions_, rewards_, gamma, options_);
}

bool operator==(const DmdpInstance& a, const DmdpInstance& b) {
  return a.num_states_ == b.num_states_ && a.state_offsets_ == b.state_offsets_ &&
         a.transitions_ == b.transitions_ && a.rewards_ == b.rewards_ && a.gamma_ == b.gamma_;
}

void DmdpInstance::validate(const ValidationOptions& options) const {
  if (num_states_ == 0) throw ValidationError("instance must have at least one state");
  if (!(gamma_ > 0.0 && gamma_ < 1.0)) {
    throw ValidationError("gamma must lie in (0, 1), got " + std::to_string(gamma_));
  }
  if (state_offsets_.size() != num_states_ + 1 || state_offsets_.front() != 0) {
    throw ValidationError("state offsets must have num_states + 1 entries starting at 0");
  }
  for (std::size_t s = 0; s < num_states_; ++s) {
    if (state_offsets_[s + 1] <= state_offsets_[s]) {
      throw ValidationError("state " + std::to_string(s) + " has no actions");
    }
  }
  const std::size_t a_tot = state_offsets_.back();
  if (rewards_.size() != a_tot) throw ValidationError("reward count does not match a_tot");
  const auto& P = transitions_;
  if (P.row_offsets.size() != a_tot + 1 || P.row_offsets.front() != 0 ||
      P.columns.size() != P.probabilities.size() || P.row_offsets.back() != P.columns.size()) {
    throw ValidationError("transition matrix shape does not match a_tot");
  }

  std::vector<std::uint32_t> seen(num_states_, 0);
  std::uint32_t stamp = 0;
  for (std::size_t s = 0; s < num_states_; ++s) {
    for (std::size_t p = state_offsets_[s]; p < state_offsets_[s + 1]; ++p) {
      const std::size_t a = p - state_offsets_[s];
      const double r = rewards_[p];
      if (!std::isfinite(r)) throw ValidationError("reward is not finite", s, a);
      if (!options.allow_unbounded_rewards && (r < 0.0 || r > 1.0)) {
        throw ValidationError("reward " + std::to_string(r) + " outside [0, 1]", s, a);
      }
      const std::size_t b = P.row_offsets[p];
      const std::size_t e = P.row_offsets[p + 1];
      if (e <= b) throw ValidationError("transition row is empty", s, a);
      ++stamp;
      double sum = 0.0;
      for (std::size_t j = b; j < e; ++j) {
        const StateIndex col = P.columns[j];
        const double prob = P.probabilities[j];
        if (col >= num_states_) {
          throw ValidationError("successor state " + std::to_string(col) + " out of range", s, a);
        }
        if (!(prob >= 0.0 && prob <= 1.0)) {
          throw ValidationError("probability " + std::to_string(prob) + " outside [0, 1]", s, a);
        }
        if (seen[col] == stamp) {
          throw ValidationError("duplicate successor state " + std::to_string(col), s, a);
        }
        seen[col] = stamp;
        sum += prob;
      }
      if (std::abs(sum - 1.0) > options.row_sum_tolerance) {
        throw ValidationError("transition row sums to " + std::to_string(sum) + ", expected 1", s,
                              a);
      }
    }
  }
}

DmdpBuilder::DmdpBuilder(std::size_t num_states, double gamma)
    : num_states_(num_states), gamma_(gamma), actions_(num_states) {}

DmdpBuilder& DmdpBuilder::add_action(StateIndex state, double reward,
                                     std::vector<TransitionEntry> row) {
  if (state >= num_states_) {
    throw InvalidInput("state " + std::to_string(state) + " out of range");
  }
  actions_[state].push_back(Action{reward, std::move(row)});
  return *this;
}

DmdpInstance DmdpBuilder::build(const ValidationOptions& options) const {
  std::vector<std::size_t> offsets(num_states_ + 1, 0);
  TransitionMatrix P;
  P.row_offsets.push_back(0);
  std::vector<double> rewards;
  for (std::size_t s = 0; s < num_states_; ++s) {
    offsets[s + 1] = offsets[s] + actions_[s].size();
    for (const auto& action : actions_[s]) {
      rewards.push_back(action.reward);
      for (const auto& entry : action.row) {
        P.columns.push_back(entry.state);
        P.probabilities.push_back(entry.probability);
      }
      P.row_offsets.push_back(P.columns.size());
    }
  }
  return DmdpInstance(num_states_, std::move(offsets), std::move(P), std::move(rewards), gamma_,
                      options);
}

}  // namespace tvrvi
