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
#include <string>
#include <string_view>

#include "tvrvi/instance.hpp"

namespace tvrvi {

enum class GeneratorKind { random_sparse, deterministic, highly_mixing, chain, worst_case_spread };

std::string_view to_string(GeneratorKind kind) noexcept;
GeneratorKind parse_generator_kind(std::string_view name);

/// Rewards drawn iid per pair: uniform on [0, 1), or 1 with probability p
/// and 0 otherwise. The chain ignores the law (its rewards are fixed).
struct RewardLaw {
  enum class Kind { uniform01, bernoulli } kind = Kind::uniform01;
  double p = 0.5;
};

/// "uniform01" or "bernoulli(p)".
std::string to_string(const RewardLaw& law);
RewardLaw parse_reward_law(std::string_view text);

struct GeneratorSpec {
  GeneratorKind kind = GeneratorKind::random_sparse;
  std::size_t num_states = 10;
  std::size_t actions_per_state = 2;
  /// Nonzeros per row for random_sparse and the size of the shared support
  /// for highly_mixing; ignored by the other kinds.
  std::size_t support_size = 1;
  double gamma = 0.9;
  std::uint64_t seed = 0;
  RewardLaw reward_law;
};

/// Throws InvalidConfig.
void validate(const GeneratorSpec& spec);

/// Pure function of spec.
///   random_sparse: each row has support_size distinct uniform successors
///     with Dirichlet(1, ..., 1) weights.
///   deterministic: each row is a point mass on a uniform successor.
///   highly_mixing: one Dirichlet row over support_size uniform states,
///     shared by every pair.
///   chain: action 0 of state i moves to i + 1, the last state loops on
///     itself with reward 1; other actions self-loop with reward 0.
///   worst_case_spread: full rows with weights uniform in [1, 2), so every
///     entry lies in [1 / (2n), 2 / n].
DmdpInstance generate(const GeneratorSpec& spec);

/// Line format:
///   dmdp <num_states> <gamma>
///   s a r k s1 p1 ... sk pk      (one record per pair, in pair order)
/// Blank lines and '#' comments are ignored. Reals are written as the
/// shortest decimal that parses back to the same double.
std::string serialize(const DmdpInstance& instance);
/// Throws ParseError (with the first offending line) for malformed text and
/// ValidationError for instance invariant violations.
DmdpInstance parse_instance(std::string_view text);

void save(const DmdpInstance& instance, const std::string& path);
DmdpInstance load(const std::string& path);

/// Companion "key = value" file with the GeneratorSpec fields.
std::string serialize(const GeneratorSpec& spec);
GeneratorSpec parse_generator_spec(std::string_view text);

}  // namespace tvrvi
