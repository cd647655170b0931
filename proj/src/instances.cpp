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
#include "tvrvi/instances.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <unordered_set>
#include <vector>

#include "tvrvi/errors.hpp"
#include "tvrvi/philox.hpp"
#include "tvrvi/text_format.hpp"

namespace tvrvi {

namespace {

// Substreams of the generator seed.
constexpr std::uint64_t kTransitionStream = 1;
constexpr std::uint64_t kRewardStream = 2;
constexpr std::uint64_t kSharedRowStream = 3;

// k distinct states out of n, sorted (Floyd's algorithm).
std::vector<StateIndex> distinct_states(PhiloxStream& rng, std::size_t n, std::size_t k) {
  std::unordered_set<std::uint64_t> chosen;
  std::vector<StateIndex> out;
  out.reserve(k);
  for (std::size_t j = n - k; j < n; ++j) {
    const std::uint64_t t = bounded_index(rng(), j + 1);
    const std::uint64_t pick = chosen.count(t) ? j : t;
    chosen.insert(pick);
    out.push_back(static_cast<StateIndex>(pick));
  }
  std::sort(out.begin(), out.end());
  return out;
}

// Scales weights to sum to one; the largest entry absorbs the rounding
// residual.
std::vector<TransitionEntry> normalized_row(const std::vector<StateIndex>& states,
                                            std::vector<double> weights) {
  const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
  for (double& w : weights) w /= total;
  const double residual = 1.0 - std::accumulate(weights.begin(), weights.end(), 0.0);
  *std::max_element(weights.begin(), weights.end()) += residual;
  std::vector<TransitionEntry> row(states.size());
  for (std::size_t j = 0; j < states.size(); ++j) row[j] = {states[j], weights[j]};
  return row;
}

std::vector<TransitionEntry> dirichlet_row(PhiloxStream& rng, const std::vector<StateIndex>& states) {
  std::vector<double> weights(states.size());
  for (double& w : weights) w = -std::log1p(-unit_double(rng()));
  // An all-zero draw has probability 2^-53 per entry; fall back to uniform.
  if (std::all_of(weights.begin(), weights.end(), [](double w) { return w == 0.0; })) {
    std::fill(weights.begin(), weights.end(), 1.0);
  }
  return normalized_row(states, std::move(weights));
}

double draw_reward(const RewardLaw& law, PhiloxStream& rng) {
  const double u = unit_double(rng());
  return law.kind == RewardLaw::Kind::uniform01 ? u : (u < law.p ? 1.0 : 0.0);
}

std::vector<StateIndex> all_states(std::size_t n) {
  std::vector<StateIndex> s(n);
  std::iota(s.begin(), s.end(), StateIndex{0});
  return s;
}

}  // namespace

std::string_view to_string(GeneratorKind kind) noexcept {
  switch (kind) {
    case GeneratorKind::random_sparse: return "random_sparse";
    case GeneratorKind::deterministic: return "deterministic";
    case GeneratorKind::highly_mixing: return "highly_mixing";
    case GeneratorKind::chain: return "chain";
    case GeneratorKind::worst_case_spread: return "worst_case_spread";
  }
  return "unknown";
}

GeneratorKind parse_generator_kind(std::string_view name) {
  for (auto kind : {GeneratorKind::random_sparse, GeneratorKind::deterministic,
                    GeneratorKind::highly_mixing, GeneratorKind::chain,
                    GeneratorKind::worst_case_spread}) {
    if (name == to_string(kind)) return kind;
  }
  throw InvalidConfig("unknown generator kind '" + std::string(name) + "'");
}

std::string to_string(const RewardLaw& law) {
  if (law.kind == RewardLaw::Kind::uniform01) return "uniform01";
  return "bernoulli(" + format_double(law.p) + ")";
}

RewardLaw parse_reward_law(std::string_view text) {
  text = trim(text);
  if (text == "uniform01") return RewardLaw{};
  constexpr std::string_view prefix = "bernoulli(";
  if (text.substr(0, prefix.size()) == prefix && text.size() > prefix.size() + 1 &&
      text.back() == ')') {
    const std::string_view inner = text.substr(prefix.size(), text.size() - prefix.size() - 1);
    RewardLaw law;
    law.kind = RewardLaw::Kind::bernoulli;
    try {
      law.p = parse_double(inner, 0);
    } catch (const ParseError&) {
      throw InvalidConfig("bad bernoulli parameter '" + std::string(inner) + "'");
    }
    if (!(law.p >= 0.0 && law.p <= 1.0)) throw InvalidConfig("bernoulli parameter must lie in [0, 1]");
    return law;
  }
  throw InvalidConfig("unknown reward law '" + std::string(text) + "'");
}

void validate(const GeneratorSpec& spec) {
  if (spec.num_states == 0) throw InvalidConfig("num_states must be positive");
  if (spec.num_states > (std::size_t{1} << 31)) throw InvalidConfig("num_states is too large");
  if (spec.actions_per_state == 0) throw InvalidConfig("actions_per_state must be positive");
  if (spec.support_size == 0) throw InvalidConfig("support_size must be positive");
  if (spec.support_size > spec.num_states) {
    throw InvalidConfig("support_size exceeds num_states");
  }
  if (!(spec.gamma > 0.0 && spec.gamma < 1.0)) throw InvalidConfig("gamma must lie in (0, 1)");
  if (spec.reward_law.kind == RewardLaw::Kind::bernoulli &&
      !(spec.reward_law.p >= 0.0 && spec.reward_law.p <= 1.0)) {
    throw InvalidConfig("bernoulli parameter must lie in [0, 1]");
  }
}

DmdpInstance generate(const GeneratorSpec& spec) {
  validate(spec);
  const std::size_t n = spec.num_states;
  const std::size_t m = spec.actions_per_state;
  DmdpBuilder builder(n, spec.gamma);

  std::vector<TransitionEntry> shared;
  if (spec.kind == GeneratorKind::highly_mixing) {
    PhiloxStream rng(spec.seed, kSharedRowStream, 0);
    shared = dirichlet_row(rng, distinct_states(rng, n, spec.support_size));
  }
  const std::vector<StateIndex> everyone =
      spec.kind == GeneratorKind::worst_case_spread ? all_states(n) : std::vector<StateIndex>{};

  for (std::size_t s = 0; s < n; ++s) {
    const auto state = static_cast<StateIndex>(s);
    for (std::size_t a = 0; a < m; ++a) {
      const std::uint64_t pair = s * m + a;
      PhiloxStream trng(spec.seed, kTransitionStream, pair);
      PhiloxStream rrng(spec.seed, kRewardStream, pair);
      switch (spec.kind) {
        case GeneratorKind::random_sparse:
          builder.add_action(state, draw_reward(spec.reward_law, rrng),
                             dirichlet_row(trng, distinct_states(trng, n, spec.support_size)));
          break;
        case GeneratorKind::deterministic:
          builder.add_action(state, draw_reward(spec.reward_law, rrng),
                             {{static_cast<StateIndex>(bounded_index(trng(), n)), 1.0}});
          break;
        case GeneratorKind::highly_mixing:
          builder.add_action(state, draw_reward(spec.reward_law, rrng), shared);
          break;
        case GeneratorKind::chain: {
          const bool last = s + 1 == n;
          if (a == 0) {
            builder.add_action(state, last ? 1.0 : 0.0,
                               {{last ? state : static_cast<StateIndex>(s + 1), 1.0}});
          } else {
            builder.add_action(state, 0.0, {{state, 1.0}});
          }
          break;
        }
        case GeneratorKind::worst_case_spread: {
          std::vector<double> weights(n);
          for (double& w : weights) w = 1.0 + unit_double(trng());
          builder.add_action(state, draw_reward(spec.reward_law, rrng),
                             normalized_row(everyone, std::move(weights)));
          break;
        }
      }
    }
  }
  return builder.build();
}

std::string serialize(const DmdpInstance& instance) {
  std::string out = "dmdp " + std::to_string(instance.num_states()) + " " +
                    format_double(instance.gamma()) + "\n";
  const TransitionMatrix& P = instance.transitions();
  for (PairIndex p = 0; p < instance.a_tot(); ++p) {
    const std::size_t begin = P.row_offsets[p];
    const std::size_t end = P.row_offsets[p + 1];
    out += std::to_string(instance.state_of(p)) + " " + std::to_string(instance.action_of(p)) +
           " " + format_double(instance.reward(p)) + " " + std::to_string(end - begin);
    for (std::size_t j = begin; j < end; ++j) {
      out += " " + std::to_string(P.columns[j]) + " " + format_double(P.probabilities[j]);
    }
    out += '\n';
  }
  return out;
}

DmdpInstance parse_instance(std::string_view text) {
  std::size_t line_no = 0;
  std::size_t pos = 0;
  bool have_header = false;
  std::size_t num_states = 0;
  double gamma = 0.0;
  std::vector<std::size_t> state_offsets{0};
  TransitionMatrix P;
  P.row_offsets.push_back(0);
  std::vector<double> rewards;
  std::size_t current_state = 0;
  std::size_t next_action = 0;

  while (pos < text.size()) {
    auto nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    ++line_no;
    const std::string_view line = trim(text.substr(pos, nl - pos));
    pos = nl + 1;
    if (line.empty() || line.front() == '#') continue;
    const auto tok = split_tokens(line);
    if (!have_header) {
      if (tok.size() != 3 || tok[0] != "dmdp") {
        throw ParseError("expected header 'dmdp <num_states> <gamma>'", line_no);
      }
      num_states = parse_u64(tok[1], line_no);
      if (num_states == 0) throw ParseError("num_states must be positive", line_no);
      if (num_states > (std::size_t{1} << 31)) throw ParseError("num_states is too large", line_no);
      gamma = parse_double(tok[2], line_no);
      have_header = true;
      continue;
    }
    if (tok.size() < 4) throw ParseError("record needs at least 's a r k'", line_no);
    const std::uint64_t s = parse_u64(tok[0], line_no);
    const std::uint64_t a = parse_u64(tok[1], line_no);
    const double r = parse_double(tok[2], line_no);
    const std::uint64_t k = parse_u64(tok[3], line_no);
    if (tok.size() != 4 + 2 * k) {
      throw ParseError("record declares " + std::to_string(k) + " entries but has " +
                           std::to_string((tok.size() - 4) / 2),
                       line_no);
    }
    if (s >= num_states) throw ParseError("state " + std::to_string(s) + " out of range", line_no);
    if (s < current_state || (s == current_state + 1 && next_action == 0) ||
        s > current_state + 1) {
      throw ParseError("records must list states in order without gaps", line_no);
    }
    if (s == current_state + 1) {
      state_offsets.push_back(rewards.size());
      current_state = s;
      next_action = 0;
    }
    if (a != next_action) {
      throw ParseError("expected action " + std::to_string(next_action) + " of state " +
                           std::to_string(s) + ", got " + std::to_string(a),
                       line_no);
    }
    ++next_action;
    rewards.push_back(r);
    for (std::uint64_t j = 0; j < k; ++j) {
      const std::uint64_t col = parse_u64(tok[4 + 2 * j], line_no);
      if (col >= num_states) {
        throw ParseError("successor " + std::to_string(col) + " out of range", line_no);
      }
      P.columns.push_back(static_cast<StateIndex>(col));
      P.probabilities.push_back(parse_double(tok[5 + 2 * j], line_no));
    }
    P.row_offsets.push_back(P.columns.size());
  }
  if (!have_header) throw ParseError("missing header 'dmdp <num_states> <gamma>'", line_no);
  if (rewards.empty()) throw ParseError("no records", line_no);
  state_offsets.push_back(rewards.size());
  if (state_offsets.size() != num_states + 1) {
    throw ValidationError("state " + std::to_string(state_offsets.size() - 1) + " has no actions");
  }
  return DmdpInstance(num_states, std::move(state_offsets), std::move(P), std::move(rewards),
                      gamma);
}

void save(const DmdpInstance& instance, const std::string& path) {
  write_file(path, serialize(instance));
}

DmdpInstance load(const std::string& path) { return parse_instance(read_file(path)); }

std::string serialize(const GeneratorSpec& spec) {
  std::ostringstream out;
  out << "kind = " << to_string(spec.kind) << '\n'
      << "num_states = " << spec.num_states << '\n'
      << "actions_per_state = " << spec.actions_per_state << '\n'
      << "support_size = " << spec.support_size << '\n'
      << "gamma = " << format_double(spec.gamma) << '\n'
      << "seed = " << spec.seed << '\n'
      << "reward_law = " << to_string(spec.reward_law) << '\n';
  return out.str();
}

GeneratorSpec parse_generator_spec(std::string_view text) {
  GeneratorSpec spec;
  for (const KeyValue& kv : parse_key_values(text)) {
    try {
      if (kv.key == "kind") {
        spec.kind = parse_generator_kind(kv.value);
      } else if (kv.key == "num_states") {
        spec.num_states = parse_u64(kv.value, kv.line);
      } else if (kv.key == "actions_per_state") {
        spec.actions_per_state = parse_u64(kv.value, kv.line);
      } else if (kv.key == "support_size") {
        spec.support_size = parse_u64(kv.value, kv.line);
      } else if (kv.key == "gamma") {
        spec.gamma = parse_double(kv.value, kv.line);
      } else if (kv.key == "seed") {
        spec.seed = parse_u64(kv.value, kv.line);
      } else if (kv.key == "reward_law") {
        spec.reward_law = parse_reward_law(kv.value);
      } else {
        throw ParseError("unknown key '" + kv.key + "'", kv.line);
      }
    } catch (const InvalidConfig& e) {
      throw ParseError(e.what(), kv.line);
    }
  }
  validate(spec);
  return spec;
}

}  // namespace tvrvi
