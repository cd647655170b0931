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
#include <doctest.h>

#include <random>

#include "support/fixtures.hpp"
#include "tvrvi/bellman.hpp"
#include "tvrvi/errors.hpp"
#include "tvrvi/oracle.hpp"

using namespace tvrvi;
using namespace tvrvi::testing;

TEST_CASE("instance validation rejects each broken invariant with its location") {
  SUBCASE("row sum") {
    DmdpBuilder b(2, 0.9);
    b.add_action(0, 0.5, {{0, 0.5}, {1, 0.5}});
    b.add_action(1, 0.5, {{0, 0.5}, {1, 0.48}});
    try {
      b.build();
      FAIL("expected ValidationError");
    } catch (const ValidationError& e) {
      CHECK(e.state() == 1u);
      CHECK(e.action() == 0u);
    }
  }
  SUBCASE("reward range and override") {
    DmdpBuilder b(1, 0.9);
    b.add_action(0, 1.5, {{0, 1.0}});
    CHECK_THROWS_AS(b.build(), ValidationError);
    ValidationOptions loose;
    loose.allow_unbounded_rewards = true;
    CHECK(b.build(loose).reward(0) == 1.5);
  }
  SUBCASE("duplicate column") {
    DmdpBuilder b(2, 0.9);
    b.add_action(0, 0.0, {{1, 0.5}, {1, 0.5}});
    b.add_action(1, 0.0, {{1, 1.0}});
    CHECK_THROWS_AS(b.build(), ValidationError);
  }
  SUBCASE("state without actions") {
    DmdpBuilder b(2, 0.9);
    b.add_action(0, 0.0, {{0, 1.0}});
    CHECK_THROWS_AS(b.build(), ValidationError);
  }
  SUBCASE("gamma") {
    CHECK_THROWS_AS(self_loop(1.0, 1.0), ValidationError);
    CHECK_THROWS_AS(self_loop(1.0, 0.0), ValidationError);
  }
  SUBCASE("column out of range") {
    DmdpBuilder b(1, 0.9);
    b.add_action(0, 0.0, {{3, 1.0}});
    CHECK_THROWS_AS(b.build(), ValidationError);
  }
}

TEST_CASE("instance layout") {
  const DmdpInstance inst = random_instance(7, 3, 2, 0.8, 4);
  CHECK(inst.a_tot() == 21);
  for (PairIndex p = 0; p < inst.a_tot(); ++p) {
    CHECK(inst.pair_index(inst.state_of(p), inst.action_of(p)) == p);
  }
  CHECK_THROWS_AS(inst.row(21), InvalidInput);
}

TEST_CASE("bellman on a single self-loop") {
  const DmdpInstance inst = self_loop(1.0, 0.5);
  const GreedyResult out = bellman(inst, ValueVector{0.0});
  CHECK(out.values[0] == 1.0);
  CHECK(out.policy[0] == 0u);
  CHECK_THROWS_AS(bellman(inst, ValueVector{0.0, 1.0}), InvalidInput);
}

TEST_CASE("bellman matches a dense brute-force evaluation") {
  const DmdpInstance inst = random_instance(5, 3, 3, 0.9, 11);
  const Dense P = dense_transitions(inst);
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    const auto v = random_vector(rng, 5, -3.0, 7.0);
    const auto want = dense_bellman(inst, P, v);
    const GreedyResult got = bellman(inst, ValueVector(v));
    CHECK(max_diff(got.values.values(), want) <= 1e-12);
    // The recorded action attains the maximum.
    for (std::size_t s = 0; s < 5; ++s) {
      const PairIndex p = inst.pair_index(static_cast<StateIndex>(s), got.policy[s]);
      CHECK(inst.reward(p) + inst.gamma() * dense_dot(P[p], v) == doctest::Approx(want[s]).epsilon(1e-12));
    }
  }
}

TEST_CASE("bellman breaks ties towards the lowest action") {
  DmdpBuilder b(1, 0.5);
  b.add_action(0, 0.25, {{0, 1.0}});
  b.add_action(0, 0.5, {{0, 1.0}});
  b.add_action(0, 0.5, {{0, 1.0}});
  const GreedyResult out = bellman(b.build(), ValueVector{1.0});
  CHECK(out.policy[0] == 1u);
}

TEST_CASE("bellman_policy") {
  SUBCASE("self-loop") {
    const auto out = bellman_policy(self_loop(1.0, 0.9), Policy{0}, ValueVector{10.0});
    CHECK(out[0] == doctest::Approx(10.0).epsilon(1e-15));
  }
  SUBCASE("argmax policy reproduces bellman and dense evaluation") {
    const DmdpInstance inst = random_instance(6, 4, 3, 0.7, 2);
    const Dense P = dense_transitions(inst);
    std::mt19937_64 rng(9);
    const auto v = random_vector(rng, 6, 0.0, 3.0);
    const GreedyResult g = bellman(inst, ValueVector(v));
    CHECK(bellman_policy(inst, g.policy, ValueVector(v)) == g.values);
    Policy pi(6);
    for (std::size_t s = 0; s < 6; ++s) pi[s] = static_cast<ActionIndex>(rng() % 4);
    const auto got = bellman_policy(inst, pi, ValueVector(v));
    for (std::size_t s = 0; s < 6; ++s) {
      const PairIndex p = inst.pair_index(static_cast<StateIndex>(s), pi[s]);
      CHECK(got[s] == doctest::Approx(inst.reward(p) + 0.7 * dense_dot(P[p], v)).epsilon(1e-13));
    }
  }
  SUBCASE("invalid action") {
    CHECK_THROWS_AS(bellman_policy(self_loop(), Policy{1}, ValueVector{0.0}), InvalidInput);
  }
}

TEST_CASE("truncate_median examples") {
  CHECK(truncate_median(ValueVector{1.0}, ValueVector{0.5}, 0.1)[0] == doctest::Approx(0.9));
  CHECK(truncate_median(ValueVector{1.0}, ValueVector{1.05}, 0.1)[0] == 1.05);
  CHECK(truncate_median(ValueVector{1.0}, ValueVector{2.0}, 0.1)[0] == doctest::Approx(1.1));
  CHECK_THROWS_AS(truncate_median(ValueVector{1.0}, ValueVector{1.0, 2.0}, 0.1), InvalidInput);
  CHECK_THROWS_AS(truncate_median(ValueVector{1.0}, ValueVector{1.0}, -0.1), InvalidInput);
}

TEST_CASE("truncate_median stays within step of a and obeys the contraction inequality") {
  std::mt19937_64 rng(1234);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 100;
    const ValueVector a(random_vector(rng, n, -5.0, 5.0));
    const ValueVector b(random_vector(rng, n, -5.0, 5.0));
    const double step = 3.0 * unit(rng);
    const ValueVector c = truncate_median(a, b, step);
    CHECK(max_abs_diff(c.span(), a.span()) <= step * (1 + 1e-15) + 1e-15);
    for (int k = 0; k < 50; ++k) {
      const ValueVector x(random_vector(rng, n, -5.0, 5.0));
      const double lhs = max_abs_diff(c.span(), x.span());
      const double rhs = std::max(max_abs_diff(b.span(), x.span()),
                                  max_abs_diff(a.span(), x.span()) - step);
      CHECK(lhs <= rhs + 1e-12);
    }
  }
}

TEST_CASE("bellman is a monotone gamma-contraction") {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const DmdpInstance inst = random_instance(12, 3, 4, 0.85, seed);
    std::mt19937_64 rng(seed * 77);
    for (int pair = 0; pair < 30; ++pair) {
      const ValueVector v(random_vector(rng, 12, -4.0, 6.0));
      const ValueVector u(random_vector(rng, 12, -4.0, 6.0));
      const double lhs = max_abs_diff(bellman(inst, v).values.span(), bellman(inst, u).values.span());
      CHECK(lhs <= inst.gamma() * max_abs_diff(v.span(), u.span()) + 1e-12);
      ValueVector w = v;
      for (std::size_t s = 0; s < 12; ++s) w[s] += std::abs(u[s]);
      const ValueVector tv = bellman(inst, v).values;
      const ValueVector tw = bellman(inst, w).values;
      for (std::size_t s = 0; s < 12; ++s) CHECK(tv[s] <= tw[s]);
    }
  }
}

TEST_CASE("exact_policy_values") {
  CHECK(exact_policy_values(self_loop(1.0, 0.5), Policy{0}, 1e-12)[0] == doctest::Approx(2.0).epsilon(1e-12));
  SUBCASE("two-state cycle") {
    DmdpBuilder b(2, 0.5);
    b.add_action(0, 1.0, {{1, 1.0}});
    b.add_action(1, 0.0, {{0, 1.0}});
    const auto v = exact_policy_values(b.build(), Policy{0, 0}, 1e-12);
    CHECK(v[0] == doctest::Approx(4.0 / 3.0).epsilon(1e-12));
    CHECK(v[1] == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
  }
  SUBCASE("agrees with long fixed-point iteration and dense elimination") {
    const DmdpInstance inst = random_instance(40, 3, 5, 0.9, 21);
    Policy pi(40);
    for (std::size_t s = 0; s < 40; ++s) pi[s] = static_cast<ActionIndex>(s % 3);
    const ValueVector exact = exact_policy_values(inst, pi, 1e-11);
    ValueVector it(40);
    for (int t = 0; t < 100000; ++t) it = bellman_policy(inst, pi, it);
    CHECK(max_abs_diff(exact.span(), it.span()) <= 1e-8);
    const auto dense = dense_policy_values(inst, dense_transitions(inst), pi.actions());
    CHECK(max_diff(exact.values(), dense) <= 1e-9);
  }
  SUBCASE("iterative path above the dense limit") {
    const DmdpInstance inst = generated(GeneratorKind::deterministic, kDenseSolveLimit + 50, 2, 0.8, 3);
    const Policy pi(inst.num_states());
    const ValueVector v = exact_policy_values(inst, pi, 1e-10);
    CHECK(max_abs_diff(bellman_policy(inst, pi, v).span(), v.span()) <= 1e-10);
  }
  CHECK_THROWS_AS(exact_policy_values(self_loop(), Policy{0}, 0.0), InvalidInput);
}

TEST_CASE("exact_optimal_values") {
  CHECK(exact_optimal_values(self_loop(1.0, 0.9), 1e-6).values[0] == doctest::Approx(10.0).epsilon(1e-7));
  SUBCASE("chain") {
    const GreedyResult opt = exact_optimal_values(chain3(0.5), 1e-10);
    CHECK(opt.values[0] == doctest::Approx(0.5).epsilon(1e-9));
    CHECK(opt.values[1] == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(opt.values[2] == doctest::Approx(2.0).epsilon(1e-9));
  }
  SUBCASE("matches policy enumeration and its own greedy policy") {
    for (std::uint64_t seed = 1; seed <= 4; ++seed) {
      const DmdpInstance inst = random_instance(6, 3, 3, 0.8, seed);
      const double tol = 1e-8;
      const GreedyResult opt = exact_optimal_values(inst, tol);
      CHECK(max_diff(opt.values.values(), enumerate_optimal(inst)) <= tol);
      const ValueVector v_pi = exact_policy_values(inst, opt.policy, 1e-12);
      CHECK(max_abs_diff(v_pi.span(), opt.values.span()) <= 2 * tol);
      CHECK(max_abs_diff(bellman(inst, opt.values).values.span(), opt.values.span()) <= 2 * tol);
      CHECK(max_norm(opt.values.span()) <= 1.0 / (1.0 - inst.gamma()));
    }
  }
}

TEST_CASE("classic_vi_iterations") {
  CHECK(classic_vi_iterations(0.5, 0.01) == 11);  // ceil(ln(200) / 0.5) = ceil(10.6)
  CHECK(classic_vi_iterations(0.5, 2.0) == 0);
  CHECK(classic_vi_iterations(0.9, 1e-6) == 162);  // ceil(ln(1e7) / 0.1) = ceil(161.18)
}

TEST_CASE("epsilon_optimality_gap") {
  const double tol = 1e-10;
  SUBCASE("optimal pair") {
    const DmdpInstance inst = random_instance(10, 2, 3, 0.9, 8);
    const GreedyResult opt = exact_optimal_values(inst, tol);
    const OptimalityGap gap = epsilon_optimality_gap(inst, opt.values, opt.policy, tol);
    CHECK(gap.values <= tol);
    CHECK(gap.policy <= 10 * tol);
  }
  SUBCASE("zero vector on a self-loop") {
    const OptimalityGap gap = epsilon_optimality_gap(self_loop(), ValueVector{0.0}, Policy{0}, tol);
    CHECK(gap.values == doctest::Approx(2.0).epsilon(1e-9));
  }
  SUBCASE("coarse optimal values") {
    const DmdpInstance inst = random_instance(10, 2, 3, 0.9, 8);
    const GreedyResult coarse = exact_optimal_values(inst, 1e-3);
    CHECK(epsilon_optimality_gap(inst, coarse.values, coarse.policy, tol).values <= 1e-3);
  }
}
