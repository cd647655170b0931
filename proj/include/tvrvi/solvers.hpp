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
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "tvrvi/engine.hpp"
#include "tvrvi/generative_model.hpp"
#include "tvrvi/instance.hpp"
#include "tvrvi/kernels.hpp"
#include "tvrvi/types.hpp"
#include "tvrvi/verifier.hpp"

namespace tvrvi {

enum class Variant { offline, sample, problem_dependent, classic_vi };

std::string_view to_string(Variant variant) noexcept;
/// Accepts "offline", "sample", "problem_dependent" (or "pd") and "classic_vi".
Variant parse_variant(std::string_view name);

struct SolveConfig {
  double epsilon = 0.1;
  double delta = 0.1;
  std::uint64_t seed = 0;
  Variant variant = Variant::offline;
  /// Bound V on ||(I - gamma P*)^{-1} sqrt(sigma_{v*})||_inf. Required by the
  /// problem-dependent variant, rejected by the others.
  std::optional<double> v_upper;
  /// Audit every phase and epoch against the exact oracle.
  bool verify = false;
  double oracle_tol = 1e-9;
  Execution exec = Execution::parallel;
};

/// Throws InvalidConfig describing the first violated requirement.
void validate(const SolveConfig& config, double gamma);

/// Largest V the problem-dependent variant accepts: 3 (1 - gamma)^{-3/2}.
double universal_variance_bound(double gamma);

/// K = ceil(log2(1 / (epsilon (1 - gamma)))); may be zero or negative when
/// the zero vector is already epsilon-optimal.
std::int64_t phase_count(double gamma, double epsilon);

/// log(8 a_tot K / delta), the confidence factor shared by all sampled
/// phases.
double confidence_log(std::size_t a_tot, std::int64_t phases, double delta);

struct PhaseBudget {
  std::uint64_t samples = 0;  // per-pair queries for the offset estimate
  double eta = 0.0;           // confidence over samples
  bool variance_phase = false;
};

/// N = ceil(1e4 (1-gamma)^{-3} max(1-gamma, alpha_prev^{-2}) log(8 A K / delta)),
/// eta = log(8 A K / delta) / N.
PhaseBudget sample_budget(double gamma, double alpha_prev, std::size_t a_tot,
                          std::int64_t phases, double delta);

/// Phases k below this use sample_budget; clamped to [0, K].
std::int64_t burn_in_threshold(double gamma, double v_upper, std::int64_t phases);

/// Budget for phase k (1-based): sample_budget during burn-in, afterwards
/// N = ceil(1024 alpha_prev^{-2} V^2 log(8 A K / delta)) with the matching eta.
PhaseBudget problem_dependent_budget(double gamma, double alpha_prev, std::int64_t phase,
                                     std::size_t a_tot, std::int64_t phases, double delta,
                                     double v_upper);

struct PhaseTrace {
  std::size_t phase = 0;                 // 1-based
  double alpha = 0.0;                    // target error after the phase
  std::optional<std::uint64_t> samples;  // offset samples per pair; empty for exact products
  double eta = 0.0;
  bool variance_phase = false;
  std::uint64_t queries = 0;
  std::uint64_t transition_products = 0;
  double step_norm = 0.0;            // ||v_k - v_{k-1}||_inf
  std::optional<double> value_gap;   // ||v* - v_k||_inf when verifying
  std::vector<EpochTrace> epochs;
};

struct AuditSummary {
  double gap_values = 0.0;  // ||v* - v_K||_inf
  double gap_policy = 0.0;  // ||v* - v^{pi_K}||_inf
  bool success = false;     // both gaps <= epsilon
  std::size_t epochs_audited = 0;
  std::size_t invariant_violations = 0;  // epochs failing an almost-sure invariant
  std::size_t drift_violations = 0;      // epochs whose drift exceeded its bound
  std::size_t halving_violations = 0;    // phases with ||v* - v_k||_inf > alpha_k
  bool underestimate = true;             // v_k <= v* + oracle_tol at every phase
  bool policy_dominance = true;          // gap_policy <= gap_values + oracle_tol
};

struct SolveReport {
  Variant variant = Variant::offline;
  double epsilon = 0.0;
  double delta = 0.0;
  std::uint64_t seed = 0;
  std::optional<double> v_upper;
  ValueVector values;
  Policy policy;
  std::uint64_t total_queries = 0;
  std::uint64_t transition_products = 0;
  double wall_time = 0.0;  // seconds
  std::vector<PhaseTrace> phases;
  std::optional<AuditSummary> audit;
  std::string note;
};

/// Known-matrix solver: each phase takes x = P v_{k-1} exactly and runs the
/// inner loop with failure budget delta / K. The engine still samples, on a
/// model built from the instance with config.seed.
SolveReport solve_offline(const DmdpInstance& instance, const SolveConfig& config);

/// Generative-model solver. Reads nothing but the model; verifier (required
/// when config.verify is set) is the only route to the exact instance.
SolveReport solve_sample(const GenerativeModel& model, const SolveConfig& config,
                         const Verifier* verifier = nullptr);
/// Builds the model from instance with config.seed first.
SolveReport solve_sample(const DmdpInstance& instance, const SolveConfig& config);

SolveReport solve_problem_dependent(const GenerativeModel& model, const SolveConfig& config,
                                    const Verifier* verifier = nullptr);
SolveReport solve_problem_dependent(const DmdpInstance& instance, const SolveConfig& config);

/// Value iteration from 0 for classic_vi_iterations(gamma, epsilon) steps.
SolveReport classic_vi(const DmdpInstance& instance, const SolveConfig& config);

/// Dispatches on config.variant.
SolveReport solve(const DmdpInstance& instance, const SolveConfig& config);

struct VarianceBound {
  double exact = 0.0;            // ||(I - gamma P*)^{-1} sqrt(sigma_{v*})||_inf
  double range = 0.0;            // max v* - min v*
  double range_bound = 0.0;      // range / (1 - gamma)
  double universal_bound = 0.0;  // 3 (1 - gamma)^{-3/2}
  double cheap_bound() const noexcept;  // min of the two bounds
};

/// Offline helper for choosing V: evaluates the variance functional of the
/// optimal policy exactly.
VarianceBound estimate_v_upper(const DmdpInstance& instance, double oracle_tol);

}  // namespace tvrvi
