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
#include "tvrvi/solvers.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <limits>
#include <memory>
#include <string>

#include "tvrvi/bellman.hpp"
#include "tvrvi/errors.hpp"
#include "tvrvi/estimation.hpp"
#include "tvrvi/oracle.hpp"

namespace tvrvi {

namespace {

constexpr double kMaxBudget = 4.0e18;

std::uint64_t checked_mul(std::uint64_t a, std::uint64_t b) {
  if (a != 0 && b > std::numeric_limits<std::uint64_t>::max() / a) {
    throw InvalidConfig("query count overflows 64 bits");
  }
  return a * b;
}

std::uint64_t checked_add(std::uint64_t a, std::uint64_t b) {
  if (b > std::numeric_limits<std::uint64_t>::max() - a) {
    throw InvalidConfig("query count overflows 64 bits");
  }
  return a + b;
}

std::uint64_t ceil_budget(double raw) {
  if (!std::isfinite(raw) || raw > kMaxBudget) {
    throw InvalidConfig("per-pair sample budget is too large to represent");
  }
  return std::max<std::uint64_t>(1, static_cast<std::uint64_t>(std::ceil(raw)));
}

void expect_variant(const SolveConfig& config, Variant want) {
  if (config.variant != want) {
    throw InvalidConfig("config variant is " + std::string(to_string(config.variant)) +
                        ", expected " + std::string(to_string(want)));
  }
}

// Policy that is greedy with respect to the zero vector: argmax reward.
Policy greedy_on_zero(std::span<const std::size_t> offsets, std::span<const double> rewards) {
  const std::size_t n = offsets.size() - 1;
  ValueVector best(n);
  Policy pi(n);
  kernels::greedy_rows(offsets, rewards, best.span(), pi.span(), Execution::serial);
  return pi;
}

SolveReport start_report(const SolveConfig& config, std::size_t num_states) {
  SolveReport report;
  report.variant = config.variant;
  report.epsilon = config.epsilon;
  report.delta = config.delta;
  report.seed = config.seed;
  report.v_upper = config.v_upper;
  report.values = ValueVector(num_states);
  report.policy = Policy(num_states);
  return report;
}

constexpr const char* kZeroIsOptimal =
    "epsilon >= 1/(1-gamma): the zero vector is already epsilon-optimal";

void record_phase_audit(const Verifier& verifier, const ValueVector& v, PhaseTrace& trace,
                        AuditSummary& audit) {
  trace.value_gap = verifier.value_gap(v);
  if (*trace.value_gap > trace.alpha + verifier.oracle_tol()) ++audit.halving_violations;
  if (verifier.overestimate(v) > verifier.oracle_tol()) audit.underestimate = false;
  for (const EpochTrace& e : trace.epochs) {
    if (!e.audit) continue;
    ++audit.epochs_audited;
    if (!e.audit->invariants_hold()) ++audit.invariant_violations;
    if (!e.audit->drift_within_bound()) ++audit.drift_violations;
  }
}

void finish_audit(const Verifier& verifier, const SolveConfig& config, SolveReport& report,
                  AuditSummary audit) {
  const OptimalityGap gap = verifier.gaps(report.values, report.policy);
  audit.gap_values = gap.values;
  audit.gap_policy = gap.policy;
  audit.success = gap.values <= config.epsilon && gap.policy <= config.epsilon;
  audit.policy_dominance = gap.policy <= gap.values + verifier.oracle_tol();
  report.audit = audit;
}

// What one phase feeds the inner loop.
struct PhaseInput {
  QVector offsets;
  PhaseTrace trace;  // samples / eta / variance_phase / queries / products filled in
  double engine_delta = 0.0;
};

using PhaseFn = std::function<PhaseInput(std::int64_t k, double alpha_prev, const ValueVector& v)>;

// Shared outer loop: K phases of error halving from (0, lowest-index policy).
SolveReport run_phases(const GenerativeModel& model, const SolveConfig& config,
                       const Verifier* verifier, std::int64_t K, const PhaseFn& phase_input) {
  const auto started = std::chrono::steady_clock::now();
  const std::size_t n = model.num_states();
  SolveReport report = start_report(config, n);
  if (K <= 0) {
    report.policy = greedy_on_zero(model.state_offsets(), model.rewards());
    report.note = kZeroIsOptimal;
    if (verifier != nullptr) finish_audit(*verifier, config, report, AuditSummary{});
    report.wall_time =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    return report;
  }

  AuditSummary audit;
  ValueVector v(n);
  Policy pi(n);
  double alpha = 1.0 / (1.0 - model.gamma());
  report.phases.reserve(static_cast<std::size_t>(K));
  for (std::int64_t k = 1; k <= K; ++k) {
    const double alpha_prev = alpha;
    alpha = alpha_prev / 2.0;
    PhaseInput input = phase_input(k, alpha_prev, v);
    EngineOptions options;
    options.stream_base = static_cast<std::uint64_t>(k) << 32;
    options.verifier = verifier;
    options.exec = config.exec;
    EngineResult inner =
        truncated_vrvi(model, v, pi, input.offsets, alpha_prev, input.engine_delta, options);

    PhaseTrace& trace = input.trace;
    trace.phase = static_cast<std::size_t>(k);
    trace.alpha = alpha;
    trace.queries = checked_add(trace.queries, inner.queries);
    trace.step_norm = max_abs_diff(inner.values.span(), v.span());
    trace.epochs = std::move(inner.epochs);
    v = std::move(inner.values);
    pi = std::move(inner.policy);
    if (verifier != nullptr) record_phase_audit(*verifier, v, trace, audit);
    report.total_queries = checked_add(report.total_queries, trace.queries);
    report.transition_products += trace.transition_products;
    report.phases.push_back(std::move(trace));
  }
  report.values = std::move(v);
  report.policy = std::move(pi);
  if (verifier != nullptr) finish_audit(*verifier, config, report, audit);
  report.wall_time =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  return report;
}

// Offset estimate x = ApxUtility(v, N, eta) on stream k << 32.
PhaseInput sampled_offsets(const GenerativeModel& model, const SolveConfig& config,
                           std::int64_t k, std::int64_t K, const ValueVector& v,
                           const PhaseBudget& budget) {
  PhaseInput in;
  in.offsets = apx_utility(v, budget.samples, budget.eta, model,
                           static_cast<std::uint64_t>(k) << 32, config.exec);
  in.trace.samples = budget.samples;
  in.trace.eta = budget.eta;
  in.trace.variance_phase = budget.variance_phase;
  in.trace.queries = checked_mul(budget.samples, model.a_tot());
  in.engine_delta = config.delta / (2.0 * static_cast<double>(K));
  return in;
}

std::unique_ptr<Verifier> maybe_verifier(const DmdpInstance& instance, const SolveConfig& config) {
  if (!config.verify) return nullptr;
  return std::make_unique<Verifier>(instance, config.oracle_tol);
}

void check_model_verifier(const SolveConfig& config, const Verifier* verifier) {
  if (config.verify && verifier == nullptr) {
    throw InvalidConfig("verify requested but no verifier was supplied for the model");
  }
}

}  // namespace

std::string_view to_string(Variant variant) noexcept {
  switch (variant) {
    case Variant::offline: return "offline";
    case Variant::sample: return "sample";
    case Variant::problem_dependent: return "problem_dependent";
    case Variant::classic_vi: return "classic_vi";
  }
  return "unknown";
}

Variant parse_variant(std::string_view name) {
  if (name == "offline") return Variant::offline;
  if (name == "sample") return Variant::sample;
  if (name == "problem_dependent" || name == "pd") return Variant::problem_dependent;
  if (name == "classic_vi") return Variant::classic_vi;
  throw InvalidConfig("unknown variant '" + std::string(name) + "'");
}

double universal_variance_bound(double gamma) { return 3.0 * std::pow(1.0 - gamma, -1.5); }

void validate(const SolveConfig& config, double gamma) {
  if (!(gamma > 0.0 && gamma < 1.0)) throw InvalidConfig("gamma must lie in (0, 1)");
  if (!(config.epsilon > 0.0) || !std::isfinite(config.epsilon)) {
    throw InvalidConfig("epsilon must be positive and finite");
  }
  if (!(config.delta > 0.0 && config.delta < 1.0)) throw InvalidConfig("delta must lie in (0, 1)");
  if (!(config.oracle_tol > 0.0)) throw InvalidConfig("oracle_tol must be positive");
  if (config.variant == Variant::problem_dependent) {
    if (!config.v_upper) throw InvalidConfig("problem_dependent requires v_upper");
    const double V = *config.v_upper;
    if (!(V > 0.0) || !std::isfinite(V)) throw InvalidConfig("v_upper must be positive");
    const double cap = universal_variance_bound(gamma);
    if (V > cap * (1.0 + 1e-12)) {
      throw InvalidConfig("v_upper " + std::to_string(V) + " exceeds 3 (1 - gamma)^{-3/2} = " +
                          std::to_string(cap));
    }
  } else if (config.v_upper) {
    throw InvalidConfig("v_upper is only meaningful for problem_dependent");
  }
}

std::int64_t phase_count(double gamma, double epsilon) {
  return static_cast<std::int64_t>(std::ceil(std::log2(1.0 / (epsilon * (1.0 - gamma)))));
}

double confidence_log(std::size_t a_tot, std::int64_t phases, double delta) {
  return std::log(8.0 * static_cast<double>(a_tot) * static_cast<double>(phases) / delta);
}

PhaseBudget sample_budget(double gamma, double alpha_prev, std::size_t a_tot,
                          std::int64_t phases, double delta) {
  const double h = 1.0 - gamma;
  const double lg = confidence_log(a_tot, phases, delta);
  PhaseBudget b;
  b.samples = ceil_budget(1e4 * std::pow(h, -3.0) * std::max(h, 1.0 / (alpha_prev * alpha_prev)) * lg);
  b.eta = lg / static_cast<double>(b.samples);
  return b;
}

std::int64_t burn_in_threshold(double gamma, double v_upper, std::int64_t phases) {
  const double raw = std::ceil(std::log2(128.0 * std::pow(1.0 - gamma, -5.0) /
                                         (v_upper * v_upper * v_upper)));
  const double upper = static_cast<double>(std::max<std::int64_t>(phases, 0));
  return static_cast<std::int64_t>(std::clamp(raw, 0.0, upper));
}

PhaseBudget problem_dependent_budget(double gamma, double alpha_prev, std::int64_t phase,
                                     std::size_t a_tot, std::int64_t phases, double delta,
                                     double v_upper) {
  if (phase < burn_in_threshold(gamma, v_upper, phases)) {
    return sample_budget(gamma, alpha_prev, a_tot, phases, delta);
  }
  const double lg = confidence_log(a_tot, phases, delta);
  PhaseBudget b;
  b.samples = ceil_budget(1024.0 * v_upper * v_upper * lg / (alpha_prev * alpha_prev));
  b.eta = lg / static_cast<double>(b.samples);
  b.variance_phase = true;
  return b;
}

SolveReport solve_offline(const DmdpInstance& instance, const SolveConfig& config) {
  validate(config, instance.gamma());
  expect_variant(config, Variant::offline);
  const std::int64_t K = phase_count(instance.gamma(), config.epsilon);
  const GenerativeModel model = GenerativeModel::build(instance, config.seed);
  const auto verifier = maybe_verifier(instance, config);
  return run_phases(model, config, verifier.get(), K,
                    [&](std::int64_t, double, const ValueVector& v) {
                      PhaseInput in;
                      in.offsets = transition_product(instance, v, config.exec);
                      in.trace.transition_products = 1;
                      in.engine_delta = config.delta / static_cast<double>(K);
                      return in;
                    });
}

SolveReport solve_sample(const GenerativeModel& model, const SolveConfig& config,
                         const Verifier* verifier) {
  validate(config, model.gamma());
  expect_variant(config, Variant::sample);
  check_model_verifier(config, verifier);
  const std::int64_t K = phase_count(model.gamma(), config.epsilon);
  return run_phases(model, config, verifier, K,
                    [&](std::int64_t k, double alpha_prev, const ValueVector& v) {
                      const PhaseBudget budget =
                          sample_budget(model.gamma(), alpha_prev, model.a_tot(), K, config.delta);
                      return sampled_offsets(model, config, k, K, v, budget);
                    });
}

SolveReport solve_sample(const DmdpInstance& instance, const SolveConfig& config) {
  validate(config, instance.gamma());
  const GenerativeModel model = GenerativeModel::build(instance, config.seed);
  const auto verifier = maybe_verifier(instance, config);
  return solve_sample(model, config, verifier.get());
}

SolveReport solve_problem_dependent(const GenerativeModel& model, const SolveConfig& config,
                                    const Verifier* verifier) {
  validate(config, model.gamma());
  expect_variant(config, Variant::problem_dependent);
  check_model_verifier(config, verifier);
  const std::int64_t K = phase_count(model.gamma(), config.epsilon);
  const double V = *config.v_upper;
  return run_phases(model, config, verifier, K,
                    [&](std::int64_t k, double alpha_prev, const ValueVector& v) {
                      const PhaseBudget budget = problem_dependent_budget(
                          model.gamma(), alpha_prev, k, model.a_tot(), K, config.delta, V);
                      return sampled_offsets(model, config, k, K, v, budget);
                    });
}

SolveReport solve_problem_dependent(const DmdpInstance& instance, const SolveConfig& config) {
  validate(config, instance.gamma());
  const GenerativeModel model = GenerativeModel::build(instance, config.seed);
  const auto verifier = maybe_verifier(instance, config);
  return solve_problem_dependent(model, config, verifier.get());
}

SolveReport classic_vi(const DmdpInstance& instance, const SolveConfig& config) {
  validate(config, instance.gamma());
  expect_variant(config, Variant::classic_vi);
  const auto started = std::chrono::steady_clock::now();
  const auto verifier = maybe_verifier(instance, config);
  const double gamma = instance.gamma();
  const std::uint64_t iterations = classic_vi_iterations(gamma, config.epsilon);
  SolveReport report = start_report(config, instance.num_states());
  AuditSummary audit;
  if (iterations == 0) {
    report.policy = greedy_on_zero(instance.state_offsets(), instance.rewards());
    report.note = kZeroIsOptimal;
  }
  // The bound ||v* - v_t||_inf <= gamma^t / (1 - gamma) plays the role of alpha.
  double bound = 1.0 / (1.0 - gamma);
  report.phases.reserve(iterations);
  for (std::uint64_t t = 1; t <= iterations; ++t) {
    GreedyResult step = bellman(instance, report.values, config.exec);
    bound *= gamma;
    PhaseTrace trace;
    trace.phase = t;
    trace.alpha = bound;
    trace.transition_products = 1;
    trace.step_norm = max_abs_diff(step.values.span(), report.values.span());
    report.values = std::move(step.values);
    report.policy = std::move(step.policy);
    if (verifier) record_phase_audit(*verifier, report.values, trace, audit);
    ++report.transition_products;
    report.phases.push_back(std::move(trace));
  }
  if (verifier) finish_audit(*verifier, config, report, audit);
  report.wall_time =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  return report;
}

SolveReport solve(const DmdpInstance& instance, const SolveConfig& config) {
  switch (config.variant) {
    case Variant::offline: return solve_offline(instance, config);
    case Variant::sample: return solve_sample(instance, config);
    case Variant::problem_dependent: return solve_problem_dependent(instance, config);
    case Variant::classic_vi: return classic_vi(instance, config);
  }
  throw InvalidConfig("unknown variant");
}

double VarianceBound::cheap_bound() const noexcept { return std::min(range_bound, universal_bound); }

VarianceBound estimate_v_upper(const DmdpInstance& instance, double oracle_tol) {
  const GreedyResult opt = exact_optimal_values(instance, oracle_tol);
  const std::size_t n = instance.num_states();
  ValueVector squared(n);
  for (std::size_t s = 0; s < n; ++s) squared[s] = opt.values[s] * opt.values[s];
  ValueVector root_sigma(n);
  for (std::size_t s = 0; s < n; ++s) {
    const SparseRow row = instance.row(instance.pair_index(static_cast<StateIndex>(s), opt.policy[s]));
    const double mean = row.dot(opt.values.span());
    root_sigma[s] = std::sqrt(std::max(0.0, row.dot(squared.span()) - mean * mean));
  }
  VarianceBound out;
  out.exact = max_norm(policy_resolvent(instance, opt.policy, root_sigma, oracle_tol).span());
  const auto [lo, hi] = std::minmax_element(opt.values.begin(), opt.values.end());
  out.range = *hi - *lo;
  out.range_bound = out.range / (1.0 - instance.gamma());
  out.universal_bound = universal_variance_bound(instance.gamma());
  return out;
}

}  // namespace tvrvi
