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
// Command-line front end: instance generation, single solves, verification
// of saved records, and benchmark sweeps.

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "tvrvi/bench.hpp"
#include "tvrvi/errors.hpp"
#include "tvrvi/instances.hpp"
#include "tvrvi/kernels.hpp"
#include "tvrvi/oracle.hpp"
#include "tvrvi/report.hpp"
#include "tvrvi/solvers.hpp"
#include "tvrvi/text_format.hpp"
#include "tvrvi/verifier.hpp"

namespace {

constexpr int kRunError = 2;

struct SolveArgs {
  std::string instance;
  double epsilon = 0.0;
  double delta = 0.1;
  std::uint64_t seed = 0;
  bool verify = false;
  double oracle_tol = 1e-9;
  std::string v_upper;
  std::string record;
  int threads = 0;
};

void add_solve_options(CLI::App* cmd, SolveArgs& args, bool wants_v_upper) {
  cmd->add_option("--instance", args.instance, "Instance file")->required()->check(CLI::ExistingFile);
  cmd->add_option("--epsilon", args.epsilon, "Target accuracy")->required();
  cmd->add_option("--delta", args.delta, "Failure probability")->capture_default_str();
  cmd->add_option("--seed", args.seed, "Random seed")->capture_default_str();
  cmd->add_flag("--verify", args.verify, "Audit against the exact oracle");
  cmd->add_option("--oracle-tol", args.oracle_tol, "Oracle tolerance")->capture_default_str();
  cmd->add_option("--record", args.record, "Write the full report here");
  cmd->add_option("--threads", args.threads, "OpenMP threads (0 = runtime default)");
  if (wants_v_upper) {
    cmd->add_option("--v-upper", args.v_upper,
                    "Variance bound V: a number, 'universal' or 'cheap_bound'")
        ->required();
  }
}

double resolve_v_upper(const std::string& text, const tvrvi::DmdpInstance& instance,
                       double oracle_tol) {
  if (text == "universal") return tvrvi::universal_variance_bound(instance.gamma());
  if (text == "cheap_bound") {
    return std::max(tvrvi::estimate_v_upper(instance, oracle_tol).cheap_bound(), 1e-12);
  }
  return tvrvi::parse_double(text, 0);
}

int run_solve(const SolveArgs& args, tvrvi::Variant variant) {
  if (args.threads > 0) tvrvi::kernels::set_num_threads(args.threads);
  const tvrvi::DmdpInstance instance = tvrvi::load(args.instance);
  tvrvi::SolveConfig config;
  config.epsilon = args.epsilon;
  config.delta = args.delta;
  config.seed = args.seed;
  config.variant = variant;
  config.verify = args.verify;
  config.oracle_tol = args.oracle_tol;
  if (variant == tvrvi::Variant::problem_dependent) {
    config.v_upper = resolve_v_upper(args.v_upper, instance, args.oracle_tol);
  }
  const tvrvi::SolveReport report = tvrvi::solve(instance, config);
  if (!args.record.empty()) tvrvi::write_file(args.record, tvrvi::write_record(report));
  std::cout << tvrvi::summary_line(report) << '\n';
  return 0;
}

int run_verify(const std::string& instance_path, const std::string& record_path,
               double oracle_tol) {
  const tvrvi::DmdpInstance instance = tvrvi::load(instance_path);
  const tvrvi::SolveReport report = tvrvi::parse_record(tvrvi::read_file(record_path));
  if (report.values.size() != instance.num_states() ||
      report.policy.size() != instance.num_states()) {
    throw tvrvi::InvalidInput("record does not match the instance's state count");
  }
  const tvrvi::Verifier verifier(instance, oracle_tol);
  const tvrvi::OptimalityGap gap = verifier.gaps(report.values, report.policy);
  const bool ok = gap.values <= report.epsilon && gap.policy <= report.epsilon;
  std::cout << "gap_values=" << tvrvi::format_double(gap.values)
            << " gap_policy=" << tvrvi::format_double(gap.policy)
            << " overestimate=" << tvrvi::format_double(verifier.overestimate(report.values))
            << " policy_operator_excess="
            << tvrvi::format_double(verifier.policy_operator_excess(report.values, report.policy))
            << " epsilon=" << tvrvi::format_double(report.epsilon)
            << " epsilon_optimal=" << (ok ? "true" : "false") << '\n';
  return 0;
}

int run_bench(const std::string& plan_path, const std::string& output) {
  const std::filesystem::path base = std::filesystem::path(plan_path).parent_path();
  tvrvi::BenchPlan plan = tvrvi::parse_bench_plan(tvrvi::read_file(plan_path),
                                                  base.empty() ? "." : base);
  if (!output.empty()) plan.output_dir = output;
  const tvrvi::BenchOutcome outcome = tvrvi::run_bench(plan);
  std::cout << tvrvi::summary_csv_header() << '\n';
  for (const auto& cell : outcome.cells) std::cout << tvrvi::to_csv_line(cell) << '\n';
  std::size_t failed = 0;
  for (const auto& row : outcome.rows) failed += row.status != "ok";
  if (failed) std::cerr << failed << " of " << outcome.rows.size() << " runs failed\n";
  std::cerr << "results in " << plan.output_dir.string() << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Truncated variance-reduced value iteration for discounted MDPs"};
  app.require_subcommand(1);

  tvrvi::GeneratorSpec spec;
  std::string kind = "random_sparse";
  std::string reward_law = "uniform01";
  std::string out_path = "instance.dmdp";
  std::optional<std::size_t> support;
  auto* gen = app.add_subcommand("gen", "Generate an instance and its spec file");
  gen->add_option("--kind", kind, "random_sparse, deterministic, highly_mixing, chain, worst_case_spread")
      ->capture_default_str();
  gen->add_option("--states", spec.num_states, "Number of states")->required();
  gen->add_option("--actions", spec.actions_per_state, "Actions per state")->capture_default_str();
  gen->add_option("--support", support, "Row support size (default min(states, 8))");
  gen->add_option("--gamma", spec.gamma, "Discount factor")->required();
  gen->add_option("--seed", spec.seed, "Generator seed")->capture_default_str();
  gen->add_option("--reward-law", reward_law, "uniform01 or bernoulli(p)")->capture_default_str();
  gen->add_option("--out", out_path, "Instance path; the spec goes to <out>.spec")
      ->capture_default_str();

  SolveArgs offline_args, sample_args, pd_args, vi_args;
  auto* offline = app.add_subcommand("solve-offline", "Solve with the transition matrix known");
  add_solve_options(offline, offline_args, false);
  auto* sample = app.add_subcommand("solve-sample", "Solve through the generative model");
  add_solve_options(sample, sample_args, false);
  auto* pd = app.add_subcommand("solve-pd", "Generative-model solve with a variance bound");
  add_solve_options(pd, pd_args, true);
  auto* vi = app.add_subcommand("classic-vi", "Plain value iteration baseline");
  add_solve_options(vi, vi_args, false);

  std::string verify_instance, verify_record;
  double verify_tol = 1e-9;
  auto* verify = app.add_subcommand("verify", "Check a saved report against the exact oracle");
  verify->add_option("--instance", verify_instance, "Instance file")->required()->check(CLI::ExistingFile);
  verify->add_option("--record", verify_record, "Report record")->required()->check(CLI::ExistingFile);
  verify->add_option("--oracle-tol", verify_tol, "Oracle tolerance")->capture_default_str();

  std::string plan_path, bench_output;
  auto* bench = app.add_subcommand("bench", "Run a benchmark plan");
  bench->add_option("--plan", plan_path, "Plan file")->required()->check(CLI::ExistingFile);
  bench->add_option("--output", bench_output, "Override the plan's output directory");

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen->parsed()) {
      spec.kind = tvrvi::parse_generator_kind(kind);
      spec.reward_law = tvrvi::parse_reward_law(reward_law);
      spec.support_size = support.value_or(std::min<std::size_t>(spec.num_states, 8));
      const tvrvi::DmdpInstance instance = tvrvi::generate(spec);
      tvrvi::save(instance, out_path);
      tvrvi::write_file(out_path + ".spec", tvrvi::serialize(spec));
      std::cout << "wrote " << out_path << " (" << instance.num_states() << " states, "
                << instance.a_tot() << " pairs, " << instance.nnz() << " nonzeros)\n";
      return 0;
    }
    if (offline->parsed()) return run_solve(offline_args, tvrvi::Variant::offline);
    if (sample->parsed()) return run_solve(sample_args, tvrvi::Variant::sample);
    if (pd->parsed()) return run_solve(pd_args, tvrvi::Variant::problem_dependent);
    if (vi->parsed()) return run_solve(vi_args, tvrvi::Variant::classic_vi);
    if (verify->parsed()) return run_verify(verify_instance, verify_record, verify_tol);
    if (bench->parsed()) return run_bench(plan_path, bench_output);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kRunError;
  }
  return 0;
}
