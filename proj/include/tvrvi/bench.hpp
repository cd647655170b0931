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
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "tvrvi/instances.hpp"
#include "tvrvi/report.hpp"
#include "tvrvi/solvers.hpp"

namespace tvrvi {

/// How the problem-dependent variant gets its V.
struct VUpperRule {
  enum class Kind { value, universal, cheap_bound } kind = Kind::universal;
  double value = 0.0;
};

/// A benchmark grid. Cells are the cartesian product
///   instance x variant x gamma x epsilon x delta x seed
/// in that nesting order (instance outermost); each cell runs trials times
/// with seeds derived from the cell seed.
///
/// Plan file keys ("key = value", lists comma-separated):
///   instances   instance files, relative to the plan file
///   generators  generator spec files, relative to the plan file
///   variants    offline, sample, problem_dependent, classic_vi
///   epsilon, delta, seeds
///   gamma       optional; overrides each instance's discount
///   trials      default 1
///   v_upper     a number, "universal" or "cheap_bound"
///   verify      default true
///   workers     concurrent cells, default 1
///   output      directory, relative to the plan file
struct BenchPlan {
  std::vector<std::filesystem::path> instance_paths;
  std::vector<GeneratorSpec> generators;
  std::vector<Variant> variants;
  std::vector<double> epsilons;
  std::vector<double> deltas;
  std::vector<double> gammas;  // empty: use each instance's own
  std::vector<std::uint64_t> seeds;
  std::size_t trials = 1;
  VUpperRule v_upper;
  bool verify = true;
  std::size_t workers = 1;
  double oracle_tol = 1e-9;
  std::filesystem::path output_dir = "bench_out";
};

/// Throws ParseError or InvalidConfig.
BenchPlan parse_bench_plan(std::string_view text, const std::filesystem::path& base_dir = ".");
void validate(const BenchPlan& plan);

/// Seed of trial t in a cell with seed s.
std::uint64_t trial_seed(std::uint64_t cell_seed, std::size_t trial);

struct CellSummary {
  std::size_t cell = 0;
  std::string instance;
  Variant variant = Variant::offline;
  double gamma = 0.0;
  double epsilon = 0.0;
  double delta = 0.0;
  std::uint64_t seed = 0;
  std::size_t trials = 0;
  std::size_t completed = 0;  // rows with status ok
  std::size_t successes = 0;
  double success_rate = 0.0;    // successes / completed, 0 when none completed
  double median_queries = 0.0;  // over completed rows
  double median_wall_time = 0.0;
};

struct BenchOutcome {
  std::vector<BenchRow> rows;  // ordered by (cell, trial)
  std::vector<SolveReport> reports;  // aligned with rows; empty report on failure
  std::vector<CellSummary> cells;
};

/// Runs the whole grid. A failing run becomes a row with an error status and
/// the sweep continues. With write_outputs the results land in
/// output_dir/results.csv, output_dir/summary.csv and
/// output_dir/runs/cell<c>_trial<t>.rec.
BenchOutcome run_bench(const BenchPlan& plan, bool write_outputs = true);

std::vector<CellSummary> summarize(const std::vector<BenchRow>& rows);
std::string summary_csv_header();
std::string to_csv_line(const CellSummary& cell);

double median(std::vector<double> xs);

}  // namespace tvrvi
