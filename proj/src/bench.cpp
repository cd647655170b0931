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
#include "tvrvi/bench.hpp"

#include <algorithm>
#include <atomic>
#include <map>
#include <memory>
#include <sstream>
#include <thread>

#include "tvrvi/errors.hpp"
#include "tvrvi/philox.hpp"
#include "tvrvi/text_format.hpp"

namespace tvrvi {

namespace {

struct LoadedInstance {
  std::string label;
  DmdpInstance instance;
};

struct Cell {
  std::size_t index = 0;
  std::size_t instance = 0;
  Variant variant = Variant::offline;
  std::optional<double> gamma;
  double epsilon = 0.0;
  double delta = 0.0;
  std::uint64_t seed = 0;
};

template <class T, class Parse>
std::vector<T> parse_list(const KeyValue& kv, Parse parse) {
  std::vector<T> out;
  for (auto f : split_fields(kv.value, ',')) {
    if (f.empty()) throw ParseError("empty list element in '" + kv.key + "'", kv.line);
    out.push_back(parse(f));
  }
  return out;
}

std::vector<LoadedInstance> load_instances(const BenchPlan& plan) {
  std::vector<LoadedInstance> out;
  for (const auto& path : plan.instance_paths) {
    out.push_back({path.filename().string(), load(path.string())});
  }
  for (const GeneratorSpec& spec : plan.generators) {
    out.push_back({std::string(to_string(spec.kind)) + "-n" + std::to_string(spec.num_states) +
                       "-seed" + std::to_string(spec.seed),
                   generate(spec)});
  }
  return out;
}

std::vector<Cell> expand(const BenchPlan& plan, std::size_t num_instances) {
  std::vector<std::optional<double>> gammas;
  if (plan.gammas.empty()) gammas.push_back(std::nullopt);
  for (double g : plan.gammas) gammas.push_back(g);
  std::vector<Cell> cells;
  for (std::size_t i = 0; i < num_instances; ++i)
    for (Variant v : plan.variants)
      for (const auto& g : gammas)
        for (double eps : plan.epsilons)
          for (double d : plan.deltas)
            for (std::uint64_t s : plan.seeds) cells.push_back({cells.size(), i, v, g, eps, d, s});
  return cells;
}

double resolve_v_upper(const VUpperRule& rule, const DmdpInstance& instance, double oracle_tol) {
  switch (rule.kind) {
    case VUpperRule::Kind::value: return rule.value;
    case VUpperRule::Kind::universal: return universal_variance_bound(instance.gamma());
    case VUpperRule::Kind::cheap_bound: {
      // A zero bound (constant v*) is not a valid V; use the smallest positive one.
      const double b = estimate_v_upper(instance, oracle_tol).cheap_bound();
      return std::max(b, 1e-12);
    }
  }
  return 0.0;
}

}  // namespace

double median(std::vector<double> xs) {
  if (xs.empty()) return 0.0;
  std::sort(xs.begin(), xs.end());
  const std::size_t n = xs.size();
  return n % 2 ? xs[n / 2] : 0.5 * (xs[n / 2 - 1] + xs[n / 2]);
}

std::uint64_t trial_seed(std::uint64_t cell_seed, std::size_t trial) {
  return mix64(cell_seed) + trial;
}

void validate(const BenchPlan& plan) {
  if (plan.instance_paths.empty() && plan.generators.empty()) {
    throw InvalidConfig("plan lists no instances or generators");
  }
  if (plan.variants.empty()) throw InvalidConfig("plan lists no variants");
  if (plan.epsilons.empty()) throw InvalidConfig("plan lists no epsilon values");
  if (plan.deltas.empty()) throw InvalidConfig("plan lists no delta values");
  if (plan.seeds.empty()) throw InvalidConfig("plan lists no seeds");
  if (plan.trials == 0) throw InvalidConfig("trials must be at least 1");
  if (plan.workers == 0) throw InvalidConfig("workers must be at least 1");
}

BenchPlan parse_bench_plan(std::string_view text, const std::filesystem::path& base_dir) {
  BenchPlan plan;
  plan.output_dir = base_dir / "bench_out";
  auto as_double = [](std::size_t ln) { return [ln](std::string_view f) { return parse_double(f, ln); }; };
  for (const KeyValue& kv : parse_key_values(text)) {
    const std::size_t ln = kv.line;
    try {
      if (kv.key == "instances") {
        for (auto f : split_fields(kv.value, ',')) plan.instance_paths.push_back(base_dir / std::string(f));
      } else if (kv.key == "generators") {
        for (auto f : split_fields(kv.value, ',')) {
          plan.generators.push_back(parse_generator_spec(read_file((base_dir / std::string(f)).string())));
        }
      } else if (kv.key == "variants") {
        plan.variants = parse_list<Variant>(kv, [](std::string_view f) { return parse_variant(f); });
      } else if (kv.key == "epsilon") {
        plan.epsilons = parse_list<double>(kv, as_double(ln));
      } else if (kv.key == "delta") {
        plan.deltas = parse_list<double>(kv, as_double(ln));
      } else if (kv.key == "gamma") {
        plan.gammas = parse_list<double>(kv, as_double(ln));
      } else if (kv.key == "seeds") {
        plan.seeds = parse_list<std::uint64_t>(kv, [ln](std::string_view f) { return parse_u64(f, ln); });
      } else if (kv.key == "trials") {
        plan.trials = parse_u64(kv.value, ln);
      } else if (kv.key == "workers") {
        plan.workers = parse_u64(kv.value, ln);
      } else if (kv.key == "verify") {
        plan.verify = parse_bool(kv.value, ln);
      } else if (kv.key == "oracle_tol") {
        plan.oracle_tol = parse_double(kv.value, ln);
      } else if (kv.key == "v_upper") {
        if (kv.value == "universal") {
          plan.v_upper.kind = VUpperRule::Kind::universal;
        } else if (kv.value == "cheap_bound") {
          plan.v_upper.kind = VUpperRule::Kind::cheap_bound;
        } else {
          plan.v_upper.kind = VUpperRule::Kind::value;
          plan.v_upper.value = parse_double(kv.value, ln);
        }
      } else if (kv.key == "output") {
        plan.output_dir = base_dir / kv.value;
      } else {
        throw ParseError("unknown key '" + kv.key + "'", ln);
      }
    } catch (const InvalidConfig& e) {
      throw ParseError(e.what(), ln);
    }
  }
  validate(plan);
  return plan;
}

std::vector<CellSummary> summarize(const std::vector<BenchRow>& rows) {
  std::map<std::size_t, std::vector<const BenchRow*>> by_cell;
  for (const BenchRow& r : rows) by_cell[r.cell].push_back(&r);
  std::vector<CellSummary> out;
  for (const auto& [cell, members] : by_cell) {
    const BenchRow& first = *members.front();
    CellSummary c;
    c.cell = cell;
    c.instance = first.instance;
    c.variant = first.variant;
    c.gamma = first.gamma;
    c.epsilon = first.epsilon;
    c.delta = first.delta;
    c.trials = members.size();
    std::vector<double> queries;
    std::vector<double> times;
    for (const BenchRow* r : members) {
      if (r->status != "ok") continue;
      ++c.completed;
      if (r->success.value_or(false)) ++c.successes;
      queries.push_back(static_cast<double>(r->queries));
      times.push_back(r->wall_time);
    }
    c.success_rate = c.completed ? static_cast<double>(c.successes) / c.completed : 0.0;
    c.median_queries = median(queries);
    c.median_wall_time = median(times);
    out.push_back(std::move(c));
  }
  return out;
}

std::string summary_csv_header() {
  return "cell,instance,variant,gamma,epsilon,delta,trials,completed,successes,success_rate,"
         "median_queries,median_wall_time";
}

std::string to_csv_line(const CellSummary& c) {
  std::ostringstream out;
  out << c.cell << ',' << c.instance << ',' << to_string(c.variant) << ','
      << format_double(c.gamma) << ',' << format_double(c.epsilon) << ','
      << format_double(c.delta) << ',' << c.trials << ',' << c.completed << ',' << c.successes
      << ',' << format_double(c.success_rate) << ',' << format_double(c.median_queries) << ','
      << format_double(round_to_ms(c.median_wall_time));
  return out.str();
}

BenchOutcome run_bench(const BenchPlan& plan, bool write_outputs) {
  validate(plan);
  const std::vector<LoadedInstance> instances = load_instances(plan);
  const std::vector<Cell> cells = expand(plan, instances.size());
  const std::size_t total = cells.size() * plan.trials;

  BenchOutcome out;
  out.rows.resize(total);
  out.reports.resize(total);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t job = next++; job < total; job = next++) {
      const Cell& cell = cells[job / plan.trials];
      const std::size_t trial = job % plan.trials;
      const LoadedInstance& base = instances[cell.instance];
      BenchRow& row = out.rows[job];
      row.cell = cell.index;
      row.trial = trial;
      row.instance = base.label;
      row.variant = cell.variant;
      row.gamma = cell.gamma.value_or(base.instance.gamma());
      row.epsilon = cell.epsilon;
      row.delta = cell.delta;
      row.seed = trial_seed(cell.seed, trial);
      try {
        std::unique_ptr<DmdpInstance> regamma;
        if (cell.gamma) regamma = std::make_unique<DmdpInstance>(base.instance.with_gamma(*cell.gamma));
        const DmdpInstance& instance = regamma ? *regamma : base.instance;
        SolveConfig config;
        config.epsilon = cell.epsilon;
        config.delta = cell.delta;
        config.seed = row.seed;
        config.variant = cell.variant;
        config.verify = plan.verify;
        config.oracle_tol = plan.oracle_tol;
        if (cell.variant == Variant::problem_dependent) {
          config.v_upper = resolve_v_upper(plan.v_upper, instance, plan.oracle_tol);
        }
        SolveReport report = solve(instance, config);
        row.queries = report.total_queries;
        row.transition_products = report.transition_products;
        row.wall_time = round_to_ms(report.wall_time);
        if (report.audit) {
          row.gap_values = report.audit->gap_values;
          row.gap_policy = report.audit->gap_policy;
          row.success = report.audit->success;
        }
        out.reports[job] = std::move(report);
      } catch (const std::exception& e) {
        row.status = std::string("error: ") + e.what();
      }
    }
  };
  const std::size_t workers = std::min(plan.workers, std::max<std::size_t>(total, 1));
  std::vector<std::thread> pool;
  for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  out.cells = summarize(out.rows);
  for (CellSummary& c : out.cells) c.seed = cells[c.cell].seed;

  if (write_outputs) {
    std::filesystem::create_directories(plan.output_dir / "runs");
    std::string results = bench_csv_header() + "\n";
    for (std::size_t job = 0; job < total; ++job) {
      const BenchRow& row = out.rows[job];
      results += to_csv_line(row) + "\n";
      if (row.status == "ok") {
        write_file((plan.output_dir / "runs" /
                    ("cell" + std::to_string(row.cell) + "_trial" + std::to_string(row.trial) + ".rec"))
                       .string(),
                   write_record(out.reports[job]));
      }
    }
    write_file((plan.output_dir / "results.csv").string(), results);
    std::string summary = summary_csv_header() + "\n";
    for (const CellSummary& c : out.cells) summary += to_csv_line(c) + "\n";
    write_file((plan.output_dir / "summary.csv").string(), summary);
  }
  return out;
}

}  // namespace tvrvi
