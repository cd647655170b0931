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
// End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
// exits nonzero if any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <random>
#include <string>
#include <vector>

#include "tvrvi/bellman.hpp"
#include "tvrvi/estimation.hpp"
#include "tvrvi/generative_model.hpp"
#include "tvrvi/instances.hpp"
#include "tvrvi/kernels.hpp"
#include "tvrvi/report.hpp"
#include "tvrvi/solvers.hpp"

using namespace tvrvi;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

int failures = 0;

void report(int id, const std::string& title, const Outcome& o) {
  std::printf("%s criterion %d: %s -- %s\n", o.pass ? "PASS" : "FAIL", id, title.c_str(),
              o.detail.c_str());
  std::fflush(stdout);
  failures += !o.pass;
}

std::string fmt(const char* f, double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, x);
  return buf;
}

DmdpInstance make(GeneratorKind kind, std::size_t n, std::size_t actions, std::size_t support,
                  double gamma, std::uint64_t seed) {
  GeneratorSpec s;
  s.kind = kind;
  s.num_states = n;
  s.actions_per_state = actions;
  s.support_size = support;
  s.gamma = gamma;
  s.seed = seed;
  return generate(s);
}

SolveConfig config(Variant v, double eps, double delta, std::uint64_t seed, bool verify) {
  SolveConfig c;
  c.variant = v;
  c.epsilon = eps;
  c.delta = delta;
  c.seed = seed;
  c.verify = verify;
  return c;
}

double median(std::vector<double> xs) {
  std::sort(xs.begin(), xs.end());
  const std::size_t n = xs.size();
  return n % 2 ? xs[n / 2] : 0.5 * (xs[n / 2 - 1] + xs[n / 2]);
}

// Query total of a sampled solve written out from the budget formulas, with
// no library helpers: per phase ceil(1e4 h^-3 max(h, a^-2) lg) offsets per
// pair plus L * M per pair for the inner loop run at delta / (2K).
std::uint64_t closed_form_queries(double gamma, double eps, double delta, std::size_t A) {
  const double h = 1.0 - gamma;
  const auto K = static_cast<std::int64_t>(std::ceil(std::log2(1.0 / (eps * h))));
  const double lg = std::log(8.0 * A * K / delta);
  const auto Lep = static_cast<std::uint64_t>(std::ceil(std::log(8.0) / h));
  const auto M = static_cast<std::uint64_t>(
      std::ceil(Lep * 256.0 * std::log(2.0 * A / (delta / (2.0 * K)))));
  std::uint64_t total = 0;
  double alpha = 1.0 / h;
  for (std::int64_t k = 1; k <= K; ++k) {
    const auto N = static_cast<std::uint64_t>(
        std::ceil(1e4 * std::pow(h, -3.0) * std::max(h, 1.0 / (alpha * alpha)) * lg));
    total += N * A + Lep * M * A;
    alpha /= 2.0;
  }
  return total;
}

// Tallies for the per-phase and per-epoch audits shared by criteria 3 and 4.
struct AuditTally {
  std::size_t runs = 0;
  std::size_t successful_runs = 0;
  std::size_t phases_checked = 0;
  std::size_t halving_violations = 0;  // in successful runs
  std::size_t epochs_checked = 0;
  std::size_t epoch_violations = 0;

  void add(const SolveReport& r) {
    ++runs;
    const bool ok = r.audit && r.audit->success;
    successful_runs += ok;
    for (const PhaseTrace& p : r.phases) {
      if (ok) {
        ++phases_checked;
        if (!p.value_gap || *p.value_gap > p.alpha + 1e-9) ++halving_violations;
      }
      for (const EpochTrace& e : p.epochs) {
        ++epochs_checked;
        if (!e.audit || !e.audit->invariants_hold()) ++epoch_violations;
      }
    }
  }
};

AuditTally tally;

Outcome criterion_offline() {
  Outcome o;
  for (int i = 0; i < 5; ++i) {
    const double gamma = i % 2 ? 0.9 : 0.8;
    const DmdpInstance inst = make(GeneratorKind::random_sparse, 50, 4, 8, gamma, 101 + i);
    const auto start = std::chrono::steady_clock::now();
    int ok = 0;
    for (std::uint64_t t = 0; t < 20; ++t) {
      const SolveReport r = solve_offline(inst, config(Variant::offline, 0.05, 0.1, t, true));
      ok += r.audit->gap_policy <= 0.05;
      tally.add(r);
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    o.pass = o.pass && ok >= 18 && secs <= 60.0;
    o.detail += "inst" + std::to_string(i) + "(g=" + fmt("%.1f", gamma) + ") " +
                std::to_string(ok) + "/20 in " + fmt("%.2fs", secs) + "; ";
  }
  return o;
}

Outcome criterion_sample() {
  Outcome o;
  for (int i = 0; i < 5; ++i) {
    const double gamma = i % 2 ? 0.9 : 0.8;
    const DmdpInstance inst = make(GeneratorKind::random_sparse, 30, 4, 8, gamma, 101 + i);
    const std::uint64_t want = closed_form_queries(gamma, 0.2, 0.2, inst.a_tot());
    int ok = 0;
    bool accounting = true;
    for (std::uint64_t t = 0; t < 20; ++t) {
      const GenerativeModel model = GenerativeModel::build(inst, t);
      const Verifier verifier(inst, 1e-9);
      const SolveReport r = solve_sample(model, config(Variant::sample, 0.2, 0.2, t, true), &verifier);
      ok += r.audit->gap_policy <= 0.2;
      accounting = accounting && r.total_queries == want && model.query_count() == want;
      tally.add(r);
    }
    o.pass = o.pass && ok >= 16 && accounting;
    o.detail += "inst" + std::to_string(i) + " " + std::to_string(ok) + "/20" +
                (accounting ? "" : " ACCOUNTING MISMATCH") + "; ";
  }
  o.detail += "queries per trial match the closed-form sum";
  return o;
}

Outcome criterion_halving() {
  Outcome o;
  o.pass = tally.halving_violations == 0 && tally.phases_checked > 0;
  o.detail = std::to_string(tally.phases_checked) + " phases in " +
             std::to_string(tally.successful_runs) + " successful runs, " +
             std::to_string(tally.halving_violations) + " with gap > alpha_k";
  return o;
}

Outcome criterion_monotone() {
  // Add runs from the remaining verified variants and instance kinds.
  const DmdpInstance det = make(GeneratorKind::deterministic, 30, 3, 1, 0.9, 7);
  const DmdpInstance mix = make(GeneratorKind::highly_mixing, 30, 3, 30, 0.9, 8);
  const DmdpInstance spread = make(GeneratorKind::worst_case_spread, 20, 3, 1, 0.95, 9);
  for (std::uint64_t t = 0; t < 5; ++t) {
    SolveConfig pd = config(Variant::problem_dependent, 0.1, 0.2, t, true);
    pd.v_upper = 1e-3;
    tally.add(solve(det, pd));
    pd.v_upper = 10.0;
    tally.add(solve(mix, pd));
    tally.add(solve(spread, config(Variant::sample, 0.5, 0.2, t, true)));
    tally.add(solve(spread, config(Variant::offline, 0.1, 0.2, t, true)));
  }
  Outcome o;
  o.pass = tally.epoch_violations == 0 && tally.epochs_checked > 0;
  o.detail = std::to_string(tally.epochs_checked) + " epochs over " + std::to_string(tally.runs) +
             " runs, " + std::to_string(tally.epoch_violations) + " violations";
  return o;
}

Outcome criterion_epsilon_scaling() {
  const DmdpInstance inst = make(GeneratorKind::random_sparse, 30, 3, 8, 0.9, 55);
  std::vector<double> med;
  for (double eps : {0.4, 0.2, 0.1}) {
    std::vector<double> q;
    for (std::uint64_t t = 0; t < 10; ++t) {
      q.push_back(static_cast<double>(solve_sample(inst, config(Variant::sample, eps, 0.2, t, false)).total_queries));
    }
    med.push_back(median(q));
  }
  const double r1 = med[1] / med[0];
  const double r2 = med[2] / med[1];
  Outcome o;
  o.pass = r1 >= 2.5 && r1 <= 4.5 && r2 >= 2.5 && r2 <= 4.5;
  o.detail = "median queries " + fmt("%.4g", med[0]) + ", " + fmt("%.4g", med[1]) + ", " +
             fmt("%.4g", med[2]) + "; ratios " + fmt("%.3f", r1) + ", " + fmt("%.3f", r2);
  return o;
}

Outcome criterion_horizon_scaling() {
  const DmdpInstance base = make(GeneratorKind::random_sparse, 30, 3, 8, 0.5, 56);
  std::vector<double> xs, ys;
  std::string detail;
  for (double gamma : {0.5, 0.75, 0.875}) {
    const DmdpInstance inst = base.with_gamma(gamma);
    const double eps = 1.0 / std::sqrt(1.0 - gamma);
    std::vector<double> q;
    std::size_t phases = 0;
    for (std::uint64_t t = 0; t < 10; ++t) {
      const SolveReport r = solve_sample(inst, config(Variant::sample, eps, 0.2, t, false));
      q.push_back(static_cast<double>(r.total_queries));
      phases = r.phases.size();
    }
    xs.push_back(std::log(1.0 / (1.0 - gamma)));
    ys.push_back(std::log(median(q)));
    detail += "g=" + fmt("%.3f", gamma) + " K=" + std::to_string(phases) + " median " +
              fmt("%.4g", median(q)) + "; ";
  }
  const double mx = (xs[0] + xs[1] + xs[2]) / 3;
  const double my = (ys[0] + ys[1] + ys[2]) / 3;
  double sxy = 0, sxx = 0;
  for (int i = 0; i < 3; ++i) {
    sxy += (xs[i] - mx) * (ys[i] - my);
    sxx += (xs[i] - mx) * (xs[i] - mx);
  }
  const double slope = sxy / sxx;
  Outcome o;
  o.pass = slope >= 1.5 && slope <= 2.5;
  o.detail = detail + "log-log slope " + fmt("%.3f", slope);
  return o;
}

Outcome criterion_problem_dependent() {
  Outcome o;
  const double gamma = 0.9;
  struct Case {
    const char* name;
    DmdpInstance inst;
    double V;
  };
  const Case cases[] = {
      {"deterministic", make(GeneratorKind::deterministic, 30, 3, 1, gamma, 71), 1e-3},
      {"highly_mixing", make(GeneratorKind::highly_mixing, 30, 3, 30, gamma, 72), 1.0 / (1.0 - gamma)},
  };
  for (const Case& c : cases) {
    int ok = 0;
    bool fewer = true;
    std::uint64_t pd_q = 0, s_q = 0;
    for (std::uint64_t t = 0; t < 20; ++t) {
      SolveConfig pd = config(Variant::problem_dependent, 0.1, 0.2, t, true);
      pd.v_upper = c.V;
      const SolveReport a = solve(c.inst, pd);
      const SolveReport b = solve(c.inst, config(Variant::sample, 0.1, 0.2, t, false));
      ok += a.audit->success;
      fewer = fewer && a.total_queries < b.total_queries;
      pd_q = a.total_queries;
      s_q = b.total_queries;
    }
    o.pass = o.pass && fewer && ok >= 16;
    o.detail += std::string(c.name) + ": queries " + fmt("%.4g", double(pd_q)) + " vs sample " +
                fmt("%.4g", double(s_q)) + ", success " + std::to_string(ok) + "/20; ";
  }
  return o;
}

Outcome criterion_estimator() {
  // Three fixture rows: a fair coin, a skewed three-point row, and a
  // ten-state Dirichlet row from the generator.
  DmdpBuilder b(10, 0.9);
  b.add_action(0, 0.0, {{0, 0.5}, {1, 0.5}});
  b.add_action(0, 0.0, {{2, 0.1}, {5, 0.3}, {9, 0.6}});
  for (StateIndex s = 1; s < 10; ++s) b.add_action(s, 0.0, {{s, 1.0}});
  const DmdpInstance fixtures = b.build();
  const DmdpInstance dirichlet = make(GeneratorKind::random_sparse, 10, 1, 10, 0.9, 81);
  const ValueVector u{-1.0, 1.0, 0.5, 2.0, -0.3, 1.7, 0.0, 0.9, -2.0, 1.1};
  const double unorm = max_norm(u.span());

  struct Row {
    const DmdpInstance* inst;
    PairIndex pair;
  };
  const Row rows[] = {{&fixtures, 0}, {&fixtures, 1}, {&dirichlet, 4}};

  // The sampling-phase offsets of the first phase at gamma 0.9, delta 0.2
  // on a 90-pair instance with 7 phases.
  const double delta = 0.2;
  const double lg = std::log(8.0 * 90 * 7 / delta);
  const auto N = static_cast<std::uint64_t>(std::ceil(1e4 * 1000.0 * std::max(0.1, 0.01) * lg));
  const double eta = lg / static_cast<double>(N);

  Outcome o;
  const int reps = 10000;
  const std::uint64_t M = 100;
  int index = 0;
  for (const Row& row : rows) {
    const GenerativeModel model = GenerativeModel::build(*row.inst, 900 + index);
    const SparseRow p = row.inst->row(row.pair);
    const double mean = p.dot(u.span());
    double second = 0.0;
    for (std::size_t j = 0; j < p.size(); ++j) second += p.probabilities[j] * u[p.states[j]] * u[p.states[j]];
    const double sigma = std::sqrt((second - mean * mean) / M);

    double s1 = 0.0, s2 = 0.0;
    for (int r = 0; r < reps; ++r) {
      const double x = sample_dot(u, row.pair, M, 0.0, model, static_cast<std::uint64_t>(r)).raw_mean;
      s1 += x;
      s2 += x * x;
    }
    const double emp_mean = s1 / reps;
    const double emp_var = s2 / reps - emp_mean * emp_mean;
    const bool unbiased = std::abs(emp_mean - mean) <= 4.0 * sigma / std::sqrt(double(reps));
    const bool var_ok = emp_var <= unorm * unorm / M * 1.2;

    int below = 0;
    for (int r = 0; r < reps; ++r) {
      below += sample_dot(u, row.pair, N, eta, model, 1'000'000 + static_cast<std::uint64_t>(r)).shifted_value <= mean;
    }
    const double freq = below / double(reps);
    const bool under = freq >= 1.0 - 2.0 * delta;
    o.pass = o.pass && unbiased && var_ok && under;
    o.detail += "row" + std::to_string(index) + ": mean err " + fmt("%.2e", emp_mean - mean) +
                " (4 sd " + fmt("%.2e", 4.0 * sigma / std::sqrt(double(reps))) + "), var " +
                fmt("%.3e", emp_var) + " <= " + fmt("%.3e", 1.2 * unorm * unorm / M) +
                ", under " + fmt("%.4f", freq) + "; ";
    ++index;
  }
  return o;
}

Outcome criterion_truncation() {
  // Dyadic inputs (multiples of 2^-10 in [-8, 8]) keep every subtraction and
  // clamp exact, so the inequality is tested with no rounding slack.
  std::mt19937_64 rng(2024);
  std::uniform_int_distribution<int> tick(-8192, 8192);
  std::uniform_int_distribution<int> step_tick(0, 4096);
  std::uniform_int_distribution<int> dim(1, 20);
  int violations = 0;
  for (int trial = 0; trial < 10000; ++trial) {
    const int n = dim(rng);
    ValueVector a(n), b(n), x(n);
    for (int i = 0; i < n; ++i) {
      a[i] = std::ldexp(tick(rng), -10);
      b[i] = std::ldexp(tick(rng), -10);
      x[i] = std::ldexp(tick(rng), -10);
    }
    const double step = std::ldexp(step_tick(rng), -10);
    const ValueVector c = truncate_median(a, b, step);
    const double lhs = max_abs_diff(c.span(), x.span());
    const double rhs = std::max(max_abs_diff(b.span(), x.span()), max_abs_diff(a.span(), x.span()) - step);
    violations += !(lhs <= rhs);
  }
  Outcome o;
  o.pass = violations == 0;
  o.detail = "10000 tuples, " + std::to_string(violations) + " violations";
  return o;
}

Outcome criterion_determinism() {
  const DmdpInstance inst = make(GeneratorKind::random_sparse, 25, 3, 6, 0.85, 91);
  const int saved = kernels::max_threads();
  Outcome o;
  for (Variant v : {Variant::offline, Variant::sample, Variant::problem_dependent, Variant::classic_vi}) {
    SolveConfig c = config(v, 0.1, 0.1, 17, true);
    if (v == Variant::problem_dependent) c.v_upper = 2.0;
    std::vector<std::string> records;
    for (int threads : {1, 8, 1, 8}) {
      kernels::set_num_threads(threads);
      records.push_back(write_record(solve(inst, c), false));
    }
    const bool same = std::all_of(records.begin(), records.end(),
                                  [&](const std::string& r) { return r == records.front(); });
    o.pass = o.pass && same;
    o.detail += std::string(to_string(v)) + (same ? " identical" : " DIFFERS") + "; ";
  }
  kernels::set_num_threads(saved);
  return o;
}

}  // namespace

int main() {
  report(1, "offline oracle correctness", criterion_offline());
  report(2, "sample oracle correctness and exact accounting", criterion_sample());
  report(3, "error halving per phase", criterion_halving());
  report(4, "monotone underestimate per epoch", criterion_monotone());
  report(5, "epsilon^-2 query scaling", criterion_epsilon_scaling());
  report(6, "(1-gamma)^-2 query scaling at large epsilon", criterion_horizon_scaling());
  report(7, "problem-dependent budget advantage", criterion_problem_dependent());
  report(8, "estimator laws", criterion_estimator());
  report(9, "truncation inequality", criterion_truncation());
  report(10, "determinism across runs and thread counts", criterion_determinism());
  std::printf("%d of 10 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
