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

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "tvrvi/solvers.hpp"

namespace tvrvi {

/// Serializes a report as "key = value" lines. Every field round-trips
/// exactly except wall_time, which is written in seconds rounded to 1 ms.
/// With include_wall_time = false the line is omitted, so two runs that
/// differ only in timing produce identical text.
std::string write_record(const SolveReport& report, bool include_wall_time = true);
SolveReport parse_record(std::string_view text);

/// One benchmark row per (cell, trial). Column order is the order of the
/// fields below.
struct BenchRow {
  std::size_t cell = 0;
  std::size_t trial = 0;
  std::string instance;
  Variant variant = Variant::offline;
  double gamma = 0.0;
  double epsilon = 0.0;
  double delta = 0.0;
  std::uint64_t seed = 0;
  std::uint64_t queries = 0;
  std::uint64_t transition_products = 0;
  double wall_time = 0.0;  // seconds, 1 ms resolution
  std::optional<double> gap_values;
  std::optional<double> gap_policy;
  std::optional<bool> success;  // empty when not verified or the run failed
  std::string status = "ok";    // "ok" or "error: <message>"
};

std::string bench_csv_header();
std::string to_csv_line(const BenchRow& row);
/// Parses a file produced by bench_csv_header + to_csv_line.
std::vector<BenchRow> parse_bench_csv(std::string_view text);

/// Seconds rounded to the nearest millisecond.
double round_to_ms(double seconds);

/// One-line human summary of a report.
std::string summary_line(const SolveReport& report);

}  // namespace tvrvi
