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
#include "tvrvi/report.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include "tvrvi/errors.hpp"
#include "tvrvi/text_format.hpp"

namespace tvrvi {

namespace {

std::string join_doubles(std::span<const double> xs) {
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) out += ',';
    out += format_double(xs[i]);
  }
  return out;
}

std::vector<double> split_doubles(std::string_view text, std::size_t line) {
  std::vector<double> out;
  if (trim(text).empty()) return out;
  for (auto f : split_fields(text, ',')) out.push_back(parse_double(f, line));
  return out;
}

const char* bool_text(bool b) { return b ? "true" : "false"; }

// Epoch line: step_norm queries [monotone band operator optimal max_drift drift_bound]
std::string epoch_text(const EpochTrace& e) {
  std::string out = format_double(e.step_norm) + " " + std::to_string(e.queries);
  if (e.audit) {
    const EpochAudit& a = *e.audit;
    out += std::string(" ") + bool_text(a.monotone) + " " + bool_text(a.step_within_band) + " " +
           bool_text(a.below_policy_operator) + " " + bool_text(a.below_optimal) + " " +
           format_double(a.max_drift) + " " + format_double(a.drift_bound);
  }
  return out;
}

EpochTrace parse_epoch(std::string_view text, std::size_t index, std::size_t line) {
  const auto tok = split_tokens(text);
  if (tok.size() != 2 && tok.size() != 8) throw ParseError("epoch needs 2 or 8 fields", line);
  EpochTrace e;
  e.epoch = index;
  e.step_norm = parse_double(tok[0], line);
  e.queries = parse_u64(tok[1], line);
  if (tok.size() == 8) {
    EpochAudit a;
    a.monotone = parse_bool(tok[2], line);
    a.step_within_band = parse_bool(tok[3], line);
    a.below_policy_operator = parse_bool(tok[4], line);
    a.below_optimal = parse_bool(tok[5], line);
    a.max_drift = parse_double(tok[6], line);
    a.drift_bound = parse_double(tok[7], line);
    e.audit = a;
  }
  return e;
}

std::string csv_quote(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c == '\n' ? ' ' : c;
  }
  return out + '"';
}

// Splits one CSV line honouring double-quoted fields.
std::vector<std::string> csv_fields(std::string_view line, std::size_t line_no) {
  std::vector<std::string> out(1);
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        out.back() += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        out.back() += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      out.emplace_back();
    } else if (c != '\r') {
      out.back() += c;
    }
  }
  if (quoted) throw ParseError("unterminated quoted field", line_no);
  return out;
}

std::string optional_double(const std::optional<double>& x) {
  return x ? format_double(*x) : std::string();
}

}  // namespace

double round_to_ms(double seconds) { return std::round(seconds * 1000.0) / 1000.0; }

std::string write_record(const SolveReport& r, bool include_wall_time) {
  std::ostringstream out;
  out << "variant = " << to_string(r.variant) << '\n'
      << "epsilon = " << format_double(r.epsilon) << '\n'
      << "delta = " << format_double(r.delta) << '\n'
      << "seed = " << r.seed << '\n';
  if (r.v_upper) out << "v_upper = " << format_double(*r.v_upper) << '\n';
  out << "total_queries = " << r.total_queries << '\n'
      << "transition_products = " << r.transition_products << '\n';
  if (include_wall_time) out << "wall_time = " << format_double(round_to_ms(r.wall_time)) << '\n';
  if (!r.note.empty()) out << "note = " << r.note << '\n';
  out << "values = " << join_doubles(r.values.span()) << '\n';
  out << "policy = ";
  for (std::size_t s = 0; s < r.policy.size(); ++s) out << (s ? "," : "") << r.policy[s];
  out << '\n' << "phases = " << r.phases.size() << '\n';
  for (const PhaseTrace& p : r.phases) {
    const std::string key = "phase." + std::to_string(p.phase) + ".";
    out << key << "alpha = " << format_double(p.alpha) << '\n'
        << key << "samples = " << (p.samples ? std::to_string(*p.samples) : "exact") << '\n'
        << key << "eta = " << format_double(p.eta) << '\n'
        << key << "variance_phase = " << bool_text(p.variance_phase) << '\n'
        << key << "queries = " << p.queries << '\n'
        << key << "transition_products = " << p.transition_products << '\n'
        << key << "step_norm = " << format_double(p.step_norm) << '\n';
    if (p.value_gap) out << key << "value_gap = " << format_double(*p.value_gap) << '\n';
    out << key << "epochs = " << p.epochs.size() << '\n';
    for (const EpochTrace& e : p.epochs) {
      out << key << "epoch." << e.epoch << " = " << epoch_text(e) << '\n';
    }
  }
  if (r.audit) {
    const AuditSummary& a = *r.audit;
    out << "audit.gap_values = " << format_double(a.gap_values) << '\n'
        << "audit.gap_policy = " << format_double(a.gap_policy) << '\n'
        << "audit.success = " << bool_text(a.success) << '\n'
        << "audit.epochs_audited = " << a.epochs_audited << '\n'
        << "audit.invariant_violations = " << a.invariant_violations << '\n'
        << "audit.drift_violations = " << a.drift_violations << '\n'
        << "audit.halving_violations = " << a.halving_violations << '\n'
        << "audit.underestimate = " << bool_text(a.underestimate) << '\n'
        << "audit.policy_dominance = " << bool_text(a.policy_dominance) << '\n';
  }
  return out.str();
}

SolveReport parse_record(std::string_view text) {
  SolveReport r;
  std::map<std::size_t, PhaseTrace> phases;
  std::optional<std::size_t> declared_phases;
  AuditSummary audit;
  bool have_audit = false;
  for (const KeyValue& kv : parse_key_values(text)) {
    const std::string& k = kv.key;
    const std::string& v = kv.value;
    const std::size_t ln = kv.line;
    if (k == "variant") {
      try {
        r.variant = parse_variant(v);
      } catch (const InvalidConfig& e) {
        throw ParseError(e.what(), ln);
      }
    } else if (k == "epsilon") {
      r.epsilon = parse_double(v, ln);
    } else if (k == "delta") {
      r.delta = parse_double(v, ln);
    } else if (k == "seed") {
      r.seed = parse_u64(v, ln);
    } else if (k == "v_upper") {
      r.v_upper = parse_double(v, ln);
    } else if (k == "total_queries") {
      r.total_queries = parse_u64(v, ln);
    } else if (k == "transition_products") {
      r.transition_products = parse_u64(v, ln);
    } else if (k == "wall_time") {
      r.wall_time = parse_double(v, ln);
    } else if (k == "note") {
      r.note = v;
    } else if (k == "values") {
      r.values = ValueVector(split_doubles(v, ln));
    } else if (k == "policy") {
      std::vector<ActionIndex> acts;
      if (!v.empty()) {
        for (auto f : split_fields(v, ',')) acts.push_back(static_cast<ActionIndex>(parse_u64(f, ln)));
      }
      r.policy = Policy(std::move(acts));
    } else if (k == "phases") {
      declared_phases = parse_u64(v, ln);
    } else if (k.rfind("phase.", 0) == 0) {
      const auto dot = k.find('.', 6);
      if (dot == std::string::npos) throw ParseError("bad phase key '" + k + "'", ln);
      const std::size_t index = parse_u64(std::string_view(k).substr(6, dot - 6), ln);
      const std::string field = k.substr(dot + 1);
      PhaseTrace& p = phases[index];
      p.phase = index;
      if (field == "alpha") {
        p.alpha = parse_double(v, ln);
      } else if (field == "samples") {
        if (v == "exact") p.samples.reset(); else p.samples = parse_u64(v, ln);
      } else if (field == "eta") {
        p.eta = parse_double(v, ln);
      } else if (field == "variance_phase") {
        p.variance_phase = parse_bool(v, ln);
      } else if (field == "queries") {
        p.queries = parse_u64(v, ln);
      } else if (field == "transition_products") {
        p.transition_products = parse_u64(v, ln);
      } else if (field == "step_norm") {
        p.step_norm = parse_double(v, ln);
      } else if (field == "value_gap") {
        p.value_gap = parse_double(v, ln);
      } else if (field == "epochs") {
        p.epochs.reserve(parse_u64(v, ln));
      } else if (field.rfind("epoch.", 0) == 0) {
        const std::size_t e = parse_u64(std::string_view(field).substr(6), ln);
        if (e != p.epochs.size() + 1) throw ParseError("epochs out of order", ln);
        p.epochs.push_back(parse_epoch(v, e, ln));
      } else {
        throw ParseError("unknown phase field '" + field + "'", ln);
      }
    } else if (k.rfind("audit.", 0) == 0) {
      have_audit = true;
      const std::string field = k.substr(6);
      if (field == "gap_values") audit.gap_values = parse_double(v, ln);
      else if (field == "gap_policy") audit.gap_policy = parse_double(v, ln);
      else if (field == "success") audit.success = parse_bool(v, ln);
      else if (field == "epochs_audited") audit.epochs_audited = parse_u64(v, ln);
      else if (field == "invariant_violations") audit.invariant_violations = parse_u64(v, ln);
      else if (field == "drift_violations") audit.drift_violations = parse_u64(v, ln);
      else if (field == "halving_violations") audit.halving_violations = parse_u64(v, ln);
      else if (field == "underestimate") audit.underestimate = parse_bool(v, ln);
      else if (field == "policy_dominance") audit.policy_dominance = parse_bool(v, ln);
      else throw ParseError("unknown audit field '" + field + "'", ln);
    } else {
      throw ParseError("unknown key '" + k + "'", ln);
    }
  }
  std::size_t expect = 1;
  for (auto& [index, p] : phases) {
    if (index != expect++) throw ParseError("phase " + std::to_string(index) + " out of sequence", 0);
    r.phases.push_back(std::move(p));
  }
  if (declared_phases && *declared_phases != r.phases.size()) {
    throw ParseError("record declares " + std::to_string(*declared_phases) + " phases but lists " +
                         std::to_string(r.phases.size()),
                     0);
  }
  if (have_audit) r.audit = audit;
  return r;
}

std::string bench_csv_header() {
  return "cell,trial,instance,variant,gamma,epsilon,delta,seed,queries,transition_products,"
         "wall_time,gap_values,gap_policy,success,status";
}

std::string to_csv_line(const BenchRow& row) {
  std::ostringstream out;
  out << row.cell << ',' << row.trial << ',' << csv_quote(row.instance) << ','
      << to_string(row.variant) << ',' << format_double(row.gamma) << ','
      << format_double(row.epsilon) << ',' << format_double(row.delta) << ',' << row.seed << ','
      << row.queries << ',' << row.transition_products << ','
      << format_double(round_to_ms(row.wall_time)) << ',' << optional_double(row.gap_values)
      << ',' << optional_double(row.gap_policy) << ','
      << (row.success ? bool_text(*row.success) : "") << ',' << csv_quote(row.status);
  return out.str();
}

std::vector<BenchRow> parse_bench_csv(std::string_view text) {
  std::vector<BenchRow> rows;
  std::size_t pos = 0;
  std::size_t line_no = 0;
  bool header_seen = false;
  while (pos < text.size()) {
    auto nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    const std::string_view line = text.substr(pos, nl - pos);
    pos = nl + 1;
    ++line_no;
    if (trim(line).empty()) continue;
    if (!header_seen) {
      if (trim(line) != bench_csv_header()) throw ParseError("unexpected CSV header", line_no);
      header_seen = true;
      continue;
    }
    const auto f = csv_fields(line, line_no);
    if (f.size() != 15) throw ParseError("expected 15 columns, got " + std::to_string(f.size()), line_no);
    BenchRow row;
    row.cell = parse_u64(f[0], line_no);
    row.trial = parse_u64(f[1], line_no);
    row.instance = f[2];
    try {
      row.variant = parse_variant(f[3]);
    } catch (const InvalidConfig& e) {
      throw ParseError(e.what(), line_no);
    }
    row.gamma = parse_double(f[4], line_no);
    row.epsilon = parse_double(f[5], line_no);
    row.delta = parse_double(f[6], line_no);
    row.seed = parse_u64(f[7], line_no);
    row.queries = parse_u64(f[8], line_no);
    row.transition_products = parse_u64(f[9], line_no);
    row.wall_time = parse_double(f[10], line_no);
    if (!f[11].empty()) row.gap_values = parse_double(f[11], line_no);
    if (!f[12].empty()) row.gap_policy = parse_double(f[12], line_no);
    if (!f[13].empty()) row.success = parse_bool(f[13], line_no);
    row.status = f[14];
    rows.push_back(std::move(row));
  }
  if (!header_seen) throw ParseError("missing CSV header", line_no);
  return rows;
}

std::string summary_line(const SolveReport& r) {
  std::ostringstream out;
  const auto [lo, hi] = std::minmax_element(r.values.begin(), r.values.end());
  out << to_string(r.variant) << ": phases=" << r.phases.size()
      << " queries=" << r.total_queries << " products=" << r.transition_products
      << " wall_time=" << format_double(round_to_ms(r.wall_time)) << "s";
  if (!r.values.empty()) {
    out << " v_min=" << format_double(*lo) << " v_max=" << format_double(*hi);
  }
  if (r.audit) {
    out << " gap_values=" << format_double(r.audit->gap_values)
        << " gap_policy=" << format_double(r.audit->gap_policy)
        << " success=" << bool_text(r.audit->success)
        << " invariant_violations=" << r.audit->invariant_violations
        << " halving_violations=" << r.audit->halving_violations;
  }
  if (!r.note.empty()) out << " note=\"" << r.note << "\"";
  return out.str();
}

}  // namespace tvrvi
