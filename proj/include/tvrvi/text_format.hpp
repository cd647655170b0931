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
#include <string>
#include <string_view>
#include <vector>

namespace tvrvi {

/// Shortest decimal that parses back to exactly x.
std::string format_double(double x);

/// Whole-token parses; throw ParseError carrying line.
double parse_double(std::string_view token, std::size_t line);
std::uint64_t parse_u64(std::string_view token, std::size_t line);
bool parse_bool(std::string_view token, std::size_t line);

/// Splits on spaces and tabs.
std::vector<std::string_view> split_tokens(std::string_view line);

/// Splits on a single separator character, trimming blanks around fields.
std::vector<std::string_view> split_fields(std::string_view line, char sep);

std::string_view trim(std::string_view s) noexcept;

/// One "key = value" line.
struct KeyValue {
  std::string key;
  std::string value;
  std::size_t line = 0;  // 1-based
};

/// Parses "key = value" lines; blank lines and lines starting with '#' are
/// skipped. Throws ParseError on a line without '='.
std::vector<KeyValue> parse_key_values(std::string_view text);

std::string read_file(const std::string& path);
/// Writes via a temporary file in the same directory and renames it over path.
void write_file(const std::string& path, std::string_view contents);

}  // namespace tvrvi
