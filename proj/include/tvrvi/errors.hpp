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
#include <optional>
#include <stdexcept>
#include <string>

namespace tvrvi {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Dimension mismatches, out-of-range indices, bad arguments.
class InvalidInput : public Error {
 public:
  using Error::Error;
};

class InvalidConfig : public Error {
 public:
  using Error::Error;
};

/// An iterative oracle did not reach its residual target.
class NumericalFailure : public Error {
 public:
  NumericalFailure(const std::string& what, double last_residual)
      : Error(what), last_residual_(last_residual) {}
  double last_residual() const noexcept { return last_residual_; }

 private:
  double last_residual_;
};

/// Malformed text input; line() is 1-based.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// A DMDP invariant is violated. Carries the offending (state, action) when
/// the violation is local to one pair.
class ValidationError : public Error {
 public:
  explicit ValidationError(const std::string& what) : Error(what) {}
  ValidationError(const std::string& what, std::size_t state, std::size_t action)
      : Error("state " + std::to_string(state) + ", action " + std::to_string(action) +
              ": " + what),
        state_(state),
        action_(action) {}

  std::optional<std::size_t> state() const noexcept { return state_; }
  std::optional<std::size_t> action() const noexcept { return action_; }

 private:
  std::optional<std::size_t> state_;
  std::optional<std::size_t> action_;
};

}  // namespace tvrvi
