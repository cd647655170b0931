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

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <utility>
#include <vector>

namespace tvrvi {

using StateIndex = std::uint32_t;
using ActionIndex = std::uint32_t;
using PairIndex = std::size_t;

/// Dense real vector tagged by what it is indexed by, so a per-state vector
/// cannot be passed where a per-pair vector is expected.
template <class Tag>
class RealVector {
 public:
  RealVector() = default;
  explicit RealVector(std::size_t n, double fill = 0.0) : data_(n, fill) {}
  explicit RealVector(std::vector<double> values) : data_(std::move(values)) {}
  RealVector(std::initializer_list<double> init) : data_(init) {}

  std::size_t size() const noexcept { return data_.size(); }
  bool empty() const noexcept { return data_.empty(); }

  double& operator[](std::size_t i) { return data_[i]; }
  double operator[](std::size_t i) const { return data_[i]; }

  auto begin() noexcept { return data_.begin(); }
  auto end() noexcept { return data_.end(); }
  auto begin() const noexcept { return data_.begin(); }
  auto end() const noexcept { return data_.end(); }

  std::span<double> span() noexcept { return data_; }
  std::span<const double> span() const noexcept { return data_; }
  const std::vector<double>& values() const noexcept { return data_; }

  friend bool operator==(const RealVector&, const RealVector&) = default;

 private:
  std::vector<double> data_;
};

struct StateTag {};
struct PairTag {};

/// Indexed by state.
using ValueVector = RealVector<StateTag>;
/// Indexed by state-action pair, in instance order.
using QVector = RealVector<PairTag>;

/// One action per state, stored as an index into that state's action list.
class Policy {
 public:
  Policy() = default;
  explicit Policy(std::size_t num_states, ActionIndex fill = 0) : actions_(num_states, fill) {}
  explicit Policy(std::vector<ActionIndex> actions) : actions_(std::move(actions)) {}
  Policy(std::initializer_list<ActionIndex> init) : actions_(init) {}

  std::size_t size() const noexcept { return actions_.size(); }
  ActionIndex& operator[](std::size_t s) { return actions_[s]; }
  ActionIndex operator[](std::size_t s) const { return actions_[s]; }
  auto begin() const noexcept { return actions_.begin(); }
  auto end() const noexcept { return actions_.end(); }
  std::span<ActionIndex> span() noexcept { return actions_; }
  std::span<const ActionIndex> span() const noexcept { return actions_; }
  const std::vector<ActionIndex>& actions() const noexcept { return actions_; }

  friend bool operator==(const Policy&, const Policy&) = default;

 private:
  std::vector<ActionIndex> actions_;
};

inline double max_norm(std::span<const double> v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

/// ||a - b||_inf; callers guarantee equal lengths.
inline double max_abs_diff(std::span<const double> a, std::span<const double> b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

inline bool all_finite(std::span<const double> v) {
  return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

}  // namespace tvrvi
