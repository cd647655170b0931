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

// Philox4x32-10 counter-based generator (Salmon et al., SC'11). A draw is a
// pure function of (key, counter), so independent streams need no shared
// state and parallel consumers reproduce serial results exactly.

#include <array>
#include <cstdint>
#include <limits>

namespace tvrvi {

using PhiloxCounter = std::array<std::uint32_t, 4>;
using PhiloxKey = std::array<std::uint32_t, 2>;

constexpr PhiloxCounter philox4x32_10(PhiloxCounter ctr, PhiloxKey key) noexcept {
  constexpr std::uint32_t kMul0 = 0xD2511F53u;
  constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
  constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
  constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;
  for (int round = 0; round < 10; ++round) {
    const std::uint64_t p0 = static_cast<std::uint64_t>(kMul0) * ctr[0];
    const std::uint64_t p1 = static_cast<std::uint64_t>(kMul1) * ctr[2];
    const auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
    const auto lo0 = static_cast<std::uint32_t>(p0);
    const auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
    const auto lo1 = static_cast<std::uint32_t>(p1);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    key[0] += kWeyl0;
    key[1] += kWeyl1;
  }
  return ctr;
}

/// SplitMix64 finalizer; used to fold (seed, stream) into a Philox key.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

/// 53-bit uniform in [0, 1).
constexpr double unit_double(std::uint64_t bits) noexcept {
  return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

__extension__ using uint128 = unsigned __int128;

/// Uniform index in [0, n) by multiply-shift.
inline std::uint64_t bounded_index(std::uint64_t bits, std::uint64_t n) noexcept {
  return static_cast<std::uint64_t>((static_cast<uint128>(bits) * n) >> 64);
}

/// One logical stream keyed by (seed, stream id, lane). Block b of the
/// stream is philox(counter = {b_lo, b_hi, lane_lo, lane_hi}, key =
/// mix64(seed ^ mix64(stream))). Satisfies UniformRandomBitGenerator with
/// 64-bit outputs, two per block.
class PhiloxStream {
 public:
  using result_type = std::uint64_t;

  PhiloxStream(std::uint64_t seed, std::uint64_t stream, std::uint64_t lane,
               std::uint64_t first_block = 0) noexcept
      : block_(first_block) {
    const std::uint64_t k = mix64(seed ^ mix64(stream));
    key_ = {static_cast<std::uint32_t>(k), static_cast<std::uint32_t>(k >> 32)};
    lane_lo_ = static_cast<std::uint32_t>(lane);
    lane_hi_ = static_cast<std::uint32_t>(lane >> 32);
  }

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

  /// Consumes one whole block and returns it as two 64-bit words.
  std::array<std::uint64_t, 2> next_block() noexcept {
    const PhiloxCounter out = philox4x32_10(
        {static_cast<std::uint32_t>(block_), static_cast<std::uint32_t>(block_ >> 32), lane_lo_,
         lane_hi_},
        key_);
    ++block_;
    return {(static_cast<std::uint64_t>(out[1]) << 32) | out[0],
            (static_cast<std::uint64_t>(out[3]) << 32) | out[2]};
  }

  result_type operator()() noexcept {
    if (!have_spare_) {
      const auto words = next_block();
      spare_ = words[1];
      have_spare_ = true;
      return words[0];
    }
    have_spare_ = false;
    return spare_;
  }

  /// Index of the first block not yet consumed.
  std::uint64_t position() const noexcept { return block_; }

 private:
  PhiloxKey key_{};
  std::uint32_t lane_lo_ = 0;
  std::uint32_t lane_hi_ = 0;
  std::uint64_t block_ = 0;
  std::uint64_t spare_ = 0;
  bool have_spare_ = false;
};

}  // namespace tvrvi
