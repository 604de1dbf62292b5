// Copyright 2026 The aginglab Authors.
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

#include <array>
#include <cstdint>
#include <span>
#include <string_view>

#include "aging/simd_math.hpp"

namespace aging::rng {

struct Key {
  std::uint64_t k0 = 0;
  std::uint64_t k1 = 0;
  friend bool operator==(const Key&, const Key&) = default;
};

namespace detail {

template <int R>
[[gnu::always_inline]] inline void mix(std::uint64_t& x0,
                                       std::uint64_t& x1) noexcept {
  x0 += x1;
  x1 = (x1 << R) | (x1 >> (64 - R));
  x1 ^= x0;
}

template <int R0, int R1, int R2, int R3>
[[gnu::always_inline]] inline void four(std::uint64_t& x0,
                                        std::uint64_t& x1) noexcept {
  mix<R0>(x0, x1);
  mix<R1>(x0, x1);
  mix<R2>(x0, x1);
  mix<R3>(x0, x1);
}

}  // namespace detail

/// Threefry-2x64 with 20 rounds (Random123 parameters).
[[gnu::always_inline]] inline void threefry2x64(std::uint64_t c0,
                                                std::uint64_t c1, Key key,
                                                std::uint64_t& out0,
                                                std::uint64_t& out1) noexcept {
  const std::uint64_t ks0 = key.k0;
  const std::uint64_t ks1 = key.k1;
  const std::uint64_t ks2 = 0x1BD11BDAA9FC1A22ull ^ ks0 ^ ks1;
  std::uint64_t x0 = c0 + ks0;
  std::uint64_t x1 = c1 + ks1;
  detail::four<16, 42, 12, 31>(x0, x1);
  x0 += ks1;
  x1 += ks2 + 1;
  detail::four<16, 32, 24, 21>(x0, x1);
  x0 += ks2;
  x1 += ks0 + 2;
  detail::four<16, 42, 12, 31>(x0, x1);
  x0 += ks0;
  x1 += ks1 + 3;
  detail::four<16, 32, 24, 21>(x0, x1);
  x0 += ks1;
  x1 += ks2 + 4;
  detail::four<16, 42, 12, 31>(x0, x1);
  x0 += ks2;
  x1 += ks0 + 5;
  out0 = x0;
  out1 = x1;
}

inline std::array<std::uint64_t, 2> threefry2x64(
    std::array<std::uint64_t, 2> ctr, Key key) noexcept {
  std::array<std::uint64_t, 2> out{};
  threefry2x64(ctr[0], ctr[1], key, out[0], out[1]);
  return out;
}

/// Uniform on the open interval (0, 1) from 52 random bits.
[[gnu::always_inline]] inline double to_open01(std::uint64_t x) noexcept {
  return (static_cast<double>(x >> 12) + 0.5) * 0x1.0p-52;
}

std::uint64_t splitmix64(std::uint64_t& state) noexcept;

/// Key for one experiment under a master seed.
Key derive_key(std::uint64_t master_seed, std::string_view experiment) noexcept;

/// Lanes separate independent uses of randomness within one replica.
inline constexpr unsigned kLaneBits = 8;

/// Counter word shared by all draws of one (replica, lane).
inline std::uint64_t stream_id(std::uint64_t replica,
                               std::uint64_t lane) noexcept {
  return (replica << kLaneBits) | lane;
}

/// Sequential view of the counter space (replica, lane, 0..).
/// Scalar draws are served from chunks of kChunkBlocks blocks.
class Stream {
 public:
  static constexpr unsigned kChunkBlocks = 8;

  Stream(Key key, std::uint64_t replica, std::uint64_t lane = 0) noexcept;

  std::uint64_t next_u64() noexcept {
    if (pos_ == buf_.size()) refill();
    return buf_[pos_++];
  }
  double uniform_open() noexcept { return to_open01(next_u64()); }
  double exponential() noexcept { return -simd::log(uniform_open()); }
  double normal() noexcept;
  /// Uniform integer in [0, n), n > 0.
  std::uint64_t below(std::uint64_t n) noexcept;
  double gamma(double shape);

  // Bulk fills drop any buffered scalar draws, start at the next unused
  // block and advance the counter by ceil(size / 2) blocks.
  void fill_uniform_open(std::span<double> out) noexcept;
  void fill_exponential(std::span<double> out) noexcept;
  void fill_normal(std::span<double> out) noexcept;

  std::uint64_t counter() const noexcept { return c0_; }
  Key key() const noexcept { return key_; }
  std::uint64_t id() const noexcept { return c1_; }

 private:
  void refill() noexcept;
  void drop_buffered() noexcept;

  Key key_;
  std::uint64_t c1_;
  std::uint64_t c0_ = 0;
  std::array<std::uint64_t, 2 * kChunkBlocks> buf_{};
  unsigned pos_ = 2 * kChunkBlocks;
  double spare_normal_ = 0.0;
  bool has_spare_normal_ = false;
};

}  // namespace aging::rng
