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


#include "aging/rng.hpp"

#include <cmath>
#include <stdexcept>

namespace aging::rng {

__extension__ typedef unsigned __int128 u128;

std::uint64_t splitmix64(std::uint64_t& state) noexcept {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ull);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

Key derive_key(std::uint64_t master_seed,
               std::string_view experiment) noexcept {
  std::uint64_t h = 0xCBF29CE484222325ull;  // FNV-1a
  for (const char ch : experiment) {
    h ^= static_cast<unsigned char>(ch);
    h *= 0x100000001B3ull;
  }
  std::uint64_t state = master_seed ^ (h * 0x9E3779B97F4A7C15ull);
  Key k;
  k.k0 = splitmix64(state);
  k.k1 = splitmix64(state) ^ h;
  return k;
}

Stream::Stream(Key key, std::uint64_t replica, std::uint64_t lane) noexcept
    : key_(key), c1_(stream_id(replica, lane)) {}

void Stream::refill() noexcept {
  for (unsigned i = 0; i < kChunkBlocks; ++i) {
    threefry2x64(c0_ + i, c1_, key_, buf_[2 * i], buf_[2 * i + 1]);
  }
  c0_ += kChunkBlocks;
  pos_ = 0;
}

void Stream::drop_buffered() noexcept {
  pos_ = static_cast<unsigned>(buf_.size());
  has_spare_normal_ = false;
}

double Stream::normal() noexcept {
  if (has_spare_normal_) {
    has_spare_normal_ = false;
    return spare_normal_;
  }
  const double u1 = uniform_open();
  const double u2 = uniform_open();
  const double r = std::sqrt(-2.0 * std::log(u1));
  double s, c;
  simd::sincos_2pi(u2, s, c);
  spare_normal_ = r * s;
  has_spare_normal_ = true;
  return r * c;
}

std::uint64_t Stream::below(std::uint64_t n) noexcept {
  // Lemire's multiply-shift with rejection of the biased low range.
  u128 m = static_cast<u128>(next_u64()) * n;
  auto low = static_cast<std::uint64_t>(m);
  if (low < n) {
    const std::uint64_t threshold = (0 - n) % n;
    while (low < threshold) {
      m = static_cast<u128>(next_u64()) * n;
      low = static_cast<std::uint64_t>(m);
    }
  }
  return static_cast<std::uint64_t>(m >> 64);
}

double Stream::gamma(double shape) {
  if (!(shape > 0.0) || !std::isfinite(shape)) {
    throw std::invalid_argument("gamma: shape must be positive and finite");
  }
  if (shape < 1.0) {
    const double g = gamma(shape + 1.0);
    return g * std::pow(uniform_open(), 1.0 / shape);
  }
  // Marsaglia-Tsang.
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x, v;
    do {
      x = normal();
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = uniform_open();
    const double x2 = x * x;
    if (u < 1.0 - 0.0331 * x2 * x2) return d * v;
    if (std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v))) return d * v;
  }
}

namespace {

template <class F>
inline void fill_pairs(Key key, std::uint64_t c1, std::uint64_t& c0,
                       std::span<double> out, F&& transform) noexcept {
  const std::size_t n = out.size();
  const std::size_t pairs = n / 2;
  double* p = out.data();
  const std::uint64_t base = c0;
  for (std::size_t i = 0; i < pairs; ++i) {
    std::uint64_t a, b;
    threefry2x64(base + i, c1, key, a, b);
    transform(a, b, p[2 * i], p[2 * i + 1]);
  }
  if (n % 2 != 0) {
    std::uint64_t a, b;
    threefry2x64(base + pairs, c1, key, a, b);
    double tail;
    transform(a, b, p[n - 1], tail);
  }
  c0 = base + (n + 1) / 2;
}

}  // namespace

void Stream::fill_uniform_open(std::span<double> out) noexcept {
  drop_buffered();
  fill_pairs(key_, c1_, c0_, out,
             [](std::uint64_t a, std::uint64_t b, double& x, double& y) {
               x = to_open01(a);
               y = to_open01(b);
             });
}

void Stream::fill_exponential(std::span<double> out) noexcept {
  drop_buffered();
  fill_pairs(key_, c1_, c0_, out,
             [](std::uint64_t a, std::uint64_t b, double& x, double& y) {
               x = -simd::log(to_open01(a));
               y = -simd::log(to_open01(b));
             });
}

void Stream::fill_normal(std::span<double> out) noexcept {
  drop_buffered();
  fill_pairs(key_, c1_, c0_, out,
             [](std::uint64_t a, std::uint64_t b, double& x, double& y) {
               const double r = std::sqrt(-2.0 * simd::log(to_open01(a)));
               double s, c;
               simd::sincos_2pi(to_open01(b), s, c);
               x = r * c;
               y = r * s;
             });
}

}  // namespace aging::rng
