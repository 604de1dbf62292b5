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

// Branch-free log/exp/sincos kernels. Loops calling these vectorize;
// loops calling libm do not. Accuracy is a few ulp on the stated domains.

#include <bit>
#include <cstdint>

namespace aging::simd {

inline constexpr double kLn2Hi = 6.93147180369123816490e-01;
inline constexpr double kLn2Lo = 1.90821492927058770002e-10;
inline constexpr double kLog2e = 1.44269504088896338700e+00;
inline constexpr double kPi = 3.14159265358979323846;

/// Natural log for finite, positive, normal x.
[[gnu::always_inline]] inline double log(double x) noexcept {
  const auto bits = std::bit_cast<std::uint64_t>(x);
  // Split x = m * 2^e with m in [sqrt(1/2), sqrt(2)).
  const std::uint64_t shifted = bits - 0x3FE6A09E667F3BCDull;
  const auto e = static_cast<std::int64_t>(shifted) >> 52;
  const double m =
      std::bit_cast<double>(bits - (static_cast<std::uint64_t>(e) << 52));
  // log(m) = 2 atanh(s), |s| <= 0.1716.
  const double s = (m - 1.0) / (m + 1.0);
  const double s2 = s * s;
  double p = 1.0 / 19.0;
  p = p * s2 + 1.0 / 17.0;
  p = p * s2 + 1.0 / 15.0;
  p = p * s2 + 1.0 / 13.0;
  p = p * s2 + 1.0 / 11.0;
  p = p * s2 + 1.0 / 9.0;
  p = p * s2 + 1.0 / 7.0;
  p = p * s2 + 1.0 / 5.0;
  p = p * s2 + 1.0 / 3.0;
  p = p * s2 + 1.0;
  const auto ed = static_cast<double>(e);
  return (2.0 * s * p + ed * kLn2Lo) + ed * kLn2Hi;
}

/// e^x for |x| <= 708.
[[gnu::always_inline]] inline double exp(double x) noexcept {
  constexpr double kShifter = 0x1.8p52;
  const double t = x * kLog2e + kShifter;
  const double n = t - kShifter;
  const double r = (x - n * kLn2Hi) - n * kLn2Lo;  // |r| <= 0.347
  double p = 1.0 / 6227020800.0;                    // 1/13!
  p = p * r + 1.0 / 479001600.0;
  p = p * r + 1.0 / 39916800.0;
  p = p * r + 1.0 / 3628800.0;
  p = p * r + 1.0 / 362880.0;
  p = p * r + 1.0 / 40320.0;
  p = p * r + 1.0 / 5040.0;
  p = p * r + 1.0 / 720.0;
  p = p * r + 1.0 / 120.0;
  p = p * r + 1.0 / 24.0;
  p = p * r + 1.0 / 6.0;
  p = p * r + 0.5;
  p = p * r + 1.0;
  p = p * r + 1.0;
  const auto ni = static_cast<std::int64_t>(n);
  const double scale =
      std::bit_cast<double>(static_cast<std::uint64_t>(ni + 1023) << 52);
  return p * scale;
}

/// sin and cos of 2*pi*u for u in [0, 1).
[[gnu::always_inline]] inline void sincos_2pi(double u, double& s,
                                              double& c) noexcept {
  const double v = 4.0 * u;
  const auto q = static_cast<std::int64_t>(v);  // quadrant 0..3
  const double f = v - static_cast<double>(q);  // [0, 1)
  const double x = (f - 0.5) * (0.5 * kPi);     // [-pi/4, pi/4)
  const double x2 = x * x;

  double sp = -1.0 / 1307674368000.0;  // -1/15!
  sp = sp * x2 + 1.0 / 6227020800.0;
  sp = sp * x2 - 1.0 / 39916800.0;
  sp = sp * x2 + 1.0 / 362880.0;
  sp = sp * x2 - 1.0 / 5040.0;
  sp = sp * x2 + 1.0 / 120.0;
  sp = sp * x2 - 1.0 / 6.0;
  const double sx = x + x * x2 * sp;

  double cp = 1.0 / 20922789888000.0;  // 1/16!
  cp = cp * x2 - 1.0 / 87178291200.0;
  cp = cp * x2 + 1.0 / 479001600.0;
  cp = cp * x2 - 1.0 / 3628800.0;
  cp = cp * x2 + 1.0 / 40320.0;
  cp = cp * x2 - 1.0 / 720.0;
  cp = cp * x2 + 1.0 / 24.0;
  cp = cp * x2 - 0.5;
  const double cx = 1.0 + x2 * cp;

  // Angle within the quadrant is x + pi/4.
  constexpr double kHalfSqrt2 = 0.70710678118654752440;
  const double sq = (sx + cx) * kHalfSqrt2;
  const double cq = (cx - sx) * kHalfSqrt2;

  const auto uq = static_cast<std::uint64_t>(q);
  const std::uint64_t odd = 0 - (uq & 1);
  const auto sqb = std::bit_cast<std::uint64_t>(sq);
  const auto cqb = std::bit_cast<std::uint64_t>(cq);
  const std::uint64_t s0 = (sqb & ~odd) | (cqb & odd);
  const std::uint64_t c0 = (cqb & ~odd) | (sqb & odd);
  s = std::bit_cast<double>(s0 ^ ((uq & 2) << 62));
  c = std::bit_cast<double>(c0 ^ (((uq + 1) & 2) << 62));
}

}  // namespace aging::simd
