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


#include "aging/closedform.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <numbers>
#include <stdexcept>

#include "aging/statcore.hpp"

namespace aging::closedform {

namespace {

void require_ratio(double a) {
  if (!(a >= 1.0) || !std::isfinite(a)) {
    throw std::domain_error("aging function needs a >= 1");
  }
}

// a^p - (a-1)^p for a >= 1 without cancellation.
double power_gap(double a, double p) {
  return std::pow(a, p) * -std::expm1(p * std::log1p(-1.0 / a));
}

double series_bessel_i(int k, double t) {
  const double half = 0.5 * t;
  double term = std::exp(k * std::log(half) - std::lgamma(k + 1.0));
  if (t == 0.0) return k == 0 ? 1.0 : 0.0;
  double sum = term;
  const double q = half * half;
  for (int m = 1; m < 500; ++m) {
    term *= q / (static_cast<double>(m) * static_cast<double>(m + k));
    sum += term;
    if (term < sum * 1e-17) break;
  }
  return sum;
}

}  // namespace

double rho_kpz(double a) {
  require_ratio(a);
  return (1.0 + power_gap(a, 2.0 / 3.0)) / (2.0 * std::cbrt(a));
}

double rho_ew(double a) {
  require_ratio(a);
  return (1.0 + power_gap(a, 0.5)) / (2.0 * std::pow(a, 0.25));
}

double kpz_fp_correlation(double s, double t) {
  if (!(s > 0.0)) throw std::domain_error("kpz_fp_correlation: s must be > 0");
  if (!(t >= s)) throw std::domain_error("kpz_fp_correlation: needs t >= s");
  return rho_kpz(t / s);
}

double gauss_pdf(double t, double x) {
  if (!(t > 0.0)) throw std::domain_error("gauss_pdf: t must be > 0");
  return std::exp(-x * x / (2.0 * t)) / std::sqrt(2.0 * std::numbers::pi * t);
}

double gauss_cdf(double x) {
  return 0.5 * std::erfc(-x / std::numbers::sqrt2);
}

double ew_variance(double t, double x) {
  if (!(t >= 0.0)) throw std::domain_error("ew_variance: t must be >= 0");
  const double ax = std::abs(x);
  if (t == 0.0) return ax;
  // sqrt(t) r(1, y) with r(1, y) = y (2 Phi(y) - 1) + 2 p(1, y), written as
  // |x| plus a small positive excess.
  const double rt = std::sqrt(t);
  const double y = ax / rt;
  const double excess =
      2.0 * gauss_pdf(1.0, y) - y * std::erfc(y / std::numbers::sqrt2);
  return ax + rt * excess;
}

double ew_correlation(double a, double b, double x, double y) {
  if (!(a > 0.0)) throw std::domain_error("ew_correlation: a must be > 0");
  if (!(b >= a)) throw std::domain_error("ew_correlation: needs b >= a");
  const double r = stat::corr_cvtv(ew_variance(a, x), ew_variance(b, y),
                                   ew_variance(b - a, y - x));
  return std::clamp(r, -1.0, 1.0);
}

std::vector<double> scaled_bessel_i(int kmax, double t) {
  if (kmax < 0) throw std::domain_error("scaled_bessel_i: kmax must be >= 0");
  if (!(t >= 0.0)) throw std::domain_error("scaled_bessel_i: t must be >= 0");
  std::vector<double> out(static_cast<std::size_t>(kmax) + 1, 0.0);
  if (t == 0.0) {
    out[0] = 1.0;
    return out;
  }
  if (t <= 20.0) {
    const double scale = std::exp(-t);
    for (int k = 0; k <= kmax; ++k) out[k] = series_bessel_i(k, t) * scale;
    return out;
  }
  // Miller backward recurrence normalised by I_0 + 2 sum_k I_k = e^t.
  const int start =
      kmax + 40 + static_cast<int>(std::ceil(t + 12.0 * std::sqrt(t)));
  std::vector<double> v(static_cast<std::size_t>(start) + 2, 0.0);
  v[start + 1] = 0.0;
  v[start] = 1e-300;
  for (int k = start; k >= 1; --k) {
    v[k - 1] = (2.0 * k / t) * v[k] + v[k + 1];
    if (v[k - 1] > 1e250) {
      for (int j = k - 1; j <= start; ++j) v[j] *= 1e-250;
    }
  }
  double norm = v[0];
  for (int k = 1; k <= start; ++k) norm += 2.0 * v[k];
  for (int k = 0; k <= kmax; ++k) out[k] = v[k] / norm;
  return out;
}

double bessel_i(int k, double t) {
  if (!(t >= 0.0)) throw std::domain_error("bessel_i: t must be >= 0");
  k = std::abs(k);
  if (t <= 20.0) return series_bessel_i(k, t);
  const auto scaled = scaled_bessel_i(k, t);
  return scaled[k] * std::exp(t);
}

double rw_abs_expectation(double t, int k) {
  if (!(t >= 0.0)) throw std::domain_error("rw_abs_expectation: t must be >= 0");
  if (t == 0.0) return std::abs(k);
  const int reach = static_cast<int>(std::ceil(t + 12.0 * std::sqrt(t) + 20.0));
  const auto p = scaled_bessel_i(reach, t);
  double sum = 0.0;
  for (int m = -reach; m <= reach; ++m) {
    sum += std::abs(k + m) * p[std::abs(m)];
  }
  return sum;
}

}  // namespace aging::closedform
