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

#include <vector>

namespace aging::closedform {

/// KPZ-class aging function (1 + a^{2/3} - (a-1)^{2/3}) / (2 a^{1/3}).
double rho_kpz(double a);

/// EW-class aging function (1 + a^{1/2} - (a-1)^{1/2}) / (2 a^{1/4}).
double rho_ew(double a);

/// Two-time correlation of the stationary KPZ fixed point at the origin.
double kpz_fp_correlation(double s, double t);

/// Heat kernel (2 pi t)^{-1/2} exp(-x^2 / 2t).
double gauss_pdf(double t, double x);

/// Standard normal CDF.
double gauss_cdf(double x);

/// Var U(t, x) for the stationary additive-noise heat equation, i.e.
/// E_x |B_t| with B a standard Brownian motion.
double ew_variance(double t, double x);

/// Corr(U(a, x), U(b, y)) for 0 < a <= b.
double ew_correlation(double a, double b, double x, double y);

/// Modified Bessel function of the first kind I_|k|(t).
double bessel_i(int k, double t);

/// e^{-t} I_k(t) for k = 0..kmax. These are the transition probabilities
/// of a rate-1 continuous-time simple symmetric random walk.
std::vector<double> scaled_bessel_i(int kmax, double t);

/// E_k |X_t| for that walk started at k.
double rw_abs_expectation(double t, int k);

}  // namespace aging::closedform
