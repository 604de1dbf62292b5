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

#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "aging/rng.hpp"
#include "aging/statcore.hpp"

namespace aging::polymer {

struct Params {
  int n = 32;           // scale parameter
  double theta = 0.0;   // 0 selects sqrt(n) + 1/2
  double beta = 1.0;
  double dt = 1e-4;
  int levels = 512;     // highest level simulated
};

/// Fills in defaults and checks theta > beta^2/2 and dt <= 1e-2/theta.
Params resolve(Params p);

/// Log-partition function log z(t, j) for j = 0..levels.
struct State {
  std::vector<double> logz;
  double time = 0.0;
};

/// A replica whose drift argument left the representable range.
class BlowUp : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// logz(0) = 0 and logz(k) - logz(k-1) = -log G_k, G_k iid Gamma(theta).
State init_stationary(const Params& p, rng::Stream& stream);

/// One Euler-Maruyama step in log space with given Brownian increments
/// dB[0..levels] (already scaled by sqrt(dt)). Every level reads the
/// previous step only. `scratch` must have the size of state.logz.
void em_step(State& state, const Params& p, std::span<const double> dB,
             std::vector<double>& scratch);

/// Same step drawing the increments from `noise`.
void em_step(State& state, const Params& p, rng::Stream& noise,
             std::vector<double>& dB, std::vector<double>& scratch);

/// exp(-(logz(k) - logz(k-1))) for k = 1..levels.
std::vector<double> burke_residuals(const State& state);

/// Regularised lower incomplete gamma P(shape, x), the Gamma(shape) CDF.
double gamma_cdf(double shape, double x);

/// Residuals at time t_end for step sizes factor * p.dt, all driven by the
/// same Brownian path sampled on the p.dt grid and the same initial data.
std::vector<std::vector<double>> coupled_residuals(
    const Params& p, double t_end, std::span<const int> factors, rng::Key key,
    std::uint64_t replica);

/// Residuals at time t_end for one replica, or empty if it blew up.
std::vector<double> residuals_at(const Params& p, double t_end, rng::Key key,
                                 std::uint64_t replica);

struct TwoTimeConfig {
  Params params;
  double s = 1.0;
  double t = 2.0;
  double x = 0.0;
  double y = 0.0;
  std::size_t replicas = 1000;
};

struct Point {
  std::int64_t step = 0;
  int level = 0;
};

struct ObservationPoints {
  Point first;   // (s sqrt(n) - x, floor(sn))
  Point second;  // (t sqrt(n) - y, floor(tn))
  Point diff;    // second - first
};

ObservationPoints observation_points(const TwoTimeConfig& cfg);

struct TwoTimeSamples {
  std::vector<double> first;
  std::vector<double> second;
  std::vector<double> diff;
  std::size_t aborted = 0;
  std::size_t attempted = 0;
};

TwoTimeSamples two_time_samples(const TwoTimeConfig& cfg, rng::Key key,
                                unsigned workers);

struct TwoTimeResult {
  stat::CorrelationEstimate direct;
  stat::CorrelationEstimate cvtv;
  std::size_t aborted = 0;
  bool valid = true;  // aborted fraction below 1e-3
};

TwoTimeResult summarize(const TwoTimeSamples& samples, std::uint64_t seed);

/// Corr(log Z at first point, log Z at second point) across replicas.
TwoTimeResult polymer_two_time_corr(const TwoTimeConfig& cfg, rng::Key key,
                                    unsigned workers);

inline constexpr double kMaxAbortedFraction = 1e-3;

}  // namespace aging::polymer
