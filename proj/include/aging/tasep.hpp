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
#include <vector>

#include "aging/rng.hpp"
#include "aging/statcore.hpp"

namespace aging::tasep {

/// Continuous-time TASEP on a ring of L sites, rate-1 right jumps.
/// Flux is counted on a fixed set of tracked bonds (j, j+1).
class Ring {
 public:
  Ring(std::vector<std::uint8_t> occupancy, std::vector<std::int64_t> bonds,
       rng::Stream stream);

  /// Bernoulli(1/2) product initial data.
  static Ring stationary(std::size_t L, rng::Stream stream,
                         std::vector<std::int64_t> bonds = {0});

  void evolve_until(double t_end);

  std::size_t size() const noexcept { return occ_.size(); }
  double time() const noexcept { return time_; }
  std::uint64_t events() const noexcept { return events_; }
  std::size_t mobile_count() const noexcept { return mobile_.size(); }
  std::size_t particle_count() const noexcept;

  bool occupied(std::int64_t site) const noexcept { return occ_[wrap(site)]; }
  std::span<const std::uint8_t> occupancy() const noexcept { return occ_; }
  /// Jumps across bond (j, j+1) so far; j must be tracked.
  std::int64_t flux(std::int64_t bond) const;

  /// Height relative to bond (0, 1); needs bond 0 tracked and |j| <= L/4.
  std::int64_t height(std::int64_t j) const;

 private:
  std::size_t wrap(std::int64_t site) const noexcept;
  void set_mobile(std::size_t site, bool on) noexcept;

  std::vector<std::uint8_t> occ_;
  std::vector<std::uint32_t> mobile_;
  std::vector<std::int32_t> slot_;      // index into mobile_, or -1
  std::vector<std::int32_t> tracked_;   // flux slot per site, or -1
  std::vector<std::int64_t> bonds_;
  std::vector<std::int64_t> flux_;
  rng::Stream stream_;
  double time_ = 0.0;
  std::uint64_t events_ = 0;
};

struct TwoTimeSamples {
  std::vector<double> first;   // h(s, j)
  std::vector<double> second;  // h(as, k)
  std::vector<double> diff;    // h((a-1)s, k-j), same replica
};

struct TwoTimeResult {
  stat::CorrelationEstimate direct;
  stat::CorrelationEstimate cvtv;
  stat::VarianceEstimate var_first;
  stat::VarianceEstimate var_second;
  stat::VarianceEstimate var_diff;
};

struct TwoTimeConfig {
  std::size_t L = 2048;
  double s = 50.0;
  double a = 2.0;
  std::int64_t j = 0;
  std::int64_t k = 0;
  std::size_t replicas = 1000;
};

void validate(const TwoTimeConfig& cfg);

TwoTimeSamples two_time_height_samples(const TwoTimeConfig& cfg, rng::Key key,
                                       unsigned workers);

TwoTimeResult summarize(const TwoTimeSamples& samples, std::uint64_t seed);

/// Corr(h(s, j), h(as, k)) over independent stationary replicas.
TwoTimeResult two_time_height_corr(const TwoTimeConfig& cfg, rng::Key key,
                                   unsigned workers);

/// Jumps across bond (0, 1) by time t_end for the TASEP that corresponds to
/// the boundary LPP: particles on sites <= -1, a hole at 0 that particles
/// enter at rate 1/2, a particle at 1 that always jumps at rate 1/2, holes
/// on sites >= 2. Only sites in [-n, n+1] are simulated, which is exact for
/// the event {flux >= n}. The count is capped at n.
std::int64_t boundary_step_flux(int n, double t_end, rng::Stream& stream);

}  // namespace aging::tasep
