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

namespace aging::lpp {

/// Weight of cell (i, j): Exp(1) in the bulk, Exp(1/2) on the axes,
/// zero at the origin. Each cell has a fixed place in the counter space of
/// (key, replica), so any sweep order sees the same environment.
double weight(rng::Key key, std::uint64_t replica, std::int64_t i,
              std::int64_t j) noexcept;

/// Last-passage time to the far corner of a fixed weight array,
/// indexed w[i][j].
double last_passage(const std::vector<std::vector<double>>& w);

/// L(m, m) for every m in `sizes`, from one anti-diagonal sweep.
std::vector<double> diagonal_sweep(rng::Key key, std::uint64_t replica,
                                   std::span<const std::int64_t> sizes);

/// Row increments L(n1, j) - L(n1, j-1), j = 1..count.
std::vector<double> row_increments(rng::Key key, std::uint64_t replica,
                                   std::int64_t n1, std::int64_t count);

stat::EmpiricalDistribution burke_increments(std::int64_t n1,
                                             std::int64_t count,
                                             rng::Key key,
                                             std::uint64_t replica = 0);

struct LppConfig {
  std::int64_t n = 100;
  double a = 2.0;
  std::size_t replicas = 1000;
};

struct ReplicaResult {
  double small = 0.0;  // L(n, n)
  double big = 0.0;    // L(floor(an), floor(an))
};

std::int64_t scaled_size(std::int64_t n, double a);

void validate(const LppConfig& cfg);

ReplicaResult lpp_diagonal_pair(const LppConfig& cfg, rng::Key key,
                                std::uint64_t replica);

/// Corr(L(n, n), L(floor(an), floor(an))) across replicas.
stat::CorrelationEstimate lpp_aging_corr(const LppConfig& cfg, rng::Key key,
                                         unsigned workers);

struct IdentityRow {
  double t = 0.0;
  double p_lpp = 0.0;      // P[L(n, n) <= t]
  double se_lpp = 0.0;
  double p_tasep = 0.0;    // P[N_t(0) >= n], boundary step data
  double se_tasep = 0.0;
  double p_ring = 0.0;     // P[N_t(0) >= n], Bernoulli(1/2) ring
  double se_ring = 0.0;
  std::size_t ring_replicas = 0;
};

/// Both sides of P[L(n, n) <= t] = P[N_t(0) >= n]. The ring column is
/// informational and skipped when ring_replicas == 0.
std::vector<IdentityRow> lpp_tasep_identity_check(
    int n, std::span<const double> t_grid, std::size_t replicas,
    std::size_t ring_replicas, rng::Key key, unsigned workers);

}  // namespace aging::lpp
