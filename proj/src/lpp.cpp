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


#include "aging/lpp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "aging/parallel.hpp"
#include "aging/simd_math.hpp"
#include "aging/tasep.hpp"

namespace aging::lpp {

namespace {

constexpr std::uint64_t kWeightLane = 0;
constexpr std::uint64_t kTasepLane = 1;
constexpr std::uint64_t kRingLane = 2;
constexpr double kNegInf = -std::numeric_limits<double>::infinity();

std::uint64_t cell_block(std::int64_t i, std::int64_t j) noexcept {
  return (static_cast<std::uint64_t>(i + j) << 32) |
         (static_cast<std::uint64_t>(i) >> 1);
}

// Bulk Exp(1) weights for cells (i, d - i), i in [lo, hi], into w[i - lo].
void diagonal_weights(rng::Key key, std::uint64_t c1, std::int64_t d,
                      std::int64_t lo, std::int64_t hi, double* w) noexcept {
  const std::int64_t p0 = lo >> 1;
  const std::int64_t p1 = hi >> 1;
  const std::uint64_t base = static_cast<std::uint64_t>(d) << 32;
  // Pairs (2p, 2p+1) share a block; pair buffer starts at cell 2*p0.
  double* out = w - (lo - 2 * p0);
  for (std::int64_t p = p0; p <= p1; ++p) {
    std::uint64_t a, b;
    rng::threefry2x64(base | static_cast<std::uint64_t>(p), c1, key, a, b);
    out[2 * (p - p0)] = -simd::log(rng::to_open01(a));
    out[2 * (p - p0) + 1] = -simd::log(rng::to_open01(b));
  }
}

}  // namespace

double weight(rng::Key key, std::uint64_t replica, std::int64_t i,
              std::int64_t j) noexcept {
  if (i == 0 && j == 0) return 0.0;
  std::uint64_t out[2];
  rng::threefry2x64(cell_block(i, j), rng::stream_id(replica, kWeightLane),
                    key, out[0], out[1]);
  const double e = -simd::log(rng::to_open01(out[i & 1]));
  return (i == 0 || j == 0) ? 2.0 * e : e;
}

double last_passage(const std::vector<std::vector<double>>& w) {
  if (w.empty() || w[0].empty()) {
    throw std::invalid_argument("last_passage: empty weight array");
  }
  const std::size_t cols = w[0].size();
  std::vector<double> g(cols, kNegInf);
  for (const auto& row : w) {
    if (row.size() != cols) {
      throw std::invalid_argument("last_passage: ragged weight array");
    }
    double left = kNegInf;
    for (std::size_t j = 0; j < cols; ++j) {
      double best = std::max(left, g[j]);
      if (best == kNegInf) best = 0.0;
      g[j] = row[j] + best;
      left = g[j];
    }
  }
  return g[cols - 1];
}

std::vector<double> diagonal_sweep(rng::Key key, std::uint64_t replica,
                                   std::span<const std::int64_t> sizes) {
  if (sizes.empty()) return {};
  for (auto m : sizes) {
    if (m < 0) throw std::invalid_argument("diagonal_sweep: negative size");
  }
  const std::int64_t M = *std::max_element(sizes.begin(), sizes.end());
  const std::uint64_t c1 = rng::stream_id(replica, kWeightLane);
  // Index i + 1 holds cell i; index 0 is a -inf sentinel.
  std::vector<double> prev(M + 3, kNegInf), cur(M + 3, kNegInf);
  std::vector<double> wbuf(M + 4);
  double* w = wbuf.data() + 1;  // an odd lo writes one slot before w[0]
  std::vector<double> result(sizes.size(), 0.0);
  prev[1] = 0.0;  // L(0, 0)
  for (std::int64_t d = 1; d <= 2 * M; ++d) {
    const std::int64_t lo = std::max<std::int64_t>(0, d - M);
    const std::int64_t hi = std::min(d, M);
    diagonal_weights(key, c1, d, lo, hi, w);
    if (lo == 0) w[0] *= 2.0;        // cell (0, d)
    if (hi == d) w[hi - lo] *= 2.0;  // cell (d, 0)
    const double* pv = prev.data() + 1;
    double* cv = cur.data() + 1;
    for (std::int64_t i = lo; i <= hi; ++i) {
      cv[i] = w[i - lo] + std::max(pv[i - 1], pv[i]);
    }
    if (d % 2 == 0) {
      for (std::size_t s = 0; s < sizes.size(); ++s) {
        if (2 * sizes[s] == d) result[s] = cv[d / 2];
      }
    }
    std::swap(prev, cur);
  }
  return result;
}

std::vector<double> row_increments(rng::Key key, std::uint64_t replica,
                                   std::int64_t n1, std::int64_t count) {
  if (n1 < 1 || count < 1) {
    throw std::invalid_argument("row_increments: n1 and count must be >= 1");
  }
  // g[j] = L(i, j) for the current column i.
  std::vector<double> g(count + 1);
  g[0] = 0.0;
  for (std::int64_t j = 1; j <= count; ++j) g[j] = g[j - 1] + weight(key, replica, 0, j);
  for (std::int64_t i = 1; i <= n1; ++i) {
    g[0] += weight(key, replica, i, 0);
    for (std::int64_t j = 1; j <= count; ++j) {
      g[j] = weight(key, replica, i, j) + std::max(g[j], g[j - 1]);
    }
  }
  std::vector<double> inc(count);
  for (std::int64_t j = 1; j <= count; ++j) inc[j - 1] = g[j] - g[j - 1];
  return inc;
}

stat::EmpiricalDistribution burke_increments(std::int64_t n1,
                                             std::int64_t count,
                                             rng::Key key,
                                             std::uint64_t replica) {
  return stat::EmpiricalDistribution(row_increments(key, replica, n1, count));
}

std::int64_t scaled_size(std::int64_t n, double a) {
  return static_cast<std::int64_t>(std::floor(a * static_cast<double>(n)));
}

void validate(const LppConfig& cfg) {
  if (cfg.n < 1) throw std::invalid_argument("lpp: n must be >= 1");
  if (!(cfg.a >= 1.0)) throw std::invalid_argument("lpp: a must be >= 1");
  if (scaled_size(cfg.n, cfg.a) > (std::int64_t{1} << 30)) {
    throw std::invalid_argument("lpp: grid too large");
  }
}

ReplicaResult lpp_diagonal_pair(const LppConfig& cfg, rng::Key key,
                                std::uint64_t replica) {
  validate(cfg);
  const std::int64_t sizes[2] = {cfg.n, scaled_size(cfg.n, cfg.a)};
  const auto v = diagonal_sweep(key, replica, sizes);
  return {v[0], v[1]};
}

stat::CorrelationEstimate lpp_aging_corr(const LppConfig& cfg, rng::Key key,
                                         unsigned workers) {
  validate(cfg);
  if (cfg.replicas < 100) {
    throw std::invalid_argument("lpp: need at least 100 replicas");
  }
  if (scaled_size(cfg.n, cfg.a) == cfg.n) return {1.0, 0.0, cfg.replicas};
  std::vector<double> x(cfg.replicas), y(cfg.replicas);
  parallel_for(cfg.replicas, workers, [&](std::size_t r) {
    const auto res = lpp_diagonal_pair(cfg, key, r);
    x[r] = res.small;
    y[r] = res.big;
  });
  return stat::corr_direct(x, y);
}

std::vector<IdentityRow> lpp_tasep_identity_check(
    int n, std::span<const double> t_grid, std::size_t replicas,
    std::size_t ring_replicas, rng::Key key, unsigned workers) {
  if (n < 1) throw std::invalid_argument("identity check: n must be >= 1");
  if (replicas < 1) throw std::invalid_argument("identity check: no replicas");
  const std::int64_t sizes[1] = {n};
  std::vector<double> passage(replicas);
  parallel_for(replicas, workers, [&](std::size_t r) {
    passage[r] = diagonal_sweep(key, r, sizes)[0];
  });

  auto binomial = [](std::size_t hits, std::size_t total) {
    const double p = static_cast<double>(hits) / static_cast<double>(total);
    return std::pair{p, std::sqrt(p * (1.0 - p) / static_cast<double>(total))};
  };

  std::vector<IdentityRow> rows;
  for (const double t : t_grid) {
    IdentityRow row;
    row.t = t;
    const auto lpp_hits = static_cast<std::size_t>(
        std::count_if(passage.begin(), passage.end(),
                      [t](double v) { return v <= t; }));
    std::tie(row.p_lpp, row.se_lpp) = binomial(lpp_hits, replicas);

    std::vector<std::uint8_t> hit(replicas);
    parallel_for(replicas, workers, [&](std::size_t r) {
      rng::Stream stream(key, r, kTasepLane);
      hit[r] = tasep::boundary_step_flux(n, t, stream) >= n;
    });
    std::tie(row.p_tasep, row.se_tasep) = binomial(
        static_cast<std::size_t>(std::count(hit.begin(), hit.end(), 1)),
        replicas);

    if (ring_replicas > 0) {
      const auto span = static_cast<std::size_t>(
          std::ceil(2.0 * t + 10.0 * std::sqrt(t) + 4.0 * n + 32.0));
      const std::size_t L = 4 * span;
      std::vector<std::uint8_t> ring_hit(ring_replicas);
      parallel_for(ring_replicas, workers, [&](std::size_t r) {
        auto ring = tasep::Ring::stationary(L, rng::Stream(key, r, kRingLane));
        ring.evolve_until(t);
        ring_hit[r] = ring.flux(0) >= n;
      });
      std::tie(row.p_ring, row.se_ring) = binomial(
          static_cast<std::size_t>(
              std::count(ring_hit.begin(), ring_hit.end(), 1)),
          ring_replicas);
      row.ring_replicas = ring_replicas;
    }
    rows.push_back(row);
  }
  return rows;
}

}  // namespace aging::lpp
