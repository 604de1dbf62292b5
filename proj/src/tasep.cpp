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


#include "aging/tasep.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "aging/parallel.hpp"

namespace aging::tasep {

Ring::Ring(std::vector<std::uint8_t> occupancy,
           std::vector<std::int64_t> bonds, rng::Stream stream)
    : occ_(std::move(occupancy)), bonds_(std::move(bonds)),
      stream_(stream) {
  const std::size_t L = occ_.size();
  if (L < 2) throw std::invalid_argument("tasep: ring size must be >= 2");
  if (L > (std::size_t{1} << 31)) {
    throw std::invalid_argument("tasep: ring size too large");
  }
  for (auto& o : occ_) {
    if (o > 1) throw std::invalid_argument("tasep: occupancy must be 0 or 1");
  }
  slot_.assign(L, -1);
  tracked_.assign(L, -1);
  flux_.assign(bonds_.size(), 0);
  for (std::size_t b = 0; b < bonds_.size(); ++b) {
    const std::size_t site = wrap(bonds_[b]);
    if (tracked_[site] >= 0) {
      throw std::invalid_argument("tasep: bond tracked twice");
    }
    tracked_[site] = static_cast<std::int32_t>(b);
  }
  for (std::size_t i = 0; i < L; ++i) {
    if (occ_[i] && !occ_[(i + 1) % L]) set_mobile(i, true);
  }
}

Ring Ring::stationary(std::size_t L, rng::Stream stream,
                      std::vector<std::int64_t> bonds) {
  if (L < 2) throw std::invalid_argument("tasep: ring size must be >= 2");
  std::vector<std::uint8_t> occ(L);
  std::uint64_t bits = 0;
  for (std::size_t i = 0; i < L; ++i) {
    if (i % 64 == 0) bits = stream.next_u64();
    occ[i] = static_cast<std::uint8_t>(bits & 1);
    bits >>= 1;
  }
  return Ring(std::move(occ), std::move(bonds), stream);
}

std::size_t Ring::wrap(std::int64_t site) const noexcept {
  const auto L = static_cast<std::int64_t>(occ_.size());
  std::int64_t r = site % L;
  if (r < 0) r += L;
  return static_cast<std::size_t>(r);
}

void Ring::set_mobile(std::size_t site, bool on) noexcept {
  const std::int32_t s = slot_[site];
  if (on) {
    if (s >= 0) return;
    slot_[site] = static_cast<std::int32_t>(mobile_.size());
    mobile_.push_back(static_cast<std::uint32_t>(site));
  } else {
    if (s < 0) return;
    const std::uint32_t last = mobile_.back();
    mobile_[static_cast<std::size_t>(s)] = last;
    slot_[last] = s;
    mobile_.pop_back();
    slot_[site] = -1;
  }
}

std::size_t Ring::particle_count() const noexcept {
  return static_cast<std::size_t>(
      std::count(occ_.begin(), occ_.end(), std::uint8_t{1}));
}

void Ring::evolve_until(double t_end) {
  if (!(t_end >= time_)) {
    throw std::invalid_argument("tasep: t_end is before the current time");
  }
  const std::size_t L = occ_.size();
  while (!mobile_.empty()) {
    const double dt =
        stream_.exponential() / static_cast<double>(mobile_.size());
    if (time_ + dt > t_end) break;  // memoryless: the overshoot is discarded
    time_ += dt;
    const std::size_t i = mobile_[stream_.below(mobile_.size())];
    const std::size_t r = i + 1 == L ? 0 : i + 1;
    const std::size_t rr = r + 1 == L ? 0 : r + 1;
    const std::size_t l = i == 0 ? L - 1 : i - 1;
    occ_[i] = 0;
    occ_[r] = 1;
    set_mobile(i, false);
    if (!occ_[rr]) set_mobile(r, true);
    if (occ_[l]) set_mobile(l, true);
    if (const std::int32_t b = tracked_[i]; b >= 0) ++flux_[b];
    ++events_;
  }
  time_ = t_end;
}

std::int64_t Ring::flux(std::int64_t bond) const {
  const std::int32_t b = tracked_[wrap(bond)];
  if (b < 0) throw std::invalid_argument("tasep: bond is not tracked");
  return flux_[static_cast<std::size_t>(b)];
}

std::int64_t Ring::height(std::int64_t j) const {
  const auto L = static_cast<std::int64_t>(occ_.size());
  if (std::abs(j) > L / 4) {
    throw std::out_of_range("tasep: height site outside the safe window");
  }
  std::int64_t h = 2 * flux(0);
  if (j > 0) {
    for (std::int64_t l = 1; l <= j; ++l) h += 1 - 2 * occ_[wrap(l)];
  } else {
    for (std::int64_t l = j + 1; l <= 0; ++l) h -= 1 - 2 * occ_[wrap(l)];
  }
  return h;
}

void validate(const TwoTimeConfig& cfg) {
  if (!(cfg.s > 0.0)) throw std::invalid_argument("tasep: s must be > 0");
  if (!(cfg.a >= 1.0)) throw std::invalid_argument("tasep: a must be >= 1");
  if (static_cast<double>(cfg.L) < 8.0 * cfg.a * cfg.s) {
    throw std::invalid_argument("tasep: ring too small, need L >= 8*a*s");
  }
  const auto q = static_cast<std::int64_t>(cfg.L / 4);
  if (std::abs(cfg.j) > q || std::abs(cfg.k) > q ||
      std::abs(cfg.k - cfg.j) > q) {
    throw std::invalid_argument("tasep: sites outside the safe window");
  }
  if (cfg.replicas < 100) {
    throw std::invalid_argument("tasep: need at least 100 replicas");
  }
}

TwoTimeSamples two_time_height_samples(const TwoTimeConfig& cfg, rng::Key key,
                                       unsigned workers) {
  validate(cfg);
  TwoTimeSamples out;
  out.first.resize(cfg.replicas);
  out.second.resize(cfg.replicas);
  out.diff.resize(cfg.replicas);
  const double t1 = cfg.s;
  const double t2 = cfg.a * cfg.s;
  const double td = t2 - t1;
  parallel_for(cfg.replicas, workers, [&](std::size_t r) {
    Ring ring = Ring::stationary(cfg.L, rng::Stream(key, r));
    // Visit the three observation times in increasing order.
    struct Obs {
      double t;
      std::int64_t site;
      double* dst;
    };
    std::array<Obs, 3> obs{{{td, cfg.k - cfg.j, &out.diff[r]},
                            {t1, cfg.j, &out.first[r]},
                            {t2, cfg.k, &out.second[r]}}};
    std::stable_sort(obs.begin(), obs.end(),
                     [](const Obs& x, const Obs& y) { return x.t < y.t; });
    for (const Obs& o : obs) {
      ring.evolve_until(o.t);
      *o.dst = static_cast<double>(ring.height(o.site));
    }
  });
  return out;
}

TwoTimeResult summarize(const TwoTimeSamples& samples, std::uint64_t seed) {
  TwoTimeResult res;
  res.direct = stat::corr_direct(samples.first, samples.second);
  res.var_first = stat::variance_estimate(samples.first);
  res.var_second = stat::variance_estimate(samples.second);
  res.var_diff = stat::variance_estimate(samples.diff);
  res.cvtv = stat::corr_cvtv(samples.first, samples.second, samples.diff,
                             1000, seed);
  return res;
}

TwoTimeResult two_time_height_corr(const TwoTimeConfig& cfg, rng::Key key,
                                   unsigned workers) {
  if (cfg.a == 1.0 && cfg.j == cfg.k) {
    validate(cfg);
    TwoTimeResult res;
    res.direct = {1.0, 0.0, cfg.replicas};
    res.cvtv = {1.0, 0.0, cfg.replicas};
    return res;
  }
  return summarize(two_time_height_samples(cfg, key, workers), key.k0);
}

std::int64_t boundary_step_flux(int n, double t_end, rng::Stream& stream) {
  if (n < 1) throw std::invalid_argument("boundary_step_flux: n must be >= 1");
  // Site s is stored at index s + n.
  const int M = 2 * n + 2;
  std::vector<std::uint8_t> occ(M, 0), slow_particle(M, 0), slow_hole(M, 0);
  for (int s = -n; s <= -1; ++s) occ[s + n] = 1;
  occ[1 + n] = 1;
  slow_particle[1 + n] = 1;
  slow_hole[0 + n] = 1;
  std::vector<double> rates(M - 1);
  double t = 0.0;
  std::int64_t crossings = 0;
  for (;;) {
    double total = 0.0;
    for (int i = 0; i + 1 < M; ++i) {
      double r = 0.0;
      if (occ[i] && !occ[i + 1]) {
        r = (slow_particle[i] || slow_hole[i + 1]) ? 0.5 : 1.0;
      }
      rates[i] = r;
      total += r;
    }
    if (total == 0.0) break;
    t += stream.exponential() / total;
    if (t > t_end) break;
    double u = stream.uniform_open() * total;
    int k = M - 2;
    for (int i = 0; i + 1 < M; ++i) {
      if (u < rates[i]) {
        k = i;
        break;
      }
      u -= rates[i];
    }
    if (rates[k] == 0.0) {
      // Rounding pushed u past the last positive rate.
      for (k = M - 2; rates[k] == 0.0; --k) {
      }
    }
    occ[k] = 0;
    occ[k + 1] = 1;
    slow_particle[k + 1] = slow_particle[k];
    slow_particle[k] = 0;
    slow_hole[k] = slow_hole[k + 1];
    slow_hole[k + 1] = 0;
    if (k == n) {
      if (++crossings >= n) break;
    }
  }
  return crossings;
}

}  // namespace aging::tasep
