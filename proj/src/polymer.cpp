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


#include "aging/polymer.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>

#include <boost/math/special_functions/gamma.hpp>

#include "aging/parallel.hpp"
#include "aging/simd_math.hpp"

namespace aging::polymer {

namespace {

constexpr std::uint64_t kInitLane = 0;
constexpr std::uint64_t kNoiseLane = 1;
constexpr double kMaxExpArg = 700.0;

std::int64_t to_steps(double time, double dt) {
  return static_cast<std::int64_t>(std::llround(time / dt));
}

}  // namespace

Params resolve(Params p) {
  if (p.n < 1) throw std::invalid_argument("polymer: n must be >= 1");
  if (p.theta == 0.0) p.theta = std::sqrt(static_cast<double>(p.n)) + 0.5;
  if (!(p.beta > 0.0)) throw std::invalid_argument("polymer: beta must be > 0");
  if (!(p.theta > 0.5 * p.beta * p.beta)) {
    throw std::invalid_argument("polymer: need theta > beta^2 / 2");
  }
  if (!(p.dt > 0.0)) throw std::invalid_argument("polymer: dt must be > 0");
  if (p.dt > 1e-2 / p.theta * (1.0 + 1e-12)) {
    throw std::invalid_argument("polymer: dt exceeds 1e-2 / theta");
  }
  if (p.levels < 1) throw std::invalid_argument("polymer: levels must be >= 1");
  return p;
}

State init_stationary(const Params& p, rng::Stream& stream) {
  State s;
  s.logz.resize(static_cast<std::size_t>(p.levels) + 1);
  s.logz[0] = 0.0;
  for (std::size_t k = 1; k < s.logz.size(); ++k) {
    s.logz[k] = s.logz[k - 1] - std::log(stream.gamma(p.theta));
  }
  return s;
}

void em_step(State& state, const Params& p, std::span<const double> dB,
             std::vector<double>& scratch) {
  const std::size_t m = state.logz.size();
  if (dB.size() != m || scratch.size() != m) {
    throw std::invalid_argument("polymer: increment size mismatch");
  }
  const double* old = state.logz.data();
  double* next = scratch.data();
  const double* db = dB.data();
  const double dt = p.dt;
  const double theta = p.theta;
  const double beta = p.beta;
  next[0] = old[0] - beta * db[0];
  double worst = -kMaxExpArg;
  for (std::size_t j = 1; j < m; ++j) {
    const double arg = old[j - 1] - old[j];
    worst = std::max(worst, arg);
    next[j] = old[j] + (simd::exp(arg) - theta) * dt + beta * db[j];
  }
  if (!(worst < kMaxExpArg)) {
    throw BlowUp("polymer: exponential overflow in drift");
  }
  state.logz.swap(scratch);
  state.time += dt;
}

void em_step(State& state, const Params& p, rng::Stream& noise,
             std::vector<double>& dB, std::vector<double>& scratch) {
  dB.resize(state.logz.size());
  noise.fill_normal(dB);
  const double sd = std::sqrt(p.dt);
  for (auto& v : dB) v *= sd;
  em_step(state, p, dB, scratch);
}

std::vector<double> burke_residuals(const State& state) {
  std::vector<double> out(state.logz.size() - 1);
  for (std::size_t k = 1; k < state.logz.size(); ++k) {
    out[k - 1] = std::exp(state.logz[k - 1] - state.logz[k]);
  }
  return out;
}

double gamma_cdf(double shape, double x) {
  if (x <= 0.0) return 0.0;
  return boost::math::gamma_p(shape, x);
}

std::vector<std::vector<double>> coupled_residuals(
    const Params& fine, double t_end, std::span<const int> factors,
    rng::Key key, std::uint64_t replica) {
  const Params base = resolve(fine);
  const std::int64_t fine_steps = to_steps(t_end, base.dt);
  std::vector<Params> levels;
  for (const int f : factors) {
    if (f < 1 || fine_steps % f != 0) {
      throw std::invalid_argument("polymer: factor must divide the step count");
    }
    Params q = base;
    q.dt = base.dt * f;
    levels.push_back(q);
  }
  rng::Stream init(key, replica, kInitLane);
  rng::Stream noise(key, replica, kNoiseLane);
  const State start = init_stationary(base, init);
  const std::size_t m = start.logz.size();
  std::vector<State> states(factors.size(), start);
  std::vector<std::vector<double>> acc(factors.size(),
                                       std::vector<double>(m, 0.0));
  std::vector<double> dB(m), scratch(m);
  const double sd = std::sqrt(base.dt);
  for (std::int64_t step = 1; step <= fine_steps; ++step) {
    noise.fill_normal(dB);
    for (std::size_t l = 0; l < factors.size(); ++l) {
      auto& a = acc[l];
      for (std::size_t j = 0; j < m; ++j) a[j] += sd * dB[j];
      if (step % factors[l] == 0) {
        em_step(states[l], levels[l], a, scratch);
        std::fill(a.begin(), a.end(), 0.0);
      }
    }
  }
  std::vector<std::vector<double>> out;
  for (const auto& s : states) out.push_back(burke_residuals(s));
  return out;
}

std::vector<double> residuals_at(const Params& p, double t_end, rng::Key key,
                                 std::uint64_t replica) {
  const Params q = resolve(p);
  rng::Stream init(key, replica, kInitLane);
  rng::Stream noise(key, replica, kNoiseLane);
  State state = init_stationary(q, init);
  std::vector<double> dB, scratch(state.logz.size());
  const std::int64_t steps = to_steps(t_end, q.dt);
  try {
    for (std::int64_t i = 0; i < steps; ++i) em_step(state, q, noise, dB, scratch);
  } catch (const BlowUp&) {
    return {};
  }
  return burke_residuals(state);
}

ObservationPoints observation_points(const TwoTimeConfig& cfg) {
  const Params p = resolve(cfg.params);
  if (!(cfg.s >= 0.0) || !(cfg.t >= cfg.s)) {
    throw std::invalid_argument("polymer: need 0 <= s <= t");
  }
  const double rn = std::sqrt(static_cast<double>(p.n));
  const double nd = static_cast<double>(p.n);
  ObservationPoints pts;
  pts.first = {to_steps(cfg.s * rn - cfg.x, p.dt),
               static_cast<int>(std::floor(cfg.s * nd))};
  pts.second = {to_steps(cfg.t * rn - cfg.y, p.dt),
                static_cast<int>(std::floor(cfg.t * nd))};
  pts.diff = {pts.second.step - pts.first.step,
              pts.second.level - pts.first.level};
  for (const Point& q : {pts.first, pts.second, pts.diff}) {
    if (q.step < 0 || q.level < 0 || q.level > p.levels) {
      throw std::out_of_range("polymer: observation outside simulated window");
    }
  }
  return pts;
}

TwoTimeSamples two_time_samples(const TwoTimeConfig& cfg, rng::Key key,
                                unsigned workers) {
  const ObservationPoints pts = observation_points(cfg);
  // Levels above the highest observed one never feed back.
  Params p = resolve(cfg.params);
  p.levels = std::max({1, pts.first.level, pts.second.level, pts.diff.level});
  const std::int64_t last =
      std::max({pts.first.step, pts.second.step, pts.diff.step});
  const std::size_t R = cfg.replicas;
  std::vector<double> f(R), g(R), d(R);
  std::vector<std::uint8_t> ok(R, 1);
  parallel_for(R, workers, [&](std::size_t r) {
    rng::Stream init(key, r, kInitLane);
    rng::Stream noise(key, r, kNoiseLane);
    State state = init_stationary(p, init);
    std::vector<double> dB, scratch(state.logz.size());
    try {
      for (std::int64_t step = 0;; ++step) {
        if (step == pts.first.step) f[r] = state.logz[pts.first.level];
        if (step == pts.second.step) g[r] = state.logz[pts.second.level];
        if (step == pts.diff.step) d[r] = state.logz[pts.diff.level];
        if (step == last) break;
        em_step(state, p, noise, dB, scratch);
      }
    } catch (const BlowUp&) {
      ok[r] = 0;
    }
  });
  TwoTimeSamples out;
  out.attempted = R;
  for (std::size_t r = 0; r < R; ++r) {
    if (!ok[r]) {
      ++out.aborted;
      continue;
    }
    out.first.push_back(f[r]);
    out.second.push_back(g[r]);
    out.diff.push_back(d[r]);
  }
  return out;
}

TwoTimeResult summarize(const TwoTimeSamples& samples, std::uint64_t seed) {
  TwoTimeResult res;
  res.aborted = samples.aborted;
  res.valid = static_cast<double>(samples.aborted) <
              kMaxAbortedFraction * static_cast<double>(samples.attempted);
  res.direct = stat::corr_direct(samples.first, samples.second);
  res.cvtv = stat::corr_cvtv(samples.first, samples.second, samples.diff,
                             1000, seed);
  return res;
}

TwoTimeResult polymer_two_time_corr(const TwoTimeConfig& cfg, rng::Key key,
                                    unsigned workers) {
  const ObservationPoints pts = observation_points(cfg);
  if (pts.first.step == pts.second.step && pts.first.level == pts.second.level) {
    TwoTimeResult res;
    res.direct = {1.0, 0.0, cfg.replicas};
    res.cvtv = {1.0, 0.0, cfg.replicas};
    return res;
  }
  return summarize(two_time_samples(cfg, key, workers), key.k0);
}

}  // namespace aging::polymer
