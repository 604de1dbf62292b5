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


#include "aging/glew.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "aging/closedform.hpp"
#include "aging/parallel.hpp"

namespace aging::glew {

namespace {

constexpr std::uint64_t kInitLane = 0;
constexpr std::uint64_t kNoiseLane = 1;

std::int64_t to_steps(double t, double dt) {
  return static_cast<std::int64_t>(std::llround(t / dt));
}

std::int64_t floor_div(std::int64_t a, std::int64_t b) {
  std::int64_t q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

}  // namespace

Potential Potential::quadratic() { return Potential{}; }

Potential Potential::sqrt_perturbed(double kappa) {
  if (!(kappa >= 0.0) || !std::isfinite(kappa)) {
    throw std::invalid_argument("potential: kappa must be >= 0");
  }
  Potential p;
  p.kind_ = PotentialKind::sqrt_perturbed;
  p.kappa_ = kappa;
  p.c1_ = 1.0;
  p.c2_ = 1.0 + kappa;
  return p;
}

Potential Potential::custom(std::function<double(double)> v,
                            std::function<double(double)> dv, double c1,
                            double c2) {
  if (!v || !dv) throw std::invalid_argument("potential: missing function");
  if (!(c1 > 0.0) || !(c2 >= c1) || !std::isfinite(c2)) {
    throw std::invalid_argument("potential: need 0 < c1 <= c2 < inf");
  }
  Potential p;
  p.kind_ = PotentialKind::custom;
  p.c1_ = c1;
  p.c2_ = c2;
  p.v_ = std::move(v);
  p.dv_ = std::move(dv);
  return p;
}

double Potential::value(double x) const {
  switch (kind_) {
    case PotentialKind::quadratic:
      return 0.5 * x * x;
    case PotentialKind::sqrt_perturbed:
      return 0.5 * x * x + kappa_ * (std::sqrt(1.0 + x * x) - 1.0);
    case PotentialKind::custom:
      break;
  }
  return v_(x);
}

double Potential::derivative(double x) const {
  switch (kind_) {
    case PotentialKind::quadratic:
      return x;
    case PotentialKind::sqrt_perturbed:
      return x + kappa_ * x / std::sqrt(1.0 + x * x);
    case PotentialKind::custom:
      break;
  }
  return dv_(x);
}

void Potential::derivative(std::span<const double> x,
                           std::span<double> out) const {
  const std::size_t n = x.size();
  const double* in = x.data();
  double* o = out.data();
  switch (kind_) {
    case PotentialKind::quadratic:
      std::copy(in, in + n, o);
      return;
    case PotentialKind::sqrt_perturbed: {
      const double k = kappa_;
      for (std::size_t i = 0; i < n; ++i) {
        o[i] = in[i] + k * in[i] / std::sqrt(1.0 + in[i] * in[i]);
      }
      return;
    }
    case PotentialKind::custom:
      break;
  }
  for (std::size_t i = 0; i < n; ++i) o[i] = dv_(in[i]);
}

void Potential::check() const {
  constexpr double h = 1e-3;
  for (int i = 0; i <= 200; ++i) {
    const double x = -10.0 + 0.1 * i;
    const double v = value(x);
    const double scale = 1e-9 * (1.0 + std::abs(v));
    if (std::abs(v - value(-x)) > scale) {
      throw std::invalid_argument("potential: V is not symmetric");
    }
    if (std::abs(derivative(x) + derivative(-x)) >
        1e-9 * (1.0 + std::abs(derivative(x)))) {
      throw std::invalid_argument("potential: V' is not odd");
    }
    const double curv = (derivative(x + h) - derivative(x - h)) / (2.0 * h);
    if (curv < c1_ * (1.0 - 1e-6) || curv > c2_ * (1.0 + 1e-6)) {
      throw std::invalid_argument("potential: curvature outside [c1, c2]");
    }
  }
}

double State::height(std::int64_t j) const noexcept {
  const auto L = static_cast<std::int64_t>(u.size());
  const std::int64_t q = floor_div(j, L);
  return u[static_cast<std::size_t>(j - q * L)] +
         static_cast<double>(q) * slope_sum;
}

std::vector<double> State::gradients() const {
  const std::size_t L = u.size();
  std::vector<double> g(L);
  for (std::size_t j = 0; j + 1 < L; ++j) g[j] = u[j + 1] - u[j];
  g[L - 1] = u[0] + slope_sum - u[L - 1];
  return g;
}

double sample_gradient(const Potential& v, rng::Stream& stream) {
  if (v.kind() == PotentialKind::quadratic) return stream.normal();
  // exp(-V(x) + V(0)) <= exp(-c1 x^2 / 2) since V is even and V'' >= c1.
  const double sd = 1.0 / std::sqrt(v.c1());
  const double v0 = v.value(0.0);
  for (int attempt = 0; attempt < 1000000; ++attempt) {
    const double x = sd * stream.normal();
    const double log_ratio = -(v.value(x) - v0) + 0.5 * v.c1() * x * x;
    if (log_ratio > 1e-9) {
      throw std::invalid_argument("potential: Gaussian envelope violated");
    }
    if (std::log(stream.uniform_open()) < log_ratio) return x;
  }
  throw std::runtime_error("potential: rejection sampler did not terminate");
}

State sample_stationary(const Potential& v, std::size_t L,
                        rng::Stream& stream) {
  if (L < 2) throw std::invalid_argument("glew: ring size must be >= 2");
  if (v.kind() != PotentialKind::quadratic) v.check();
  State s;
  s.u.resize(L);
  std::vector<double> g(L);
  if (v.kind() == PotentialKind::quadratic) {
    stream.fill_normal(g);
  } else {
    for (auto& x : g) x = sample_gradient(v, stream);
  }
  s.u[0] = 0.0;
  for (std::size_t j = 1; j < L; ++j) s.u[j] = s.u[j - 1] + g[j - 1];
  s.slope_sum = s.u[L - 1] + g[L - 1];
  return s;
}

void drift(const State& state, const Potential& v, std::span<double> out) {
  const auto g = state.gradients();
  std::vector<double> f(g.size());
  v.derivative(g, f);
  const std::size_t L = g.size();
  out[0] = 0.5 * (f[0] - f[L - 1]);
  for (std::size_t j = 1; j < L; ++j) out[j] = 0.5 * (f[j] - f[j - 1]);
}

void check_step(const Potential& v, double dt) {
  if (!(dt > 0.0) || dt > 0.1 / v.c2() * (1.0 + 1e-12)) {
    throw std::invalid_argument("glew: dt must be in (0, 0.1 / c2]");
  }
}

namespace {

// f holds V'(gradients) on entry.
void apply_step(State& state, double dt, const double* f, const double* db) {
  const std::size_t L = state.u.size();
  double* u = state.u.data();
  const double h = 0.5 * dt;
  u[0] += h * (f[0] - f[L - 1]) + db[0];
  for (std::size_t j = 1; j < L; ++j) u[j] += h * (f[j] - f[j - 1]) + db[j];
  state.time += dt;
}

void gradients_into(const State& state, double* g) {
  const std::size_t L = state.u.size();
  const double* u = state.u.data();
  for (std::size_t j = 0; j + 1 < L; ++j) g[j] = u[j + 1] - u[j];
  g[L - 1] = u[0] + state.slope_sum - u[L - 1];
}

void step_with(State& state, const Potential& v, double dt, const double* db,
               double* g, double* f) {
  const std::size_t L = state.u.size();
  gradients_into(state, g);
  v.derivative(std::span<const double>(g, L), std::span<double>(f, L));
  if (v.kind() == PotentialKind::custom) {
    for (std::size_t j = 0; j < L; ++j) {
      if (!std::isfinite(f[j])) throw std::runtime_error("glew: non-finite drift");
    }
  }
  apply_step(state, dt, f, db);
}

}  // namespace

void em_step(State& state, const Potential& v, double dt,
             std::span<const double> dB) {
  check_step(v, dt);
  const std::size_t L = state.u.size();
  if (dB.size() != L) throw std::invalid_argument("glew: increment size mismatch");
  std::vector<double> g(L), f(L);
  step_with(state, v, dt, dB.data(), g.data(), f.data());
}

void em_step(State& state, const Potential& v, double dt, rng::Stream& noise,
             std::vector<double>& buf) {
  const std::size_t L = state.u.size();
  buf.resize(3 * L);
  double* db = buf.data();
  noise.fill_normal(std::span<double>(db, L));
  const double sd = std::sqrt(dt);
  for (std::size_t j = 0; j < L; ++j) db[j] *= sd;
  step_with(state, v, dt, db, db + L, db + 2 * L);
}

bool inside_window(std::size_t L, double t, std::int64_t site) {
  return static_cast<double>(std::abs(site)) + 10.0 * std::sqrt(t) + 20.0 <=
         0.5 * static_cast<double>(L);
}

std::size_t Ensemble::time_index(double t) const {
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (std::abs(times[i] - t) <= 1e-9 * std::max(1.0, t)) return i;
  }
  throw std::out_of_range("glew: time not recorded");
}

double Ensemble::at(std::size_t r, std::size_t ti, std::int64_t site) const {
  if (site < site_lo || site > site_hi) {
    throw std::out_of_range("glew: site not recorded");
  }
  return data[(r * times.size() + ti) * width() +
              static_cast<std::size_t>(site - site_lo)];
}

std::vector<double> Ensemble::column(double t, std::int64_t site) const {
  const std::size_t ti = time_index(t);
  std::vector<double> out(replicas);
  for (std::size_t r = 0; r < replicas; ++r) out[r] = at(r, ti, site);
  return out;
}

Ensemble record_heights(const Potential& v, const EnsembleConfig& cfg,
                        rng::Key key, unsigned workers) {
  check_step(v, cfg.dt);
  if (cfg.times.empty()) throw std::invalid_argument("glew: no times");
  if (cfg.site_hi < cfg.site_lo) throw std::invalid_argument("glew: bad sites");
  std::vector<double> times = cfg.times;
  std::sort(times.begin(), times.end());
  if (times.front() < 0.0) throw std::invalid_argument("glew: negative time");
  for (const std::int64_t site : {cfg.site_lo, cfg.site_hi}) {
    if (!inside_window(cfg.L, times.back(), site)) {
      throw std::invalid_argument("glew: sites outside the safe window");
    }
  }
  if (v.kind() != PotentialKind::quadratic) v.check();
  Ensemble ens;
  ens.times = times;
  ens.site_lo = cfg.site_lo;
  ens.site_hi = cfg.site_hi;
  ens.replicas = cfg.replicas;
  const std::size_t w = ens.width();
  ens.data.resize(cfg.replicas * times.size() * w);
  std::vector<std::int64_t> steps;
  for (double t : times) steps.push_back(to_steps(t, cfg.dt));

  parallel_for(cfg.replicas, workers, [&](std::size_t r) {
    rng::Stream init(key, r, kInitLane);
    rng::Stream noise(key, r, kNoiseLane);
    State state = sample_stationary(v, cfg.L, init);
    std::vector<double> buf;
    std::int64_t done = 0;
    for (std::size_t ti = 0; ti < steps.size(); ++ti) {
      for (; done < steps[ti]; ++done) em_step(state, v, cfg.dt, noise, buf);
      double* dst = ens.data.data() + (r * times.size() + ti) * w;
      for (std::int64_t j = cfg.site_lo; j <= cfg.site_hi; ++j) {
        dst[j - cfg.site_lo] = state.height(j);
      }
    }
  });
  return ens;
}

std::vector<VarianceRow> gl_variance_profile(
    const Potential& v, std::size_t L, double t, double dt,
    std::span<const std::int64_t> sites, std::size_t replicas, rng::Key key,
    unsigned workers) {
  if (sites.empty()) return {};
  EnsembleConfig cfg;
  cfg.L = L;
  cfg.dt = dt;
  cfg.times = {t};
  cfg.site_lo = *std::min_element(sites.begin(), sites.end());
  cfg.site_hi = *std::max_element(sites.begin(), sites.end());
  cfg.replicas = replicas;
  const Ensemble ens = record_heights(v, cfg, key, workers);
  std::vector<VarianceRow> rows;
  for (const std::int64_t k : sites) {
    VarianceRow row;
    row.k = k;
    if (t == 0.0 && k == 0) {
      row.var = {0.0, 0.0, replicas};  // u(0, 0) is pinned
    } else {
      row.var = stat::variance_estimate(ens.column(t, k));
    }
    rows.push_back(row);
  }
  return rows;
}

TwoTimeResult gl_two_time_corr(const Potential& v, const TwoTimeConfig& cfg,
                               rng::Key key, unsigned workers) {
  if (!(cfg.s > 0.0)) throw std::invalid_argument("glew: s must be > 0");
  if (!(cfg.a >= 1.0)) throw std::invalid_argument("glew: a must be >= 1");
  const double rs = std::sqrt(cfg.s);
  TwoTimeResult res;
  res.site_first = static_cast<std::int64_t>(std::floor(cfg.x * rs));
  res.site_second = static_cast<std::int64_t>(std::floor(cfg.y * rs));
  const std::int64_t gap = res.site_second - res.site_first;
  const double t1 = cfg.s;
  const double t2 = cfg.a * cfg.s;
  for (const std::int64_t site : {res.site_first, res.site_second, gap}) {
    if (!inside_window(cfg.L, t2, site)) {
      throw std::invalid_argument("glew: sites outside the safe window");
    }
  }
  if (cfg.a == 1.0 && gap == 0) {
    check_step(v, cfg.dt);
    res.direct = {1.0, 0.0, cfg.replicas};
    res.cvtv = {1.0, 0.0, cfg.replicas};
    return res;
  }
  EnsembleConfig ec;
  ec.L = cfg.L;
  ec.dt = cfg.dt;
  ec.times = {t1, t2};
  if (t2 - t1 != t1 && t2 - t1 != t2) ec.times.push_back(t2 - t1);
  ec.site_lo = std::min({res.site_first, res.site_second, gap});
  ec.site_hi = std::max({res.site_first, res.site_second, gap});
  ec.replicas = cfg.replicas;
  const Ensemble ens = record_heights(v, ec, key, workers);
  const auto first = ens.column(t1, res.site_first);
  const auto second = ens.column(t2, res.site_second);
  res.direct = stat::corr_direct(first, second);
  if (t2 - t1 == 0.0 && gap == 0) {
    res.cvtv = res.direct;
  } else {
    const auto diff = ens.column(t2 - t1, gap);
    res.cvtv = stat::corr_cvtv(first, second, diff, 1000, key.k0);
  }
  return res;
}

double quadratic_correlation(double t1, std::int64_t j, double t2,
                             std::int64_t k) {
  if (!(t2 >= t1)) throw std::invalid_argument("glew: needs t2 >= t1");
  auto f = [](double t, std::int64_t x) {
    return closedform::rw_abs_expectation(t, static_cast<int>(x));
  };
  return stat::corr_cvtv(f(t1, j), f(t2, k), f(t2 - t1, k - j));
}

}  // namespace aging::glew
