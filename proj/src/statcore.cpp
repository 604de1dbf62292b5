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


#include "aging/statcore.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "aging/rng.hpp"

namespace aging::stat {

namespace {

double clamp_corr(double r) { return std::clamp(r, -1.0, 1.0); }

double sample_variance(std::span<const double> x) {
  const double n = static_cast<double>(x.size());
  const double m = std::accumulate(x.begin(), x.end(), 0.0) / n;
  double s = 0.0;
  for (double v : x) s += (v - m) * (v - m);
  return s / (n - 1.0);
}

double percentile_sorted(const std::vector<double>& v, double q) {
  // Linear interpolation between order statistics.
  const double pos = q * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, v.size() - 1);
  const double w = pos - static_cast<double>(lo);
  return v[lo] + w * (v[hi] - v[lo]);
}

}  // namespace

void MomentAccumulator::add(double x) {
  if (!std::isfinite(x)) {
    throw std::invalid_argument("MomentAccumulator: non-finite observation");
  }
  ++count_;
  const double delta = x - mean_;
  mean_ += delta / static_cast<double>(count_);
  m2_ += delta * (x - mean_);
}

void MomentAccumulator::merge(const MomentAccumulator& other) noexcept {
  if (other.count_ == 0) return;
  if (count_ == 0) {
    *this = other;
    return;
  }
  const double na = static_cast<double>(count_);
  const double nb = static_cast<double>(other.count_);
  const double n = na + nb;
  const double delta = other.mean_ - mean_;
  mean_ = (na * mean_ + nb * other.mean_) / n;
  m2_ = m2_ + other.m2_ + delta * delta * (na * nb / n);
  count_ += other.count_;
}

double MomentAccumulator::variance() const {
  if (count_ < 2) throw std::domain_error("variance needs at least 2 samples");
  return m2_ / static_cast<double>(count_ - 1);
}

double MomentAccumulator::stderr_mean() const {
  return std::sqrt(variance() / static_cast<double>(count_));
}

MomentAccumulator merged(MomentAccumulator a, const MomentAccumulator& b) {
  a.merge(b);
  return a;
}

void PairAccumulator::add(double x, double y) {
  if (!std::isfinite(x) || !std::isfinite(y)) {
    throw std::invalid_argument("PairAccumulator: non-finite observation");
  }
  ++count_;
  const double n = static_cast<double>(count_);
  const double dx = x - mean_x_;
  const double dy = y - mean_y_;
  mean_x_ += dx / n;
  mean_y_ += dy / n;
  m2x_ += dx * (x - mean_x_);
  m2y_ += dy * (y - mean_y_);
  co_ += dx * (y - mean_y_);
}

void PairAccumulator::merge(const PairAccumulator& other) noexcept {
  if (other.count_ == 0) return;
  if (count_ == 0) {
    *this = other;
    return;
  }
  const double na = static_cast<double>(count_);
  const double nb = static_cast<double>(other.count_);
  const double n = na + nb;
  const double dx = other.mean_x_ - mean_x_;
  const double dy = other.mean_y_ - mean_y_;
  const double w = na * nb / n;
  mean_x_ = (na * mean_x_ + nb * other.mean_x_) / n;
  mean_y_ = (na * mean_y_ + nb * other.mean_y_) / n;
  m2x_ += other.m2x_ + dx * dx * w;
  m2y_ += other.m2y_ + dy * dy * w;
  co_ += other.co_ + dx * dy * w;
  count_ += other.count_;
}

double PairAccumulator::var_x() const {
  if (count_ < 2) throw std::domain_error("variance needs at least 2 samples");
  return m2x_ / static_cast<double>(count_ - 1);
}

double PairAccumulator::var_y() const {
  if (count_ < 2) throw std::domain_error("variance needs at least 2 samples");
  return m2y_ / static_cast<double>(count_ - 1);
}

double PairAccumulator::covariance() const {
  if (count_ < 2) throw std::domain_error("covariance needs at least 2 samples");
  return co_ / static_cast<double>(count_ - 1);
}

PairAccumulator merged(PairAccumulator a, const PairAccumulator& b) {
  a.merge(b);
  return a;
}

EmpiricalDistribution::EmpiricalDistribution(std::vector<double> samples)
    : samples_(std::move(samples)) {
  if (samples_.empty()) {
    throw std::invalid_argument("EmpiricalDistribution: no samples");
  }
  for (double v : samples_) {
    if (std::isnan(v)) {
      throw std::invalid_argument("EmpiricalDistribution: NaN sample");
    }
  }
  std::sort(samples_.begin(), samples_.end());
}

double EmpiricalDistribution::mean() const noexcept {
  return std::accumulate(samples_.begin(), samples_.end(), 0.0) /
         static_cast<double>(samples_.size());
}

double EmpiricalDistribution::cdf(double x) const noexcept {
  const auto it = std::upper_bound(samples_.begin(), samples_.end(), x);
  return static_cast<double>(it - samples_.begin()) /
         static_cast<double>(samples_.size());
}

CorrelationEstimate corr_direct(const PairAccumulator& p) {
  if (p.count() < 2) throw std::domain_error("correlation needs 2 samples");
  if (!(p.m2x() > 0.0) || !(p.m2y() > 0.0)) {
    throw std::domain_error("zero-variance marginal");
  }
  const double r = clamp_corr(p.co() / std::sqrt(p.m2x() * p.m2y()));
  const double n = static_cast<double>(p.count());
  return {r, (1.0 - r * r) / std::sqrt(n), p.count()};
}

CorrelationEstimate corr_direct(std::span<const double> x,
                                std::span<const double> y) {
  if (x.size() != y.size()) {
    throw std::invalid_argument("corr_direct: length mismatch");
  }
  const std::size_t n = x.size();
  if (n < 3) throw std::domain_error("correlation needs 3 samples");
  PairAccumulator acc;
  for (std::size_t i = 0; i < n; ++i) acc.add(x[i], y[i]);
  if (!(acc.m2x() > 0.0) || !(acc.m2y() > 0.0)) {
    throw std::domain_error("zero-variance marginal");
  }
  const double r = clamp_corr(acc.co() / std::sqrt(acc.m2x() * acc.m2y()));

  // Leave-one-out sums on centred data.
  const double mx = acc.mean_x();
  const double my = acc.mean_y();
  double sx = 0, sy = 0, sxx = 0, syy = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double a = x[i] - mx;
    const double b = y[i] - my;
    sx += a;
    sy += b;
    sxx += a * a;
    syy += b * b;
    sxy += a * b;
  }
  const double m = static_cast<double>(n - 1);
  MomentAccumulator loo;
  for (std::size_t i = 0; i < n; ++i) {
    const double a = x[i] - mx;
    const double b = y[i] - my;
    const double ax = (sx - a) / m;
    const double by = (sy - b) / m;
    const double cxx = (sxx - a * a) - m * ax * ax;
    const double cyy = (syy - b * b) - m * by * by;
    const double cxy = (sxy - a * b) - m * ax * by;
    const double ri = (cxx > 0 && cyy > 0) ? cxy / std::sqrt(cxx * cyy) : r;
    loo.add(ri);
  }
  const double se =
      std::sqrt(loo.m2() * (m / static_cast<double>(n)));
  return {r, se, n};
}

double corr_cvtv(double var_a, double var_b, double var_diff) {
  if (!(var_a > 0.0) || !(var_b > 0.0)) {
    throw std::domain_error("corr_cvtv: nonpositive marginal variance");
  }
  if (var_diff < 0.0) {
    throw std::domain_error("corr_cvtv: negative increment variance");
  }
  return 0.5 * (var_a + var_b - var_diff) / std::sqrt(var_a * var_b);
}

CorrelationEstimate corr_cvtv(std::span<const double> a,
                              std::span<const double> b,
                              std::span<const double> diff, int resamples,
                              std::uint64_t seed) {
  if (a.size() < 2 || b.size() < 2 || diff.size() < 2) {
    throw std::domain_error("corr_cvtv: need at least 2 samples per input");
  }
  if (resamples < 100) {
    throw std::invalid_argument("corr_cvtv: resamples must be >= 100");
  }
  const double point = clamp_corr(corr_cvtv(
      sample_variance(a), sample_variance(b), sample_variance(diff)));

  const bool joint = a.size() == b.size() && b.size() == diff.size();
  rng::Stream stream(rng::derive_key(seed, "cvtv-bootstrap"), 0);
  std::vector<double> ra(a.size()), rb(b.size()), rd(diff.size());
  MomentAccumulator boot;
  for (int r = 0; r < resamples; ++r) {
    if (joint) {
      for (std::size_t i = 0; i < a.size(); ++i) {
        const auto k = stream.below(a.size());
        ra[i] = a[k];
        rb[i] = b[k];
        rd[i] = diff[k];
      }
    } else {
      for (auto& v : ra) v = a[stream.below(a.size())];
      for (auto& v : rb) v = b[stream.below(b.size())];
      for (auto& v : rd) v = diff[stream.below(diff.size())];
    }
    const double va = sample_variance(ra);
    const double vb = sample_variance(rb);
    if (!(va > 0.0) || !(vb > 0.0)) continue;
    boot.add(clamp_corr(corr_cvtv(va, vb, sample_variance(rd))));
  }
  const double n = static_cast<double>(std::min({a.size(), b.size(), diff.size()}));
  return {point, boot.count() >= 2 ? std::sqrt(boot.variance()) : 0.0,
          static_cast<std::uint64_t>(n)};
}

VarianceEstimate variance_estimate(std::span<const double> x) {
  if (x.size() < 4) throw std::domain_error("variance_estimate: need 4 samples");
  const double n = static_cast<double>(x.size());
  const double m = std::accumulate(x.begin(), x.end(), 0.0) / n;
  double s2 = 0.0, s4 = 0.0;
  for (double v : x) {
    const double d = (v - m) * (v - m);
    s2 += d;
    s4 += d * d;
  }
  const double var = s2 / (n - 1.0);
  const double mu4 = s4 / n;
  const double mu2 = s2 / n;
  const double v = (mu4 - mu2 * mu2 * (n - 3.0) / (n - 1.0)) / n;
  return {var, std::sqrt(std::max(v, 0.0)), x.size()};
}

double ks_statistic(const EmpiricalDistribution& samples,
                    const std::function<double(double)>& cdf) {
  const auto xs = samples.samples();
  const double n = static_cast<double>(xs.size());
  double d = 0.0;
  std::size_t i = 0;
  while (i < xs.size()) {
    std::size_t j = i;
    while (j + 1 < xs.size() && xs[j + 1] == xs[i]) ++j;
    const double f = std::clamp(cdf(xs[i]), 0.0, 1.0);
    const double below = static_cast<double>(i) / n;
    const double at = static_cast<double>(j + 1) / n;
    d = std::max({d, std::abs(at - f), std::abs(f - below)});
    i = j + 1;
  }
  return std::min(d, 1.0);
}

double ks_two_sample(const EmpiricalDistribution& a,
                     const EmpiricalDistribution& b) {
  const auto xa = a.samples();
  const auto xb = b.samples();
  const double na = static_cast<double>(xa.size());
  const double nb = static_cast<double>(xb.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < xa.size() && j < xb.size()) {
    const double x = std::min(xa[i], xb[j]);
    while (i < xa.size() && xa[i] == x) ++i;
    while (j < xb.size() && xb[j] == x) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na -
                             static_cast<double>(j) / nb));
  }
  return d;
}

double ks_critical_value(std::size_t n, double alpha) {
  if (n == 0 || !(alpha > 0.0 && alpha < 1.0)) {
    throw std::invalid_argument("ks_critical_value: bad arguments");
  }
  const double c = std::sqrt(-0.5 * std::log(alpha / 2.0));
  const double rn = std::sqrt(static_cast<double>(n));
  return c / (rn + 0.12 + 0.11 / rn);
}

std::pair<double, double> bootstrap_ci(
    std::span<const double> samples,
    const std::function<double(std::span<const double>)>& estimator,
    double level, int resamples, std::uint64_t seed) {
  if (resamples < 100) {
    throw std::invalid_argument("bootstrap_ci: resamples must be >= 100");
  }
  if (samples.size() < 10) {
    throw std::invalid_argument("bootstrap_ci: too few samples (< 10)");
  }
  if (!(level > 0.0 && level < 1.0)) {
    throw std::invalid_argument("bootstrap_ci: level must be in (0, 1)");
  }
  rng::Stream stream(rng::derive_key(seed, "bootstrap"), 0);
  std::vector<double> buf(samples.size());
  std::vector<double> stats;
  stats.reserve(static_cast<std::size_t>(resamples));
  for (int r = 0; r < resamples; ++r) {
    for (auto& v : buf) v = samples[stream.below(samples.size())];
    stats.push_back(estimator(buf));
  }
  std::sort(stats.begin(), stats.end());
  const double tail = 0.5 * (1.0 - level);
  return {percentile_sorted(stats, tail), percentile_sorted(stats, 1.0 - tail)};
}

}  // namespace aging::stat
