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
#include <functional>
#include <span>
#include <utility>
#include <vector>

namespace aging::stat {

/// Streaming mean and sum of squared deviations.
class MomentAccumulator {
 public:
  void add(double x);
  void merge(const MomentAccumulator& other) noexcept;

  std::uint64_t count() const noexcept { return count_; }
  double mean() const noexcept { return mean_; }
  double m2() const noexcept { return m2_; }
  /// Unbiased sample variance; needs count >= 2.
  double variance() const;
  double stderr_mean() const;

 private:
  std::uint64_t count_ = 0;
  double mean_ = 0.0;
  double m2_ = 0.0;
};

MomentAccumulator merged(MomentAccumulator a, const MomentAccumulator& b);

class PairAccumulator {
 public:
  void add(double x, double y);
  void merge(const PairAccumulator& other) noexcept;

  std::uint64_t count() const noexcept { return count_; }
  double mean_x() const noexcept { return mean_x_; }
  double mean_y() const noexcept { return mean_y_; }
  double m2x() const noexcept { return m2x_; }
  double m2y() const noexcept { return m2y_; }
  double co() const noexcept { return co_; }
  double var_x() const;
  double var_y() const;
  double covariance() const;

 private:
  std::uint64_t count_ = 0;
  double mean_x_ = 0.0;
  double mean_y_ = 0.0;
  double m2x_ = 0.0;
  double m2y_ = 0.0;
  double co_ = 0.0;
};

PairAccumulator merged(PairAccumulator a, const PairAccumulator& b);

class EmpiricalDistribution {
 public:
  explicit EmpiricalDistribution(std::vector<double> samples);

  std::span<const double> samples() const noexcept { return samples_; }
  std::size_t size() const noexcept { return samples_.size(); }
  double mean() const noexcept;
  /// Right-continuous empirical CDF.
  double cdf(double x) const noexcept;

 private:
  std::vector<double> samples_;
};

struct CorrelationEstimate {
  double value = 0.0;
  double std_err = 0.0;
  std::uint64_t n = 0;
};

/// Pearson correlation with the normal-theory standard error (1 - r^2)/sqrt(n).
CorrelationEstimate corr_direct(const PairAccumulator& p);

/// Pearson correlation with a leave-one-out jackknife standard error.
CorrelationEstimate corr_direct(std::span<const double> x,
                                std::span<const double> y);

/// Correlation of F(A), F(B) from Var F(A), Var F(B) and Var F(B - A).
double corr_cvtv(double var_a, double var_b, double var_diff);

/// corr_cvtv on sample variances with a percentile-bootstrap standard error.
/// Equal-length inputs are resampled jointly by index; otherwise each
/// sample is resampled on its own.
CorrelationEstimate corr_cvtv(std::span<const double> a,
                              std::span<const double> b,
                              std::span<const double> diff,
                              int resamples = 1000,
                              std::uint64_t seed = 0);

struct VarianceEstimate {
  double value = 0.0;
  double std_err = 0.0;
  std::uint64_t n = 0;
};

/// Sample variance with the fourth-moment standard error.
VarianceEstimate variance_estimate(std::span<const double> x);

double ks_statistic(const EmpiricalDistribution& samples,
                    const std::function<double(double)>& cdf);

/// Two-sample Kolmogorov-Smirnov distance.
double ks_two_sample(const EmpiricalDistribution& a,
                     const EmpiricalDistribution& b);

/// Asymptotic one-sample KS critical value with Stephens' small-n correction.
double ks_critical_value(std::size_t n, double alpha);

/// Percentile bootstrap interval for estimator(samples).
std::pair<double, double> bootstrap_ci(
    std::span<const double> samples,
    const std::function<double(std::span<const double>)>& estimator,
    double level, int resamples, std::uint64_t seed);

}  // namespace aging::stat
