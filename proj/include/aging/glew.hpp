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
#include <vector>

#include "aging/rng.hpp"
#include "aging/statcore.hpp"

namespace aging::glew {

enum class PotentialKind { quadratic, sqrt_perturbed, custom };

/// Symmetric convex interaction with c1 <= V'' <= c2.
class Potential {
 public:
  /// V(x) = x^2 / 2.
  static Potential quadratic();
  /// V(x) = x^2 / 2 + kappa (sqrt(1 + x^2) - 1), curvature in [1, 1 + kappa].
  static Potential sqrt_perturbed(double kappa);
  static Potential custom(std::function<double(double)> v,
                          std::function<double(double)> dv, double c1,
                          double c2);

  double value(double x) const;
  double derivative(double x) const;
  double c1() const noexcept { return c1_; }
  double c2() const noexcept { return c2_; }
  PotentialKind kind() const noexcept { return kind_; }
  double kappa() const noexcept { return kappa_; }

  /// Spot-checks symmetry, oddness of V' and the curvature bounds on a grid;
  /// throws std::invalid_argument on violation.
  void check() const;

  /// Applies V' to every element.
  void derivative(std::span<const double> x, std::span<double> out) const;

 private:
  PotentialKind kind_ = PotentialKind::quadratic;
  double kappa_ = 0.0;
  double c1_ = 1.0;
  double c2_ = 1.0;
  std::function<double(double)> v_;
  std::function<double(double)> dv_;
};

/// Heights u_0..u_{L-1} on a ring with u_{j+L} = u_j + slope_sum.
struct State {
  std::vector<double> u;
  double slope_sum = 0.0;
  double time = 0.0;

  std::size_t size() const noexcept { return u.size(); }
  double height(std::int64_t j) const noexcept;
  /// u_{j+1} - u_j for j = 0..L-1.
  std::vector<double> gradients() const;
};

/// iid gradients from exp(-V) with u_0 = 0.
State sample_stationary(const Potential& v, std::size_t L, rng::Stream& stream);

/// One draw from the density proportional to exp(-V).
double sample_gradient(const Potential& v, rng::Stream& stream);

/// drift_j = (V'(u_{j+1} - u_j) - V'(u_j - u_{j-1})) / 2.
void drift(const State& state, const Potential& v, std::span<double> out);

/// Euler-Maruyama step with given increments dB (already scaled by sqrt(dt)).
void em_step(State& state, const Potential& v, double dt,
             std::span<const double> dB);

/// Same step drawing the increments from `noise`; `buf` is scratch space.
void em_step(State& state, const Potential& v, double dt, rng::Stream& noise,
             std::vector<double>& buf);

void check_step(const Potential& v, double dt);

/// Largest |site| allowed at time t on a ring of size L.
bool inside_window(std::size_t L, double t, std::int64_t site);

/// Heights u(t, j) for t in `times` and j in [site_lo, site_hi], per replica.
struct Ensemble {
  std::vector<double> times;
  std::int64_t site_lo = 0;
  std::int64_t site_hi = 0;
  std::size_t replicas = 0;
  std::vector<double> data;

  std::size_t width() const noexcept {
    return static_cast<std::size_t>(site_hi - site_lo + 1);
  }
  std::size_t time_index(double t) const;
  double at(std::size_t r, std::size_t ti, std::int64_t site) const;
  /// u(t, site) across replicas.
  std::vector<double> column(double t, std::int64_t site) const;
};

struct EnsembleConfig {
  std::size_t L = 256;
  double dt = 1e-3;
  std::vector<double> times;
  std::int64_t site_lo = 0;
  std::int64_t site_hi = 0;
  std::size_t replicas = 1000;
};

Ensemble record_heights(const Potential& v, const EnsembleConfig& cfg,
                        rng::Key key, unsigned workers);

struct VarianceRow {
  std::int64_t k = 0;
  stat::VarianceEstimate var;
};

std::vector<VarianceRow> gl_variance_profile(
    const Potential& v, std::size_t L, double t, double dt,
    std::span<const std::int64_t> sites, std::size_t replicas, rng::Key key,
    unsigned workers);

struct TwoTimeConfig {
  double s = 4.0;
  double a = 2.0;
  double x = 0.0;
  double y = 0.0;
  std::size_t L = 512;
  double dt = 1e-3;
  std::size_t replicas = 1000;
};

struct TwoTimeResult {
  stat::CorrelationEstimate direct;
  stat::CorrelationEstimate cvtv;
  std::int64_t site_first = 0;
  std::int64_t site_second = 0;
};

/// Corr(u(s, floor(x sqrt s)), u(as, floor(y sqrt s))) across replicas.
TwoTimeResult gl_two_time_corr(const Potential& v, const TwoTimeConfig& cfg,
                               rng::Key key, unsigned workers);

/// Exact two-time correlation for the quadratic potential from the
/// random-walk variance formula.
double quadratic_correlation(double t1, std::int64_t j, double t2,
                             std::int64_t k);

}  // namespace aging::glew
