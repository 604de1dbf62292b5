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


#include <doctest.h>

#include <cmath>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "aging/closedform.hpp"
#include "aging/glew.hpp"
#include "aging/rng.hpp"
#include "aging/statcore.hpp"

using namespace aging;
using glew::Potential;

namespace {

rng::Key test_key(const char* name) { return rng::derive_key(17, name); }

// CDF of exp(-V) by Simpson's rule on [-12, x].
double stationary_cdf(const Potential& v, double x) {
  auto integrate = [&](double hi) {
    const int m = 4000;
    const double lo = -12.0;
    const double h = (hi - lo) / m;
    double s = 0;
    for (int i = 0; i <= m; ++i) {
      const double w = i == 0 || i == m ? 1 : (i % 2 ? 4 : 2);
      s += w * std::exp(-v.value(lo + i * h));
    }
    return s * h / 3;
  };
  return integrate(std::min(x, 12.0)) / integrate(12.0);
}

}  // namespace

TEST_CASE("potentials") {
  const auto q = Potential::quadratic();
  CHECK(q.value(2.0) == 2.0);
  CHECK(q.derivative(-3.0) == -3.0);
  const auto p = Potential::sqrt_perturbed(1.0);
  CHECK(p.c1() == 1.0);
  CHECK(p.c2() == 2.0);
  CHECK(p.value(0.0) == 0.0);
  const double h = 1e-5;
  for (double x : {-4.0, -0.3, 0.0, 1.2, 7.0}) {
    CHECK(p.derivative(x) ==
          doctest::Approx((p.value(x + h) - p.value(x - h)) / (2 * h))
              .epsilon(1e-6));
  }
  std::vector<double> xs = {-1, 0, 2}, out(3);
  p.derivative(xs, out);
  for (int i = 0; i < 3; ++i) CHECK(out[i] == doctest::Approx(p.derivative(xs[i])));
  CHECK_NOTHROW(p.check());
  CHECK_THROWS_AS(Potential::sqrt_perturbed(-2.0), std::invalid_argument);
  const auto lopsided = Potential::custom(
      [](double x) { return x * x / 2 + 0.1 * x; },
      [](double x) { return x + 0.1; }, 1.0, 1.0);
  CHECK_THROWS_AS(lopsided.check(), std::invalid_argument);
  const auto too_stiff = Potential::custom(
      [](double x) { return x * x; }, [](double x) { return 2 * x; }, 1.0, 1.5);
  CHECK_THROWS_AS(too_stiff.check(), std::invalid_argument);
}

TEST_CASE("quadratic stationary gradients are standard normal") {
  rng::Stream s(test_key("quad"), 0);
  const auto st = glew::sample_stationary(Potential::quadratic(), 100000, s);
  CHECK(st.u[0] == 0.0);
  const auto g = st.gradients();
  const auto v = stat::variance_estimate(g);
  CHECK(std::abs(v.value - 1.0) < 4 * v.std_err);
  double sum = std::accumulate(g.begin(), g.end(), 0.0);
  CHECK(sum == doctest::Approx(st.slope_sum));
}

TEST_CASE("anharmonic gradient sampler matches the stationary law") {
  const auto p = Potential::sqrt_perturbed(1.0);
  rng::Stream s(test_key("anh"), 0);
  std::vector<double> draws(20000);
  for (double& x : draws) x = glew::sample_gradient(p, s);
  const stat::EmpiricalDistribution dist(draws);
  const double ks =
      stat::ks_statistic(dist, [&](double x) { return stationary_cdf(p, x); });
  CHECK(ks <= stat::ks_critical_value(draws.size(), 0.01));
}

TEST_CASE("initial height variance is |k|") {
  std::vector<double> at10, at100, atm10;
  for (int r = 0; r < 4000; ++r) {
    rng::Stream s(test_key("var0"), r);
    const auto st = glew::sample_stationary(Potential::quadratic(), 512, s);
    CHECK(st.height(0) == 0.0);
    at10.push_back(st.height(10));
    at100.push_back(st.height(100));
    atm10.push_back(st.height(-10));
  }
  for (auto [xs, k] : {std::pair{&at10, 10.0}, {&at100, 100.0}, {&atm10, 10.0}}) {
    const auto v = stat::variance_estimate(*xs);
    CHECK(std::abs(v.value - k) < 3 * v.std_err);
  }
}

TEST_CASE("heights are quasi-periodic") {
  rng::Stream s(test_key("qp"), 0);
  const auto st = glew::sample_stationary(Potential::quadratic(), 64, s);
  CHECK(st.height(64) == doctest::Approx(st.slope_sum));
  CHECK(st.height(-1) == doctest::Approx(st.u[63] - st.slope_sum));
  CHECK(st.height(70) == doctest::Approx(st.u[6] + st.slope_sum));
}

TEST_CASE("drift telescopes and ignores constant shifts") {
  const auto p = Potential::sqrt_perturbed(1.0);
  rng::Stream s(test_key("drift"), 0);
  auto st = glew::sample_stationary(p, 300, s);
  std::vector<double> d(300), shifted(300);
  glew::drift(st, p, d);
  double sum = 0;
  for (double x : d) sum += x;
  CHECK(std::abs(sum) < 1e-12);
  for (double& x : st.u) x += 3.25;
  glew::drift(st, p, shifted);
  for (std::size_t j = 0; j < d.size(); ++j) {
    CHECK(shifted[j] == doctest::Approx(d[j]).epsilon(1e-12));
  }
}

TEST_CASE("quadratic drift is half the discrete Laplacian") {
  glew::State st;
  st.u = {0.0, 1.0, 3.0, 2.0, -1.0};
  st.slope_sum = 0.5;
  std::vector<double> d(5);
  glew::drift(st, Potential::quadratic(), d);
  for (std::int64_t j = 0; j < 5; ++j) {
    const double lap = st.height(j + 1) - 2 * st.height(j) + st.height(j - 1);
    CHECK(d[j] == doctest::Approx(lap / 2));
  }
}

TEST_CASE("one step from a flat interface is pure noise") {
  const double dt = 1e-3;
  glew::State st;
  st.u.assign(20000, 0.0);
  rng::Stream noise(test_key("flat"), 0);
  std::vector<double> buf;
  glew::em_step(st, Potential::quadratic(), dt, noise, buf);
  CHECK(st.time == dt);
  const auto v = stat::variance_estimate(st.u);
  CHECK(std::abs(v.value - dt) < 4 * v.std_err);
  const auto lag = stat::corr_direct(
      std::span(st.u).first(19999), std::span(st.u).subspan(1));
  CHECK(std::abs(lag.value) < 4 / std::sqrt(20000.0));
}

TEST_CASE("step size and window guards") {
  CHECK_NOTHROW(glew::check_step(Potential::quadratic(), 0.1));
  CHECK_THROWS_AS(glew::check_step(Potential::quadratic(), 0.2),
                  std::invalid_argument);
  CHECK_THROWS_AS(glew::check_step(Potential::sqrt_perturbed(1.0), 0.06),
                  std::invalid_argument);
  CHECK(glew::inside_window(512, 4.0, 0));
  CHECK(glew::inside_window(512, 4.0, 200));
  CHECK_FALSE(glew::inside_window(512, 4.0, 250));
  CHECK_FALSE(glew::inside_window(64, 16.0, 0));
}

TEST_CASE("total momentum has variance L t") {
  const std::size_t L = 256;
  const double dt = 1e-2, t = 1.0;
  const auto p = Potential::sqrt_perturbed(1.0);
  std::vector<double> momentum;
  std::vector<double> buf;
  for (int r = 0; r < 2000; ++r) {
    rng::Stream init(test_key("mom"), r);
    rng::Stream noise(test_key("mom"), r, 1);
    auto st = glew::sample_stationary(p, L, init);
    const double before = std::accumulate(st.u.begin(), st.u.end(), 0.0);
    for (int i = 0; i < 100; ++i) glew::em_step(st, p, dt, noise, buf);
    momentum.push_back(std::accumulate(st.u.begin(), st.u.end(), 0.0) - before);
  }
  const auto v = stat::variance_estimate(momentum);
  CHECK(std::abs(v.value - L * t) < 4 * v.std_err);
}

TEST_CASE("variance profile matches the random-walk formula") {
  const std::int64_t sites[] = {-5, 0, 5};
  const auto rows = glew::gl_variance_profile(
      Potential::quadratic(), 128, 1.0, 5e-3, sites, 3000, test_key("prof"), 1);
  REQUIRE(rows.size() == 3);
  for (const auto& row : rows) {
    const double exact = closedform::rw_abs_expectation(1.0, row.k);
    CHECK(std::abs(row.var.value - exact) < 4 * row.var.std_err);
  }
}

TEST_CASE("ensembles do not depend on worker count") {
  glew::EnsembleConfig cfg;
  cfg.L = 128;
  cfg.dt = 1e-2;
  cfg.times = {0.5, 1.0};
  cfg.site_lo = -3;
  cfg.site_hi = 3;
  cfg.replicas = 40;
  const auto p = Potential::quadratic();
  const auto a = glew::record_heights(p, cfg, test_key("ens"), 1);
  const auto b = glew::record_heights(p, cfg, test_key("ens"), 3);
  CHECK(a.data == b.data);
  CHECK(a.column(1.0, -3).size() == 40);
  CHECK(a.at(5, a.time_index(0.5), 2) == b.at(5, 0, 2));
  CHECK_THROWS(a.time_index(0.7));
}

TEST_CASE("exact quadratic correlation") {
  CHECK(glew::quadratic_correlation(3.0, 2, 3.0, 2) == doctest::Approx(1.0));
  const double r = glew::quadratic_correlation(4.0, 0, 8.0, 0);
  CHECK(r > 0.5);
  CHECK(r < 1.0);
  // Approaches the scaling limit as times grow.
  const double far = glew::quadratic_correlation(400.0, 0, 800.0, 0);
  CHECK(std::abs(far - closedform::rho_ew(2.0)) <
        std::abs(r - closedform::rho_ew(2.0)));
}

TEST_CASE("two-time configuration") {
  glew::TwoTimeConfig cfg;
  cfg.s = 1;
  cfg.a = 1;
  cfg.L = 64;
  cfg.dt = 1e-2;
  cfg.replicas = 100;
  const auto r =
      glew::gl_two_time_corr(Potential::quadratic(), cfg, test_key("tt"), 1);
  CHECK(r.direct.value == doctest::Approx(1.0));
  cfg.x = 100;
  CHECK_THROWS(glew::gl_two_time_corr(Potential::quadratic(), cfg,
                                      test_key("tt"), 1));
}
