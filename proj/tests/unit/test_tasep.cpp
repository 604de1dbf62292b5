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
#include <stdexcept>
#include <vector>

#include "aging/rng.hpp"
#include "aging/statcore.hpp"
#include "aging/tasep.hpp"

using namespace aging;
using tasep::Ring;

namespace {

rng::Key test_key(const char* name) { return rng::derive_key(7, name); }

}  // namespace

TEST_CASE("stationary ring density is Bernoulli(1/2)") {
  const std::size_t L = 4096;
  const int replicas = 50;
  double total = 0;
  for (int r = 0; r < replicas; ++r) {
    auto ring = Ring::stationary(L, rng::Stream(test_key("density"), r));
    total += static_cast<double>(ring.particle_count());
  }
  const double n = static_cast<double>(L) * replicas;
  const double p = total / n;
  CHECK(std::abs(p - 0.5) < 4.0 * std::sqrt(0.25 / n));
}

TEST_CASE("particle number is conserved") {
  auto ring = Ring::stationary(256, rng::Stream(test_key("conserve"), 0));
  const auto before = ring.particle_count();
  ring.evolve_until(50.0);
  CHECK(ring.particle_count() == before);
  CHECK(ring.events() > 0);
}

TEST_CASE("single particle on an empty ring is a Poisson walker") {
  const std::size_t L = 64;
  const double t = 5.0;
  stat::MomentAccumulator jumps;
  for (int r = 0; r < 4000; ++r) {
    std::vector<std::uint8_t> occ(L, 0);
    occ[0] = 1;
    Ring ring(occ, {0}, rng::Stream(test_key("single"), r));
    ring.evolve_until(t);
    jumps.add(static_cast<double>(ring.events()));
    CHECK(ring.particle_count() == 1);
  }
  CHECK(std::abs(jumps.mean() - t) < 4.0 * std::sqrt(t / 4000.0));
  CHECK(jumps.variance() == doctest::Approx(t).epsilon(0.1));
}

TEST_CASE("full and empty rings never move") {
  for (std::uint8_t fill : {std::uint8_t{0}, std::uint8_t{1}}) {
    Ring ring(std::vector<std::uint8_t>(32, fill), {0},
              rng::Stream(test_key("frozen"), fill));
    CHECK(ring.mobile_count() == 0);
    ring.evolve_until(100.0);
    CHECK(ring.events() == 0);
    CHECK(ring.flux(0) == 0);
  }
}

TEST_CASE("height steps follow occupancy") {
  auto ring = Ring::stationary(512, rng::Stream(test_key("height"), 3));
  ring.evolve_until(10.0);
  CHECK(ring.height(0) == 2 * ring.flux(0));
  for (std::int64_t m = -100; m <= 100; ++m) {
    const std::int64_t step = 1 - 2 * (ring.occupied(m) ? 1 : 0);
    CHECK(ring.height(m) - ring.height(m - 1) == step);
  }
  CHECK_THROWS_AS(ring.height(129), std::out_of_range);
}

TEST_CASE("stationary flux grows like t/4") {
  const double t = 100.0;
  stat::MomentAccumulator flux;
  for (int r = 0; r < 400; ++r) {
    auto ring = Ring::stationary(4096, rng::Stream(test_key("flux"), r));
    ring.evolve_until(t);
    flux.add(static_cast<double>(ring.flux(0)));
  }
  CHECK(std::abs(flux.mean() - t / 4) < 4.0 * flux.stderr_mean() + 0.5);
}

TEST_CASE("ring evolution is deterministic") {
  auto a = Ring::stationary(300, rng::Stream(test_key("det"), 11));
  auto b = Ring::stationary(300, rng::Stream(test_key("det"), 11));
  a.evolve_until(20.0);
  b.evolve_until(20.0);
  CHECK(a.events() == b.events());
  CHECK(a.flux(0) == b.flux(0));
  CHECK(std::equal(a.occupancy().begin(), a.occupancy().end(),
                   b.occupancy().begin()));
}

TEST_CASE("evolving in pieces matches evolving at once") {
  auto a = Ring::stationary(300, rng::Stream(test_key("pieces"), 1));
  auto b = Ring::stationary(300, rng::Stream(test_key("pieces"), 1));
  a.evolve_until(7.0);
  a.evolve_until(15.0);
  b.evolve_until(15.0);
  // Memoryless stopping redraws the clock, so only law-level equality holds.
  CHECK(a.particle_count() == b.particle_count());
  CHECK(a.time() == b.time());
}

TEST_CASE("two-time configuration validation") {
  tasep::TwoTimeConfig cfg;
  CHECK_NOTHROW(tasep::validate(cfg));
  auto bad = cfg;
  bad.L = 256;
  CHECK_THROWS_AS(tasep::validate(bad), std::invalid_argument);
  bad = cfg;
  bad.a = 0.5;
  CHECK_THROWS_AS(tasep::validate(bad), std::invalid_argument);
  bad = cfg;
  bad.k = 600;
  CHECK_THROWS_AS(tasep::validate(bad), std::invalid_argument);
  bad = cfg;
  bad.replicas = 10;
  CHECK_THROWS_AS(tasep::validate(bad), std::invalid_argument);
}

TEST_CASE("equal times and sites give correlation one") {
  tasep::TwoTimeConfig cfg;
  cfg.L = 512;
  cfg.s = 5;
  cfg.a = 1;
  cfg.replicas = 100;
  const auto r = tasep::two_time_height_corr(cfg, test_key("one"), 1);
  CHECK(r.direct.value == doctest::Approx(1.0));
}

TEST_CASE("two-time samples do not depend on worker count") {
  tasep::TwoTimeConfig cfg;
  cfg.L = 512;
  cfg.s = 5;
  cfg.replicas = 120;
  const auto a = tasep::two_time_height_samples(cfg, test_key("workers"), 1);
  const auto b = tasep::two_time_height_samples(cfg, test_key("workers"), 3);
  CHECK(a.first == b.first);
  CHECK(a.second == b.second);
  CHECK(a.diff == b.diff);
}

TEST_CASE("boundary step flux is capped and monotone in time") {
  for (int r = 0; r < 200; ++r) {
    rng::Stream s1(test_key("boundary"), r);
    rng::Stream s2(test_key("boundary"), r);
    const auto early = tasep::boundary_step_flux(6, 3.0, s1);
    const auto late = tasep::boundary_step_flux(6, 30.0, s2);
    CHECK(early >= 0);
    CHECK(late <= 6);
    CHECK(early <= late);
  }
}
