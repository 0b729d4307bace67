/*
 * SPDX-License-Identifier: Apache-2.0
 */

#include <doctest.h>

#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "cogup/error.hpp"
#include "cogup/policy.hpp"

using namespace cogup;

TEST_CASE("water-filling formulas") {
  CHECK(waterfill_power(2.0, 1.0, 0.5, 0.5) == doctest::Approx(0.5));
  CHECK(waterfill_power(4.0, 2.0, 0.0, 1.0) == doctest::Approx(0.25));
  CHECK(waterfill_power(1.0, 1.0, 0.5, 0.5) == 0.0);
  CHECK(waterfill_power(0.5, 1.0, 0.5, 0.5) == 0.0);

  const Multipliers m{0.25, 0.25, 2.0, 0.1, false};
  CHECK(dtpil_power(4.0, 1.0, m) == doctest::Approx(1.75));
  // State exactly at the threshold: 1 / (0.25 + 0.25) = 2.
  CHECK(dtpil_power(1.0, 1.0, m) == 0.0);
  const Multipliers low{0.5, 0.5, 0.5, 0.5, false};
  CHECK(dtpil_power(0.75, 1.0, low) == 0.0);

  const Multipliers d{0.0, 0.5, 3.0, 0.1, true};
  CHECK(dil_power(9.0, 1.0, d) == doctest::Approx(2.0 - 1.0 / 9.0));
  CHECK(dil_power(3.0, 1.0, d) == 0.0);
  CHECK(dil_power(2.0, 1.0, d) == 0.0);
}

TEST_CASE("policy properties on random inputs") {
  Rng rng(11);
  std::uniform_real_distribution<double> u(0.01, 10.0);
  for (int i = 0; i < 20000; ++i) {
    const double lambda = u(rng) * 0.1;
    const double mu = u(rng) * 0.1;
    const double t = u(rng);
    const double h = u(rng);
    const double g = u(rng);
    const Multipliers m{lambda, mu, t, 0.1, false};
    const double p = dtpil_power(h, g, m);
    CHECK(std::isfinite(p));
    CHECK(p >= 0.0);
    const bool on = h / (lambda + mu * g) > t;
    if (!on) CHECK(p == 0.0);
    // The indicator is non-decreasing in h and non-increasing in g.
    if (on) CHECK(h * 1.5 / (lambda + mu * g) > t);
    if (!on) CHECK_FALSE(h / (lambda + mu * g * 1.5) > t);

    // DIL with t >= mu: the water-fill term is already positive on the transmit set.
    const Multipliers d{0.0, mu, mu + t, 0.1, true};
    if (h / g > d.threshold) CHECK(1.0 / (mu * g) - 1.0 / h > 0.0);
    CHECK(dil_power(h, g, d) >= 0.0);
  }
}

TEST_CASE("joint threshold conversion") {
  const Multipliers ratio{0.0, 0.5, 3.0, 0.1, true};
  CHECK(ratio.joint_threshold() == doctest::Approx(6.0));
  const Multipliers joint{0.1, 0.5, 3.0, 0.1, false};
  CHECK(joint.joint_threshold() == 3.0);
}

TEST_CASE("brute force: single state spends the whole budget") {
  const std::vector<DiscreteState> one{{2.0, 1.0, 1.0}};
  const auto r = brute_force_policy_search(one, 1.0, 3.0, 1e9);
  CHECK(r.power[0] == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(r.mu == 0.0);
  CHECK(r.lambda == doctest::Approx(1.0 / (3.0 + 0.5)).epsilon(1e-12));
  CHECK(r.value == doctest::Approx(std::log(7.0)).epsilon(1e-12));
}

TEST_CASE("brute force: two-state water level by hand") {
  // 0.5 (L - 1) + 0.5 (L - 1/4) = 1 gives L = 13/8.
  const std::vector<DiscreteState> two{{1.0, 1.0, 0.5}, {4.0, 1.0, 0.5}};
  const auto r = brute_force_policy_search(two, 1.0, 1.0, 1e9);
  CHECK(r.power[0] == doctest::Approx(0.625).epsilon(1e-12));
  CHECK(r.power[1] == doctest::Approx(1.375).epsilon(1e-12));
  CHECK(r.value == doctest::Approx(0.5 * std::log(1.625) + 0.5 * std::log(6.5)).epsilon(1e-12));
}

TEST_CASE("brute force: interference budget binds") {
  // One state, g = 2: power capped at Q/g = 0.5 although P allows 3.
  const std::vector<DiscreteState> one{{2.0, 2.0, 1.0}};
  const auto r = brute_force_policy_search(one, 1.0, 3.0, 1.0);
  CHECK(r.power[0] == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(r.lambda == 0.0);
  CHECK(r.mu > 0.0);
}

TEST_CASE("brute force: slack interference orders by h alone") {
  Rng rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    auto inst = random_discrete_instance(FadingModel::rayleigh(), FadingModel::rayleigh(), 8, rng);
    const auto r = brute_force_policy_search(inst.states, inst.p_target, inst.p_budget, 1e12);
    CHECK(r.mu == 0.0);
    double min_in = 1e300;
    double max_out = 0.0;
    for (std::size_t i = 0; i < inst.states.size(); ++i) {
      if (r.transmit[i]) {
        min_in = std::min(min_in, inst.states[i].h);
      } else {
        max_out = std::max(max_out, inst.states[i].h);
      }
    }
    CHECK(min_in >= max_out);
  }
}

TEST_CASE("threshold structure on random instances") {
  Rng rng(5);
  int threshold_sets = 0;
  int within_1pct = 0;
  const int trials = 100;
  for (int trial = 0; trial < trials; ++trial) {
    const int n = 8 + trial % 5;
    auto inst = random_discrete_instance(FadingModel::rayleigh(), FadingModel::rayleigh(), n, rng);
    const auto best = brute_force_policy_search(inst.states, inst.p_target, inst.p_budget,
                                                inst.q_budget);
    const auto tp = threshold_policy_discrete(inst.states, inst.p_target, inst.p_budget,
                                              inst.q_budget);
    REQUIRE(tp.found);
    CHECK(tp.value <= best.value * (1.0 + 1e-12));
    if (is_threshold_set(inst.states, best.transmit)) {
      ++threshold_sets;
      // The optimum is then one of the threshold candidates.
      CHECK(tp.value == doctest::Approx(best.value).epsilon(1e-12));
    }
    if (tp.value >= 0.99 * best.value) ++within_1pct;
    for (std::size_t i = 0; i < inst.states.size(); ++i) {
      if (!tp.transmit[i]) CHECK(tp.power[i] == 0.0);
      if (!best.transmit[i]) CHECK(best.power[i] == 0.0);
    }
  }
  // Coarse discrete laws break the structure now and then (see the header).
  CHECK(threshold_sets >= 95);
  CHECK(within_1pct >= 97);
}

TEST_CASE("is_threshold_set") {
  const std::vector<DiscreteState> s{{3.0, 1.0, 0.25}, {1.0, 0.1, 0.25}, {2.0, 5.0, 0.25},
                                     {0.5, 1.0, 0.25}};
  // By h: {0, 2} top two. By h/g: {1, 0} top two.
  CHECK(is_threshold_set(s, {true, false, true, false}));
  CHECK(is_threshold_set(s, {true, true, false, false}));
  // State 3 is dominated by state 0 (lower h, same g).
  CHECK_FALSE(is_threshold_set(s, {false, false, false, true}));
  CHECK_FALSE(is_threshold_set(s, {false, true, true, false}));
}

TEST_CASE("brute force input errors") {
  const std::vector<DiscreteState> s{{1.0, 1.0, 0.25}, {2.0, 1.0, 0.25}, {3.0, 1.0, 0.5}};
  try {
    brute_force_policy_search(s, 0.3, 1.0, 1.0);
    FAIL("expected Infeasible");
  } catch (const Infeasible& e) {
    const std::string msg = e.what();
    CHECK(msg.find("nearest achievable") != std::string::npos);
    CHECK(msg.find("0.25") != std::string::npos);
  }
  CHECK_THROWS_AS(brute_force_policy_search(s, 0.5, -1.0, 1.0), InvalidParameter);
  const std::vector<DiscreteState> bad{{1.0, 1.0, 0.4}};
  CHECK_THROWS_AS(brute_force_policy_search(bad, 0.4, 1.0, 1.0), InvalidParameter);
}
