/*
 * SPDX-License-Identifier: Apache-2.0
 */

#include <doctest.h>

#include <cmath>
#include <numbers>

#include "cogup/error.hpp"
#include "cogup/scaling.hpp"

using namespace cogup;

namespace {

ScalingTable synthetic_table(const std::vector<int>& ns, double a, double b, bool loglog) {
  ScalingTable t;
  t.config.regime = loglog ? Regime::DTPIL : Regime::DIL;
  t.config.P_ave = 1.0;
  for (int n : ns) {
    ScalingRow r;
    r.N = n;
    const double x = loglog ? std::log(std::log(n)) : std::log(n);
    r.semi_analytic_rate = a + b * x;
    t.rows.push_back(r);
  }
  return t;
}

NetworkConfig dil_rayleigh(int n) {
  NetworkConfig c;
  c.regime = Regime::DIL;
  c.N = n;
  c.Q_ave = 1.0;
  return c;
}

}  // namespace

TEST_CASE("least-squares fit recovers a synthetic line") {
  const std::vector<int> ns{4, 8, 16, 32, 64, 128, 256, 512};
  const auto t = synthetic_table(ns, 0.3, 0.45, false);
  const auto top = fit_scaling(t, ScalingLaw::LogN);
  CHECK(top.rows_used == 4);
  CHECK(top.fitted_prelog == doctest::Approx(0.45).epsilon(1e-12));
  CHECK(top.fitted_intercept == doctest::Approx(0.3).epsilon(1e-10));
  const auto all = fit_scaling(t, ScalingLaw::LogN, FitWindow::All);
  CHECK(all.rows_used == ns.size());
  CHECK(all.fitted_prelog == doctest::Approx(0.45).epsilon(1e-12));

  const auto ll = fit_scaling(synthetic_table(ns, -0.1, 0.8, true), ScalingLaw::LogLogN,
                              FitWindow::All);
  CHECK(ll.fitted_prelog == doctest::Approx(0.8).epsilon(1e-12));
  CHECK(ll.theory_intercept == 0.0);
}

TEST_CASE("fit skips failed rows and needs four") {
  auto t = synthetic_table({4, 8, 16, 32, 64}, 0.0, 1.0, false);
  t.rows[2].status = "error: test";
  t.rows[2].semi_analytic_rate = 1e9;
  const auto f = fit_scaling(t, ScalingLaw::LogN, FitWindow::All);
  CHECK(f.rows_used == 4);
  CHECK(f.fitted_prelog == doctest::Approx(1.0).epsilon(1e-12));
  t.rows[3].status = "error: test";
  CHECK_THROWS_AS(fit_scaling(t, ScalingLaw::LogN, FitWindow::All), DomainError);
  CHECK_THROWS_AS(fit_scaling(synthetic_table({4, 8, 16, 32, 64, 128}, 0.0, 1.0, false),
                              ScalingLaw::LogN),
                  DomainError);
}

TEST_CASE("theory pre-log per fading law") {
  const double e = std::numbers::e;
  auto t = synthetic_table({4, 8, 16, 32}, 0.0, 1.0, false);
  t.config.interference = FadingModel::rayleigh();
  CHECK(fit_scaling(t, ScalingLaw::LogN, FitWindow::All).theory_prelog ==
        doctest::Approx(1.0 / e).epsilon(1e-14));
  t.config.interference = FadingModel::nakagami(1.2);
  const double nak = fit_scaling(t, ScalingLaw::LogN, FitWindow::All).theory_prelog;
  CHECK(nak == doctest::Approx(1.0 / (1.2 * e)).epsilon(1e-12));
  CHECK(nak == doctest::Approx(0.3066).epsilon(1e-3));
  t.config.direct = FadingModel::weibull(1.5);
  const double w = fit_scaling(t, ScalingLaw::LogLogN, FitWindow::All).theory_prelog;
  CHECK(w == doctest::Approx(0.4905).epsilon(1e-3));
  CHECK(law_for(Regime::DTPIL) == ScalingLaw::LogLogN);
  CHECK(law_for(Regime::DIL) == ScalingLaw::LogN);
}

TEST_CASE("scaling experiment grids") {
  const auto one = scaling_experiment(dil_rayleigh(2), {16}, {});
  REQUIRE(one.rows.size() == 1);
  CHECK(one.rows[0].ok());
  CHECK(one.rows[0].p == doctest::Approx(1.0 / 16));
  CHECK_FALSE(one.rows[0].simulated);
  CHECK(one.rows[0].sum_rate() == one.rows[0].semi_analytic_rate);
  CHECK(one.config.N == 16);

  CHECK_THROWS_AS(scaling_experiment(dil_rayleigh(2), {}, {}), InvalidParameter);
  CHECK_THROWS_AS(scaling_experiment(dil_rayleigh(2), {8, 8}, {}), InvalidParameter);
  CHECK_THROWS_AS(scaling_experiment(dil_rayleigh(2), {1, 8}, {}), InvalidParameter);

  // c/N with c = 3 is not a probability at N = 2; the sweep keeps going.
  auto c = dil_rayleigh(2);
  c.p_rule = PRule::scaled(3.0);
  const auto t = scaling_experiment(c, {2, 8}, {});
  CHECK_FALSE(t.rows[0].ok());
  CHECK(t.rows[0].status.rfind("error:", 0) == 0);
  CHECK(t.rows[1].ok());
}

TEST_CASE("p rule comparison shares seeds per N") {
  ScalingOptions opt;
  opt.blocks = 2000;
  opt.seed = 9;
  opt.threads = 1;
  const auto tables = pn_comparison(dil_rayleigh(2), {8, 32},
                                    {PRule::one_over_n(), PRule::scaled(0.5)}, opt);
  REQUIRE(tables.size() == 2);
  for (std::size_t i = 0; i < 2; ++i) {
    CHECK(tables[0].rows[i].seed == tables[1].rows[i].seed);
    CHECK(tables[0].rows[i].simulated);
  }
  CHECK(tables[0].rows[0].seed != tables[0].rows[1].seed);
  CHECK(tables[1].rows[1].p == doctest::Approx(0.5 / 32));
  CHECK_THROWS_AS(pn_comparison(dil_rayleigh(2), {8}, {}, opt), InvalidParameter);
}

TEST_CASE("success probability approaches c e^{-c}") {
  for (double cval : {0.5, 1.0, 2.0}) {
    auto c = dil_rayleigh(2);
    c.p_rule = PRule::scaled(cval);
    const auto t = scaling_experiment(c, {4096}, {});
    const double p = t.rows[0].calibration.functionals.tx_prob;
    CHECK(p == doctest::Approx(cval / 4096).epsilon(1e-8));
    const double success = 4096 * p * std::pow(1.0 - p, 4095);
    CHECK(success == doctest::Approx(cval * std::exp(-cval)).epsilon(1e-3));
  }
}

TEST_CASE("optimized transmission probability") {
  const int n = 64;
  const auto cfg = dil_rayleigh(n);
  const auto opt = optimize_pn(cfg, n);
  CHECK(opt.unimodal);
  CHECK(opt.rate >= opt.rate_one_over_n);
  CHECK(opt.scan.size() == 25);

  // Dense grid in N p as an independent search.
  double best = 0.0;
  double best_a = 0.0;
  for (double a = 0.2; a <= 4.0; a += 0.02) {
    auto c = cfg;
    c.p_rule = PRule::fixed(a / n);
    const double r = semi_analytic_rate(c, calibrate(c).multipliers);
    if (r > best) {
      best = r;
      best_a = a;
    }
  }
  CHECK(opt.rate >= best * (1.0 - 1e-6));
  CHECK(opt.p_star * n == doctest::Approx(best_a).epsilon(0.03));

  CHECK_THROWS_AS(optimize_pn(cfg, 1), InvalidParameter);
}
