/*
 * SPDX-License-Identifier: Apache-2.0
 */

#include <doctest.h>

#include <boost/math/distributions/gamma.hpp>
#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/tools/roots.hpp>

#include <algorithm>
#include <cmath>
#include <vector>

#include "cogup/error.hpp"
#include "cogup/joint_state.hpp"

using namespace cogup;

namespace {

const FadingModel kRay = FadingModel::rayleigh();

// E_g[F_h((lambda + mu g) x)] with g ~ Gamma(m, rate m), integrated against
// the density on (0, inf).
double gamma_mixture_cdf(const FadingModel& h, double m, double lambda, double mu, double x) {
  boost::math::gamma_distribution<> g(m, 1.0 / m);
  boost::math::quadrature::exp_sinh<double> es;
  return es.integrate(
      [&](double gv) { return h.cdf((lambda + mu * gv) * x) * boost::math::pdf(g, gv); }, 1e-12);
}

}  // namespace

TEST_CASE("Rayleigh closed forms") {
  const JointStateDistribution both(kRay, kRay, 1.0, 1.0);
  CHECK(both.cdf(1.0) == doctest::Approx(1.0 - std::exp(-1.0) / 2.0).epsilon(1e-12));
  for (double x = 0.1; x <= 20.0; x += 0.37) {
    CHECK(std::abs(both.survival(x) - std::exp(-x) / (1.0 + x)) <= 1e-8);
  }
  const JointStateDistribution ratio(kRay, kRay, 0.0, 1.0);
  CHECK(ratio.cdf(3.0) == doctest::Approx(0.75).epsilon(1e-12));
  const JointStateDistribution direct_only(kRay, kRay, 1.0, 0.0);
  for (double x : {0.01, 0.5, 3.0, 30.0}) {
    CHECK(direct_only.cdf(x) == kRay.cdf(x));
  }
  CHECK(both.cdf(0.0) == 0.0);
  CHECK(both.cdf(-2.0) == 0.0);
}

TEST_CASE("quantiles in closed form") {
  const JointStateDistribution ratio(kRay, kRay, 0.0, 1.0);
  for (double n : {10.0, 100.0, 1000.0}) {
    CHECK(ratio.quantile(1.0 - 1.0 / n) == doctest::Approx(n - 1.0).epsilon(1e-9));
    CHECK(ratio.quantile_upper(1.0 / n) == doctest::Approx(n - 1.0).epsilon(1e-9));
  }
  const JointStateDistribution direct_only(kRay, kRay, 1.0, 0.0);
  CHECK(direct_only.quantile(1.0 - 1.0 / 100) == doctest::Approx(std::log(100.0)).epsilon(1e-9));

  // Root of e^{-x}/(1+x) = 1/2 by bisection on the closed form.
  double lo = 0.0;
  double hi = 1.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (std::exp(-mid) / (1.0 + mid) > 0.5 ? lo : hi) = mid;
  }
  const JointStateDistribution both(kRay, kRay, 1.0, 1.0);
  CHECK(both.quantile(0.5) == doctest::Approx(0.5 * (lo + hi)).epsilon(1e-9));
}

TEST_CASE("non-exponential laws against density quadrature") {
  for (const auto& h : {FadingModel::nakagami(2.0), FadingModel::weibull(1.5)}) {
    for (double m : {0.7, 2.0}) {
      const JointStateDistribution d(h, FadingModel::nakagami(m), 0.4, 0.9);
      for (double x : {0.2, 1.0, 4.0}) {
        CAPTURE(h.to_string());
        CAPTURE(m);
        CAPTURE(x);
        CHECK(d.cdf(x) == doctest::Approx(gamma_mixture_cdf(h, m, 0.4, 0.9, x)).epsilon(1e-8));
      }
    }
  }
}

TEST_CASE("quantile inverts cdf") {
  for (const auto& [h, g] : {std::pair{kRay, kRay},
                             std::pair{FadingModel::rician(1.0), FadingModel::nakagami(0.5)},
                             std::pair{FadingModel::weibull(2.5), FadingModel::weibull(1.5)}}) {
    for (const auto& [lambda, mu] : {std::pair{1.0, 1.0}, std::pair{0.0, 0.5}, std::pair{0.3, 2.0}}) {
      const JointStateDistribution d(h, g, lambda, mu);
      for (double p : {0.01, 0.3, 0.9, 0.999}) {
        const double x = d.quantile(p);
        CHECK(d.cdf(x) == doctest::Approx(p).epsilon(1e-9));
      }
      for (double q : {1e-3, 1e-6}) {
        CHECK(d.survival(d.quantile_upper(q)) == doctest::Approx(q).epsilon(1e-9));
      }
    }
  }
}

TEST_CASE("quantile decreases in mu and obeys the scale identity") {
  const auto h = FadingModel::nakagami(2.0);
  const auto g = FadingModel::weibull(1.5);
  for (double p : {0.5, 0.9, 0.999}) {
    double prev = JointStateDistribution(h, g, 1.0, 0.0).quantile(p);
    for (double mu : {0.1, 0.5, 1.0, 4.0}) {
      const double x = JointStateDistribution(h, g, 1.0, mu).quantile(p);
      CHECK(x < prev);
      prev = x;
    }
    for (double lambda : {0.2, 3.0}) {
      const double mu = 0.7;
      CHECK(lambda * JointStateDistribution(h, g, lambda, mu).quantile(p) ==
            doctest::Approx(JointStateDistribution(h, g, 1.0, mu / lambda).quantile(p))
                .epsilon(1e-8));
    }
  }
}

TEST_CASE("asymptotic quantile") {
  const auto ray = kRay.class_c_params();
  CHECK(asymptotic_quantile(ray, 1.0, 1.0 - 1e-3).value ==
        doctest::Approx(std::log(1000.0)).epsilon(1e-14));
  CHECK(asymptotic_quantile(ray, 2.0, 0.9).value ==
        doctest::Approx(0.5 * asymptotic_quantile(ray, 1.0, 0.9).value).epsilon(1e-14));
  const auto w = FadingModel::weibull(1.5).class_c_params();
  CHECK(asymptotic_quantile(w, 1.0, 1.0 - 1e-4).value ==
        doctest::Approx(std::pow(std::log(1e4) / w.beta, 4.0 / 3.0)).epsilon(1e-12));
  CHECK_FALSE(asymptotic_quantile(ray, 0.0, 0.5).valid);
  CHECK_THROWS_AS(asymptotic_quantile(ray, 1.0, 1.0), DomainError);

  // Exact / asymptotic -> 1 as p -> 1 (Rayleigh/Rayleigh, lambda = mu = 1).
  // The exact quantile solves x + log(1 + x) = log N, so the gap closes like
  // log(x)/x: about 18% at N = 1e6 and under 10% only past N ~ 1e17.
  const JointStateDistribution d(kRay, kRay, 1.0, 1.0);
  // For Rayleigh h the asymptotic value is log N (checked above); 1 - 1/N
  // itself rounds to 1 for the largest N here.
  auto ratio = [&](double n) { return d.quantile_upper(1.0 / n) / std::log(n); };
  auto closed_form_ratio = [](double n) {
    const double target = std::log(n);
    double x = target;
    for (int i = 0; i < 100; ++i) x = target - std::log1p(x);
    return x / target;
  };
  for (double n : {1e2, 1e6, 1e18}) {
    CHECK(ratio(n) == doctest::Approx(closed_form_ratio(n)).epsilon(1e-9));
  }
  CHECK(std::abs(ratio(1e6) - 1.0) < std::abs(ratio(1e2) - 1.0));
  CHECK(std::abs(ratio(1e18) - 1.0) < 0.1);
}

TEST_CASE("largest of N states concentrates at the asymptotic scale") {
  // Median over 200 trials of max_i h_i/(lambda + mu g_i) / log N -> 1/lambda.
  const double lambda = 2.0;
  const double mu = 1.0;
  const int n = 100000;
  Rng rng(2024);
  auto sh = kRay.sampler();
  auto sg = kRay.sampler();
  std::vector<double> scaled;
  for (int t = 0; t < 200; ++t) {
    double best = 0.0;
    for (int i = 0; i < n; ++i) best = std::max(best, sh(rng) / (lambda + mu * sg(rng)));
    scaled.push_back(best / std::log(static_cast<double>(n)));
  }
  std::nth_element(scaled.begin(), scaled.begin() + 100, scaled.end());
  CHECK(scaled[100] == doctest::Approx(1.0 / lambda).epsilon(0.15));
}

TEST_CASE("argument validation") {
  CHECK_THROWS_AS(JointStateDistribution(kRay, kRay, 0.0, 0.0), InvalidParameter);
  CHECK_THROWS_AS(JointStateDistribution(kRay, kRay, -1.0, 1.0), InvalidParameter);
  const JointStateDistribution d(kRay, kRay, 1.0, 1.0);
  CHECK_THROWS_AS(d.quantile(0.0), DomainError);
  CHECK_THROWS_AS(d.quantile(1.0), DomainError);
}

TEST_CASE("quantile table is monotone") {
  const JointStateDistribution d(FadingModel::rician(2.0), kRay, 0.5, 0.5);
  const auto table = d.quantile_table(64, 1e-8);
  REQUIRE(table.size() == 64);
  for (std::size_t i = 1; i < table.size(); ++i) {
    CHECK(table[i][0] > table[i - 1][0]);
    CHECK(table[i][1] > table[i - 1][1]);
  }
}
