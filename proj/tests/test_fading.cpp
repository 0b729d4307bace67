/*
 * SPDX-License-Identifier: Apache-2.0
 */

#include <doctest.h>

#include <boost/math/distributions/gamma.hpp>
#include <boost/math/distributions/non_central_chi_squared.hpp>
#include <boost/math/distributions/weibull.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "cogup/error.hpp"
#include "cogup/fading.hpp"

using namespace cogup;

namespace {

std::vector<FadingModel> all_models() {
  return {FadingModel::rayleigh(),      FadingModel::rician(0.5),     FadingModel::rician(1.0),
          FadingModel::rician(5.0),     FadingModel::nakagami(0.5),   FadingModel::nakagami(1.2),
          FadingModel::nakagami(2.0),   FadingModel::weibull(1.5),    FadingModel::weibull(2.0),
          FadingModel::weibull(2.5)};
}

// Survival function from Boost's own distribution objects.
double reference_survival(const FadingModel& m, double x) {
  using boost::math::complement;
  switch (m.kind()) {
    case FadingKind::Rayleigh: return std::exp(-x);
    case FadingKind::Nakagami: {
      boost::math::gamma_distribution<> d(m.param(), 1.0 / m.param());
      return boost::math::cdf(complement(d, x));
    }
    case FadingKind::Rician: {
      const double k = m.param();
      boost::math::non_central_chi_squared_distribution<> d(2.0, 2.0 * k);
      return boost::math::cdf(complement(d, 2.0 * (k + 1.0) * x));
    }
    case FadingKind::Weibull: {
      // Magnitude r ~ Weibull(c, s) with E[r^2] = 1, so P(r^2 > x) = P(r > sqrt x).
      const double c = m.param();
      const double s = 1.0 / std::sqrt(boost::math::tgamma(1.0 + 2.0 / c));
      boost::math::weibull_distribution<> d(c, s);
      return boost::math::cdf(complement(d, std::sqrt(x)));
    }
  }
  return 0.0;
}

double ks_critical_1pct(std::size_t n) { return 1.628 / std::sqrt(static_cast<double>(n)); }

}  // namespace

TEST_CASE("cdf matches reference distributions") {
  for (const auto& m : all_models()) {
    CAPTURE(m.to_string());
    for (double x = 1e-3; x < 40.0; x *= 1.7) {
      const double ref = reference_survival(m, x);
      CHECK(m.survival(x) == doctest::Approx(ref).epsilon(1e-11));
      CHECK(m.cdf(x) + m.survival(x) == doctest::Approx(1.0).epsilon(1e-14));
    }
  }
}

TEST_CASE("closed-form values") {
  CHECK(FadingModel::rayleigh().cdf(1.0) == doctest::Approx(1.0 - std::exp(-1.0)).epsilon(1e-15));
  // Gamma(2, rate 2) at 1: 1 - e^{-2}(1 + 2).
  CHECK(FadingModel::nakagami(2.0).cdf(1.0) ==
        doctest::Approx(1.0 - 3.0 * std::exp(-2.0)).epsilon(1e-14));
  for (const auto& m : all_models()) {
    CHECK(m.cdf(0.0) == 0.0);
    CHECK(m.cdf(-1.0) == 0.0);
    CHECK(m.survival(0.0) == 1.0);
  }
  CHECK(FadingModel::rayleigh().quantile(1.0 - 1.0 / 100) ==
        doctest::Approx(std::log(100.0)).epsilon(1e-14));
  CHECK(FadingModel::weibull(2.0).quantile(0.5) == doctest::Approx(std::log(2.0)).epsilon(1e-13));
  CHECK(FadingModel::rayleigh().quantile(0.0) == 0.0);
}

TEST_CASE("quantile inverts cdf on a log grid") {
  for (const auto& m : all_models()) {
    CAPTURE(m.to_string());
    for (double x = 1e-6; x < 30.0; x *= 2.3) {
      const double p = m.cdf(x);
      // Upper tail goes through quantile_upper; cdf near 1 cannot resolve x.
      if (p > 0.0 && p < 1.0 - 1e-4) CHECK(m.quantile(p) == doctest::Approx(x).epsilon(1e-8));
      const double q = m.survival(x);
      if (q > 1e-300 && q < 1.0) CHECK(m.quantile_upper(q) == doctest::Approx(x).epsilon(1e-8));
    }
  }
}

TEST_CASE("quantile domain errors") {
  const auto m = FadingModel::nakagami(2.0);
  CHECK_THROWS_AS(m.quantile(1.0), DomainError);
  CHECK_THROWS_AS(m.quantile(-0.1), DomainError);
  CHECK_THROWS_AS(m.quantile_upper(0.0), DomainError);
}

TEST_CASE("invalid parameters") {
  CHECK_THROWS_AS(FadingModel::rician(0.0), InvalidParameter);
  CHECK_THROWS_AS(FadingModel::nakagami(-1.0), InvalidParameter);
  CHECK_THROWS_AS(FadingModel::weibull(0.0), InvalidParameter);
  CHECK_THROWS_AS(FadingModel::parse("lognormal"), InvalidParameter);
  CHECK_THROWS_AS(FadingModel::parse("nakagami:K=2"), InvalidParameter);
}

TEST_CASE("parse and print round trip") {
  for (const auto& m : all_models()) {
    CHECK(FadingModel::parse(m.to_string()) == m);
  }
  CHECK(FadingModel::parse("rician:K=1").kind() == FadingKind::Rician);
  CHECK(FadingModel::parse("weibull:c=1.5").param() == 1.5);
}

TEST_CASE("class-C parameter rows") {
  const auto ray = FadingModel::rayleigh().class_c_params();
  CHECK(ray.alpha == 1.0);
  CHECK(ray.l == 0.0);
  CHECK(ray.beta == 1.0);
  CHECK(ray.n == 1.0);
  CHECK(ray.H.form == SlowVaryingTerm::Form::Zero);
  CHECK(ray.eta == 1.0);
  CHECK(ray.gamma == 1.0);

  const auto ric = FadingModel::rician(1.0).class_c_params();
  CHECK(ric.beta == doctest::Approx(2.0));
  CHECK(ric.eta == doctest::Approx(2.0 / std::exp(1.0)));
  CHECK(ric.l == doctest::Approx(-0.25));
  CHECK(ric.H(2.0) == doctest::Approx(2.0 * std::sqrt(2.0 * 2.0)));

  const auto nak1 = FadingModel::nakagami(1.0).class_c_params();
  CHECK(nak1.alpha == doctest::Approx(1.0));
  CHECK(nak1.l == doctest::Approx(0.0));
  CHECK(nak1.beta == doctest::Approx(1.0));
  CHECK(nak1.eta == doctest::Approx(1.0));
  CHECK(nak1.gamma == doctest::Approx(1.0));
  CHECK(FadingModel::nakagami(0.5).class_c_params().gamma == doctest::Approx(0.5));

  const auto w2 = FadingModel::weibull(2.0).class_c_params();
  CHECK(w2.beta == doctest::Approx(1.0));
  CHECK(w2.n == doctest::Approx(1.0));
  CHECK(w2.gamma == doctest::Approx(1.0));

  const auto w15 = FadingModel::weibull(1.5).class_c_params();
  const double b = std::pow(std::tgamma(1.0 + 4.0 / 3.0), 0.75);
  CHECK(w15.n == doctest::Approx(0.75));
  CHECK(w15.gamma == doctest::Approx(0.75));
  CHECK(w15.beta == doctest::Approx(b));
  CHECK(w15.eta == doctest::Approx(b));
}

TEST_CASE("origin envelope for models where it is exact to leading order") {
  // Nakagami, Weibull and Rayleigh envelopes converge at the origin.
  for (const auto& m : {FadingModel::rayleigh(), FadingModel::nakagami(0.5),
                        FadingModel::nakagami(2.0), FadingModel::weibull(1.5),
                        FadingModel::rician(1.0)}) {
    CAPTURE(m.to_string());
    const double x = m.quantile(1e-7);
    CHECK(m.cdf(x) / m.class_c_params().origin_envelope(x) == doctest::Approx(1.0).epsilon(0.05));
  }
}

TEST_CASE("tail envelope for Rayleigh, Weibull and low-m Nakagami") {
  for (const auto& m : {FadingModel::rayleigh(), FadingModel::weibull(1.5),
                        FadingModel::weibull(2.5), FadingModel::nakagami(1.2)}) {
    CAPTURE(m.to_string());
    const double x = m.quantile_upper(1e-10);
    CHECK(m.survival(x) / m.class_c_params().tail_envelope(x) ==
          doctest::Approx(1.0).epsilon(0.05));
  }
}

TEST_CASE("mean of the inverse gain") {
  CHECK(std::isinf(FadingModel::rayleigh().mean_inverse()));
  CHECK(std::isinf(FadingModel::rician(2.0).mean_inverse()));
  CHECK(std::isinf(FadingModel::nakagami(0.8).mean_inverse()));
  CHECK(FadingModel::nakagami(3.0).mean_inverse() == doctest::Approx(1.5));
  // Power gain is Weibull(shape c/2) with unit mean: E[X^-1] = Gamma(1 - 1/shape) / scale.
  const double c = 3.0;
  const double shape = c / 2.0;
  const double scale = 1.0 / boost::math::tgamma(1.0 + 1.0 / shape);
  CHECK(FadingModel::weibull(c).mean_inverse() ==
        doctest::Approx(boost::math::tgamma(1.0 - 1.0 / shape) / scale).epsilon(1e-12));
}

TEST_CASE("samples: unit mean, KS against cdf, determinism") {
  for (const auto& m : all_models()) {
    CAPTURE(m.to_string());
    Rng rng(42);
    auto xs = m.sample(rng, 100000);
    const double mean = std::accumulate(xs.begin(), xs.end(), 0.0) / xs.size();
    CHECK(mean == doctest::Approx(1.0).epsilon(0.02));
    std::sort(xs.begin(), xs.end());
    double d = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      const double f = m.cdf(xs[i]);
      d = std::max({d, f - static_cast<double>(i) / xs.size(),
                    static_cast<double>(i + 1) / xs.size() - f});
    }
    CHECK(d < ks_critical_1pct(xs.size()));
  }
  Rng a(7);
  Rng b(7);
  CHECK(FadingModel::rician(1.0).sample(a, 64) == FadingModel::rician(1.0).sample(b, 64));
  CHECK(FadingModel::rayleigh().sample(a, 0).empty());
}

TEST_CASE("Rayleigh sample mean over a million draws") {
  Rng rng(1);
  const auto xs = FadingModel::rayleigh().sample(rng, 1000000);
  CHECK(std::accumulate(xs.begin(), xs.end(), 0.0) / xs.size() == doctest::Approx(1.0).epsilon(0.01));
}
