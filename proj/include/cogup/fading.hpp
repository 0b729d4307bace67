/*
 * SPDX-License-Identifier: Apache-2.0
 */

#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace cogup {

using Rng = std::mt19937_64;

enum class FadingKind { Rayleigh, Rician, Nakagami, Weibull };

/// Slowly varying correction inside the tail exponent. Only the two forms
/// that occur for the supported models exist: zero, and 2*sqrt(K(K+1)x).
struct SlowVaryingTerm {
  enum class Form { Zero, RicianSqrt };
  Form form = Form::Zero;
  double k_factor = 0.0;

  double operator()(double x) const;
  std::string name() const;
};

/// Tail and origin constants of a class-C power-gain law:
///   1 - F(x) ~ alpha x^l exp(-beta x^n + H(x))   as x -> inf
///   F(x)     ~ eta x^gamma                       as x -> 0
struct ClassCParams {
  double alpha = 1.0;
  double l = 0.0;
  double beta = 1.0;
  double n = 1.0;
  SlowVaryingTerm H;
  double eta = 1.0;
  double gamma = 1.0;

  double tail_envelope(double x) const;
  double origin_envelope(double x) const;
};

/// Draws from one fading law. Holds the distribution object so repeated
/// draws in a hot loop don't rebuild it.
class FadingSampler {
 public:
  double operator()(Rng& rng);

 private:
  friend class FadingModel;
  struct RicianDraw {
    double los;    // line-of-sight amplitude
    double sigma;  // per-dimension scatter deviation
    std::normal_distribution<double> normal{0.0, 1.0};
  };
  using Dist = std::variant<std::exponential_distribution<double>,
                            std::gamma_distribution<double>,
                            std::weibull_distribution<double>, RicianDraw>;
  explicit FadingSampler(Dist dist) : dist_(std::move(dist)) {}
  Dist dist_;
};

/// Unit-mean channel power-gain distribution.
///
/// Rayleigh is Exp(1); Nakagami-m is Gamma(m, rate m); Rician-K is the
/// squared magnitude of a complex Gaussian with K/(K+1) of its power on the
/// line of sight; Weibull-c refers to the magnitude, so the power gain is
/// Weibull with shape c/2 and P(X > x) = exp(-Gamma(1+2/c)^{c/2} x^{c/2}).
///
/// Immutable; safe for concurrent reads.
class FadingModel {
 public:
  static FadingModel rayleigh();
  static FadingModel rician(double k_factor);
  static FadingModel nakagami(double m);
  static FadingModel weibull(double c);
  /// `param` is ignored for Rayleigh. Throws InvalidParameter if not > 0.
  static FadingModel make(FadingKind kind, double param = 1.0);
  /// Parses "rayleigh", "rician:K=<v>", "nakagami:m=<v>", "weibull:c=<v>".
  static FadingModel parse(std::string_view text);

  FadingKind kind() const { return kind_; }
  double param() const { return param_; }
  std::string to_string() const;

  /// F(x); zero for x <= 0.
  double cdf(double x) const;
  /// 1 - F(x), accurate deep in the upper tail.
  double survival(double x) const;
  /// Inverse of cdf for p in [0, 1). Throws DomainError otherwise.
  double quantile(double p) const;
  /// x with survival(x) = q, for q in (0, 1]. Accurate for tiny q.
  double quantile_upper(double q) const;

  double mean() const { return 1.0; }
  /// E[1/X]; +inf when it diverges (origin exponent gamma <= 1).
  double mean_inverse() const;

  std::vector<double> sample(Rng& rng, std::size_t count) const;
  FadingSampler sampler() const;

  const ClassCParams& class_c_params() const { return class_c_; }

  friend bool operator==(const FadingModel& a, const FadingModel& b) {
    return a.kind_ == b.kind_ && a.param_ == b.param_;
  }

 private:
  FadingModel(FadingKind kind, double param);

  double rician_cdf(double x) const;
  double rician_survival(double x) const;
  double invert_numerically(double target, bool upper) const;

  FadingKind kind_;
  double param_;
  double weibull_beta_ = 1.0;  // rate of the power-gain Weibull tail
  ClassCParams class_c_;
};

}  // namespace cogup
