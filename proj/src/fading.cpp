/*
 * SPDX-License-Identifier: Apache-2.0
 */

#include "cogup/fading.hpp"

#include <boost/math/constants/constants.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include <charconv>
#include <cmath>
#include <limits>

#include "cogup/error.hpp"
#include "cogup/quadrature.hpp"

namespace cogup {

namespace {

constexpr double kSeriesEps = 1e-17;

std::string format_number(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

double parse_number(std::string_view text, std::string_view context) {
  double v = 0.0;
  const auto* first = text.data();
  const auto* last = text.data() + text.size();
  const auto res = std::from_chars(first, last, v);
  if (res.ec != std::errc() || res.ptr != last) {
    throw InvalidParameter("bad number '" + std::string(text) + "' in fading model '" +
                           std::string(context) + "'");
  }
  return v;
}

}  // namespace

double SlowVaryingTerm::operator()(double x) const {
  if (form == Form::Zero || x <= 0) return 0.0;
  return 2.0 * std::sqrt(k_factor * (k_factor + 1.0) * x);
}

std::string SlowVaryingTerm::name() const {
  return form == Form::Zero ? "zero" : "rician_sqrt(" + format_number(k_factor) + ")";
}

double ClassCParams::tail_envelope(double x) const {
  return alpha * std::pow(x, l) * std::exp(-beta * std::pow(x, n) + H(x));
}

double ClassCParams::origin_envelope(double x) const {
  return eta * std::pow(x, gamma);
}

double FadingSampler::operator()(Rng& rng) {
  return std::visit(
      [&rng](auto& d) -> double {
        using D = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<D, RicianDraw>) {
          const double re = d.los + d.sigma * d.normal(rng);
          const double im = d.sigma * d.normal(rng);
          return re * re + im * im;
        } else {
          return d(rng);
        }
      },
      dist_);
}

FadingModel::FadingModel(FadingKind kind, double param) : kind_(kind), param_(param) {
  using boost::math::tgamma;
  const double pi = boost::math::constants::pi<double>();
  switch (kind) {
    case FadingKind::Rayleigh:
      param_ = 1.0;
      break;
    case FadingKind::Rician: {
      const double k = param;
      class_c_.alpha = 1.0 / (2.0 * std::sqrt(pi) * std::exp(k) *
                              std::pow(k * (k + 1.0), 0.25));
      class_c_.l = -0.25;
      class_c_.beta = k + 1.0;
      class_c_.n = 1.0;
      class_c_.H = {SlowVaryingTerm::Form::RicianSqrt, k};
      class_c_.eta = (k + 1.0) / std::exp(k);
      class_c_.gamma = 1.0;
      break;
    }
    case FadingKind::Nakagami: {
      const double m = param;
      const double c = std::pow(m, m - 1.0) / tgamma(m);
      class_c_ = {c, m - 1.0, m, 1.0, {}, c, m};
      break;
    }
    case FadingKind::Weibull: {
      const double c = param;
      weibull_beta_ = std::pow(tgamma(1.0 + 2.0 / c), c / 2.0);
      class_c_ = {1.0, 0.0, weibull_beta_, c / 2.0, {}, weibull_beta_, c / 2.0};
      break;
    }
  }
}

FadingModel FadingModel::rayleigh() { return FadingModel(FadingKind::Rayleigh, 1.0); }
FadingModel FadingModel::rician(double k) { return make(FadingKind::Rician, k); }
FadingModel FadingModel::nakagami(double m) { return make(FadingKind::Nakagami, m); }
FadingModel FadingModel::weibull(double c) { return make(FadingKind::Weibull, c); }

FadingModel FadingModel::make(FadingKind kind, double param) {
  if (kind != FadingKind::Rayleigh && !(param > 0.0 && std::isfinite(param))) {
    throw InvalidParameter("fading parameter must be positive and finite, got " +
                           format_number(param));
  }
  return FadingModel(kind, param);
}

FadingModel FadingModel::parse(std::string_view text) {
  if (text == "rayleigh") return rayleigh();
  const auto colon = text.find(':');
  if (colon == std::string_view::npos) {
    throw InvalidParameter("unknown fading model '" + std::string(text) + "'");
  }
  const auto name = text.substr(0, colon);
  const auto rest = text.substr(colon + 1);
  auto value_for = [&](std::string_view key) {
    if (rest.size() <= key.size() + 1 || rest.substr(0, key.size()) != key ||
        rest[key.size()] != '=') {
      throw InvalidParameter("fading model '" + std::string(text) + "' needs '" +
                             std::string(key) + "=<value>'");
    }
    return parse_number(rest.substr(key.size() + 1), text);
  };
  if (name == "rician") return rician(value_for("K"));
  if (name == "nakagami") return nakagami(value_for("m"));
  if (name == "weibull") return weibull(value_for("c"));
  throw InvalidParameter("unknown fading model '" + std::string(text) + "'");
}

std::string FadingModel::to_string() const {
  switch (kind_) {
    case FadingKind::Rayleigh: return "rayleigh";
    case FadingKind::Rician: return "rician:K=" + format_number(param_);
    case FadingKind::Nakagami: return "nakagami:m=" + format_number(param_);
    case FadingKind::Weibull: return "weibull:c=" + format_number(param_);
  }
  return {};
}

// Rician power gain as a Poisson(K) mixture of Gamma(j+1, rate K+1) laws;
// this is the series form of the Marcum Q-function with all terms positive.
double FadingModel::rician_cdf(double x) const {
  const double k = param_;
  const double z = (k + 1.0) * x;
  double weight = std::exp(-k);
  double sum = 0.0;
  for (int j = 0; j < 100000; ++j) {
    if (j > 0) weight *= k / j;
    const double term = weight * boost::math::gamma_p(j + 1.0, z);
    sum += term;
    if (j > k && (term <= kSeriesEps * sum || term == 0.0)) break;
  }
  return sum;
}

double FadingModel::rician_survival(double x) const {
  const double k = param_;
  const double z = (k + 1.0) * x;
  // Marcum bound: S <= exp(-(sqrt(z) - sqrt(K))^2), below the double range here.
  const double gap = std::sqrt(z) - std::sqrt(k);
  if (gap > 0.0 && gap * gap > 760.0) return 0.0;
  // Q(j+1, z) = Q(j, z) + z^j e^{-z} / j! adds positive terms only; past
  // z ~ 700 e^{-z} underflows and each Q is evaluated directly.
  const bool recur = z < 700.0;
  double poisson_z = std::exp(-z);
  double q = 0.0;
  double weight = std::exp(-k);
  double sum = 0.0;
  for (int j = 0; j < 100000; ++j) {
    if (j > 0) {
      weight *= k / j;
      poisson_z *= z / j;
    }
    q = recur ? q + poisson_z : boost::math::gamma_q(j + 1.0, z);
    const double term = weight * q;
    sum += term;
    // Q(j+2, z) / Q(j+1, z) <= 1 + z/(j+1), so successive terms shrink by at
    // least `ratio`; once ratio <= 1/2 the remainder is below the last term.
    const double ratio = k / (j + 1.0) * (1.0 + z / (j + 1.0));
    if (ratio <= 0.5 && term <= kSeriesEps * sum) break;
  }
  return sum;
}

double FadingModel::cdf(double x) const {
  if (!(x > 0.0)) return 0.0;
  if (std::isinf(x)) return 1.0;
  switch (kind_) {
    case FadingKind::Rayleigh: return -std::expm1(-x);
    case FadingKind::Nakagami: return boost::math::gamma_p(param_, param_ * x);
    case FadingKind::Weibull: return -std::expm1(-weibull_beta_ * std::pow(x, param_ / 2.0));
    case FadingKind::Rician: return rician_cdf(x);
  }
  return 0.0;
}

double FadingModel::survival(double x) const {
  if (!(x > 0.0)) return 1.0;
  if (std::isinf(x)) return 0.0;
  switch (kind_) {
    case FadingKind::Rayleigh: return std::exp(-x);
    case FadingKind::Nakagami: return boost::math::gamma_q(param_, param_ * x);
    case FadingKind::Weibull: return std::exp(-weibull_beta_ * std::pow(x, param_ / 2.0));
    case FadingKind::Rician: return rician_survival(x);
  }
  return 1.0;
}

double FadingModel::invert_numerically(double target, bool upper) const {
  // Solve in log x against log F (or log S) so tiny targets keep precision.
  const double log_target = std::log(target);
  auto residual = [&](double log_x) {
    const double x = std::exp(log_x);
    const double v = upper ? survival(x) : cdf(x);
    const double lv = v > 0 ? std::log(v) : -std::numeric_limits<double>::max();
    return upper ? log_target - lv : lv - log_target;  // increasing in log x
  };
  double lo = 0.0;
  double hi = 0.0;
  double f_lo = residual(lo);
  double f_hi = f_lo;
  double step = 1.0;
  for (int i = 0; i < 200 && (f_lo > 0) == (f_hi > 0); ++i) {
    if (f_hi <= 0) {
      lo = hi;
      f_lo = f_hi;
      hi += step;
      f_hi = residual(hi);
    } else {
      hi = lo;
      f_hi = f_lo;
      lo -= step;
      f_lo = residual(lo);
    }
    step *= 1.5;
  }
  const double log_x = numeric::solve_bracketed(residual, lo, hi, f_lo, f_hi, 1e-15, 200,
                                                "fading quantile " + to_string());
  return std::exp(log_x);
}

double FadingModel::quantile(double p) const {
  if (!(p >= 0.0 && p < 1.0)) {
    throw DomainError("quantile: probability must lie in [0, 1), got " + format_number(p));
  }
  if (p == 0.0) return 0.0;
  switch (kind_) {
    case FadingKind::Rayleigh: return -std::log1p(-p);
    case FadingKind::Nakagami: return boost::math::gamma_p_inv(param_, p) / param_;
    case FadingKind::Weibull:
      return std::pow(-std::log1p(-p) / weibull_beta_, 2.0 / param_);
    case FadingKind::Rician:
      return p > 0.5 ? invert_numerically(1.0 - p, true) : invert_numerically(p, false);
  }
  return 0.0;
}

double FadingModel::quantile_upper(double q) const {
  if (!(q > 0.0 && q <= 1.0)) {
    throw DomainError("quantile_upper: tail probability must lie in (0, 1], got " +
                      format_number(q));
  }
  if (q == 1.0) return 0.0;
  switch (kind_) {
    case FadingKind::Rayleigh: return -std::log(q);
    case FadingKind::Nakagami: return boost::math::gamma_q_inv(param_, q) / param_;
    case FadingKind::Weibull: return std::pow(-std::log(q) / weibull_beta_, 2.0 / param_);
    case FadingKind::Rician:
      return q < 0.5 ? invert_numerically(q, true) : invert_numerically(1.0 - q, false);
  }
  return 0.0;
}

double FadingModel::mean_inverse() const {
  const double inf = std::numeric_limits<double>::infinity();
  switch (kind_) {
    case FadingKind::Nakagami: return param_ > 1.0 ? param_ / (param_ - 1.0) : inf;
    case FadingKind::Weibull:
      return param_ > 2.0
                 ? std::pow(weibull_beta_, 2.0 / param_) * boost::math::tgamma(1.0 - 2.0 / param_)
                 : inf;
    case FadingKind::Rayleigh:
    case FadingKind::Rician: return inf;
  }
  return inf;
}

FadingSampler FadingModel::sampler() const {
  switch (kind_) {
    case FadingKind::Rayleigh:
      return FadingSampler(std::exponential_distribution<double>(1.0));
    case FadingKind::Nakagami:
      return FadingSampler(std::gamma_distribution<double>(param_, 1.0 / param_));
    case FadingKind::Weibull:
      return FadingSampler(std::weibull_distribution<double>(
          param_ / 2.0, std::pow(weibull_beta_, -2.0 / param_)));
    case FadingKind::Rician:
      return FadingSampler(FadingSampler::RicianDraw{
          std::sqrt(param_ / (param_ + 1.0)), std::sqrt(0.5 / (param_ + 1.0))});
  }
  return FadingSampler(std::exponential_distribution<double>(1.0));
}

std::vector<double> FadingModel::sample(Rng& rng, std::size_t count) const {
  std::vector<double> out(count);
  auto draw = sampler();
  for (auto& v : out) v = draw(rng);
  return out;
}

}  // namespace cogup
