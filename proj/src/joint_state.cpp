/*
 * SPDX-License-Identifier: Apache-2.0
 */

#include "cogup/joint_state.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <string>
#include <utility>

#include "cogup/error.hpp"

namespace cogup {

namespace {

constexpr double kCdfAbsTol = 1e-15;
constexpr double kCdfRelTol = 1e-11;
constexpr double kLogResidualTol = 1e-11;

// Root of an increasing function of log x, searched outward from `start`.
double solve_in_log(const std::function<double(double)>& residual, double start) {
  double lo = start - 0.5;
  double hi = start + 0.5;
  double f_lo = residual(lo);
  double f_hi = residual(hi);
  for (int i = 0; i < 200 && (f_lo > 0) == (f_hi > 0); ++i) {
    if (f_hi < 0) {
      lo = hi;
      f_lo = f_hi;
      hi += 1.0 + i;
      f_hi = residual(hi);
    } else {
      hi = lo;
      f_hi = f_lo;
      lo -= 1.0 + i;
      f_lo = residual(lo);
    }
  }
  return numeric::solve_bracketed(residual, lo, hi, f_lo, f_hi, kLogResidualTol, 200,
                                  "joint quantile");
}

}  // namespace

std::shared_ptr<const InterferenceGrid> InterferenceGrid::for_model(const FadingModel& g) {
  static std::mutex mutex;
  static std::map<std::pair<int, double>, std::shared_ptr<const InterferenceGrid>> cache;
  const auto key = std::make_pair(static_cast<int>(g.kind()), g.param());
  std::lock_guard lock(mutex);
  auto& slot = cache[key];
  if (!slot) slot = std::make_shared<const InterferenceGrid>(g);
  return slot;
}

InterferenceGrid::InterferenceGrid(FadingModel g)
    : model_(std::move(g)),
      values_(static_cast<std::size_t>(rule().max_level()) + 1),
      ready_(new std::once_flag[static_cast<std::size_t>(rule().max_level()) + 1]) {}

std::span<const double> InterferenceGrid::level(int k) const {
  std::call_once(ready_[k], [&] {
    const auto nodes = rule().level(k);
    auto& out = values_[k];
    out.resize(nodes.size());
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      const auto& nd = nodes[i];
      out[i] = nd.u <= 0.5 ? model_.quantile(nd.u) : model_.quantile_upper(nd.uc);
    }
  });
  return values_[k];
}

AsymptoticQuantile asymptotic_quantile(const ClassCParams& h_params, double lambda, double p) {
  if (!(p > 0.0 && p < 1.0)) {
    throw DomainError("asymptotic_quantile: p must lie in (0, 1), got " + std::to_string(p));
  }
  if (!(lambda > 0.0)) return {};
  const double v = std::pow(-std::log1p(-p) / h_params.beta, 1.0 / h_params.n) / lambda;
  return {v, true};
}

JointStateDistribution::JointStateDistribution(FadingModel direct, FadingModel interference,
                                               double lambda, double mu)
    : direct_(std::move(direct)),
      grid_(InterferenceGrid::for_model(interference)),
      lambda_(lambda),
      mu_(mu) {
  if (!(lambda >= 0.0 && mu >= 0.0) || !std::isfinite(lambda) || !std::isfinite(mu) ||
      lambda + mu <= 0.0) {
    throw InvalidParameter("joint state needs lambda, mu >= 0, not both zero (got " +
                           std::to_string(lambda) + ", " + std::to_string(mu) + ")");
  }
}

double JointStateDistribution::expect_over_g(double x, bool upper) const {
  const auto& grid = *grid_;
  auto f = [&](int lev, std::size_t i) {
    const double w = lambda_ + mu_ * grid.level(lev)[i];
    return std::array<double, 1>{upper ? direct_.survival(w * x) : direct_.cdf(w * x)};
  };
  const auto r = numeric::integrate_unit<1>(grid.rule(), f, kCdfAbsTol, kCdfRelTol,
                                            "joint-state distribution");
  return std::clamp(r.value[0], 0.0, 1.0);
}

double JointStateDistribution::cdf(double x) const {
  if (!(x > 0.0)) return 0.0;
  if (std::isinf(x)) return 1.0;
  if (mu_ == 0.0) return direct_.cdf(lambda_ * x);
  return expect_over_g(x, false);
}

double JointStateDistribution::survival(double x) const {
  if (!(x > 0.0)) return 1.0;
  if (std::isinf(x)) return 0.0;
  if (mu_ == 0.0) return direct_.survival(lambda_ * x);
  return expect_over_g(x, true);
}

double JointStateDistribution::quantile(double p) const {
  if (!(p > 0.0 && p < 1.0)) {
    throw DomainError("joint quantile: p must lie in (0, 1), got " + std::to_string(p));
  }
  if (p >= 0.5) return quantile_upper(1.0 - p);
  if (mu_ == 0.0) return direct_.quantile(p) / lambda_;
  const double log_p = std::log(p);
  auto residual = [&](double log_x) {
    const double v = cdf(std::exp(log_x));
    return (v > 0 ? std::log(v) : -std::numeric_limits<double>::max()) - log_p;
  };
  const double start = std::log(direct_.quantile(p) / (lambda_ + mu_));
  return std::exp(solve_in_log(residual, start));
}

double JointStateDistribution::quantile_upper(double q) const {
  if (!(q > 0.0 && q < 1.0)) {
    throw DomainError("joint quantile: tail probability must lie in (0, 1), got " +
                      std::to_string(q));
  }
  if (q > 0.5) return quantile(1.0 - q);
  if (mu_ == 0.0) return direct_.quantile_upper(q) / lambda_;
  const double log_q = std::log(q);
  auto residual = [&](double log_x) {
    const double v = survival(std::exp(log_x));
    return log_q - (v > 0 ? std::log(v) : -std::numeric_limits<double>::max());
  };
  // The mu = 0 quantile bounds the root from above and has the same leading
  // order; unlike the asymptotic form it stays usable when 1 - q rounds to 1.
  const double start = std::log(direct_.quantile_upper(q) / (lambda_ > 0 ? lambda_ : mu_));
  return std::exp(solve_in_log(residual, start));
}

std::vector<std::array<double, 2>> JointStateDistribution::quantile_table(std::size_t size,
                                                                          double q_min) const {
  if (size < 2 || !(q_min > 0.0 && q_min < 0.5)) {
    throw InvalidParameter("quantile_table: need size >= 2 and q_min in (0, 0.5)");
  }
  std::vector<std::array<double, 2>> out(size);
  const double l0 = std::log(0.5);
  const double l1 = std::log(q_min);
  for (std::size_t i = 0; i < size; ++i) {
    const double q = std::exp(l0 + (l1 - l0) * static_cast<double>(i) / (size - 1));
    out[i] = {1.0 - q, quantile_upper(q)};
  }
  return out;
}

}  // namespace cogup
