/*
 * SPDX-License-Identifier: Apache-2.0
 */

#pragma once

#include <array>
#include <memory>
#include <mutex>
#include <span>
#include <vector>

#include "cogup/fading.hpp"
#include "cogup/quadrature.hpp"

namespace cogup {

/// Interference gains g = Q_g(u) at the nodes of the standard tanh-sinh
/// rule, computed once per level and shared by every expectation over g.
class InterferenceGrid {
 public:
  /// Process-wide cache keyed by the model; thread safe.
  static std::shared_ptr<const InterferenceGrid> for_model(const FadingModel& g);

  explicit InterferenceGrid(FadingModel g);

  const FadingModel& model() const { return model_; }
  const numeric::TanhSinhRule& rule() const { return numeric::TanhSinhRule::standard(); }
  /// g values for rule().level(k), in node order.
  std::span<const double> level(int k) const;

 private:
  FadingModel model_;
  mutable std::vector<std::vector<double>> values_;
  mutable std::unique_ptr<std::once_flag[]> ready_;
};

/// Leading-order approximation of the joint-state quantile as p -> 1.
struct AsymptoticQuantile {
  double value = 0.0;
  bool valid = false;  // false when lambda == 0
};

/// (1/lambda) (-log(1-p)/beta_h)^{1/n_h}. Throws DomainError unless
/// p is in (0, 1); returns valid=false for lambda == 0.
AsymptoticQuantile asymptotic_quantile(const ClassCParams& h_params, double lambda, double p);

/// Law of X = h / (lambda + mu g) for independent h and g.
/// With lambda = 0 this is (1/mu) h/g.
class JointStateDistribution {
 public:
  /// Throws InvalidParameter if lambda or mu is negative or both are zero.
  JointStateDistribution(FadingModel direct, FadingModel interference, double lambda,
                         double mu);

  const FadingModel& direct() const { return direct_; }
  const FadingModel& interference() const { return grid_->model(); }
  double lambda() const { return lambda_; }
  double mu() const { return mu_; }

  double cdf(double x) const;
  /// P(X > x), computed directly so small tails keep relative accuracy.
  double survival(double x) const;
  /// x with cdf(x) = p, p in (0, 1); DomainError otherwise.
  double quantile(double p) const;
  /// x with survival(x) = q, q in (0, 1).
  double quantile_upper(double q) const;

  /// Optional monotone table of (p, x) pairs at `size` log-spaced tail
  /// probabilities between 1/2 and `q_min`; handy for plotting.
  std::vector<std::array<double, 2>> quantile_table(std::size_t size, double q_min) const;

 private:
  double expect_over_g(double x, bool upper) const;

  FadingModel direct_;
  std::shared_ptr<const InterferenceGrid> grid_;
  double lambda_;
  double mu_;
};

}  // namespace cogup
