/*
 * SPDX-License-Identifier: Apache-2.0
 */

#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "cogup/error.hpp"

namespace cogup::numeric {

/// Bracketed root of a continuous function (TOMS 748 with bisection
/// safeguards). Stops as soon as |f(x)| <= residual_tol or the bracket has
/// collapsed to machine precision. `f_lo` and `f_hi` must differ in sign.
/// Throws NumericFailure after `max_iter` evaluations.
double solve_bracketed(const std::function<double(double)>& f, double lo,
                       double hi, double f_lo, double f_hi,
                       double residual_tol, int max_iter,
                       const std::string& what);

/// Grows [lo, hi] geometrically (hi *= factor, lo /= factor) around `start`
/// until the sign of a monotone f differs at the ends; returns the bracket
/// and the values at its ends.
struct Bracket {
  double lo, hi, f_lo, f_hi;
};
Bracket bracket_positive_root(const std::function<double(double)>& f,
                              double start, double factor, int max_steps,
                              const std::string& what);

/// Tanh-sinh nodes on (0, 1) grouped by refinement level. Level 0 has
/// spacing 1 in the sinh variable; level k adds the odd multiples of 2^-k.
/// Each node stores u and 1-u separately so both endpoints keep full
/// relative precision.
class TanhSinhRule {
 public:
  struct Node {
    double u;
    double uc;      // 1 - u
    double weight;  // du/ds at the node; multiply by the level step
  };

  TanhSinhRule(int max_level, double endpoint_cutoff);

  static const TanhSinhRule& standard();

  int max_level() const { return static_cast<int>(levels_.size()) - 1; }
  std::span<const Node> level(int k) const { return levels_[k]; }
  std::size_t size() const;

 private:
  std::vector<std::vector<Node>> levels_;
};

/// Result of a fixed-rule vector integral on (0, 1).
template <std::size_t K>
struct UnitIntegral {
  std::array<double, K> value{};
  std::array<double, K> error{};
  int levels_used = 0;
};

/// Integrates a vector-valued f over (0, 1) with the tanh-sinh rule,
/// refining level by level until every component satisfies
/// |I_k - I_{k-1}| <= max(abs_tol, rel_tol |I_k|). `f(level, index)` is
/// called with the position of the node inside `rule.level(level)` so that
/// callers can look up precomputed abscissa transforms.
template <std::size_t K, class F>
UnitIntegral<K> integrate_unit(const TanhSinhRule& rule, F&& f,
                               double abs_tol, double rel_tol,
                               const char* what) {
  constexpr int kMinLevel = 4;
  std::array<double, K> sum{};
  std::array<double, K> prev{};
  UnitIntegral<K> out;
  double step = 1.0;
  for (int lev = 0; lev <= rule.max_level(); ++lev) {
    const auto nodes = rule.level(lev);
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      const std::array<double, K> v = f(lev, i);
      for (std::size_t c = 0; c < K; ++c) sum[c] += nodes[i].weight * v[c];
    }
    if (lev > 0) step *= 0.5;
    std::array<double, K> cur;
    bool done = lev >= kMinLevel;
    for (std::size_t c = 0; c < K; ++c) {
      cur[c] = sum[c] * step;
      const double err = std::abs(cur[c] - prev[c]);
      out.error[c] = err;
      if (!(err <= std::max(abs_tol, rel_tol * std::abs(cur[c])))) done = false;
    }
    out.value = cur;
    out.levels_used = lev;
    if (done) return out;
    prev = cur;
  }
  std::string msg = std::string(what) + ": tanh-sinh did not converge at level " +
                    std::to_string(rule.max_level()) + " (";
  for (std::size_t c = 0; c < K; ++c) {
    msg += "component " + std::to_string(c) + " value " +
           std::to_string(out.value[c]) + " err " + std::to_string(out.error[c]) +
           (c + 1 < K ? "; " : ")");
  }
  throw NumericFailure(msg);
}

/// Integral of f over [a, inf) for a smooth, decaying f. Relative tolerance.
double integrate_half_line(const std::function<double(double)>& f, double a,
                           double rel_tol);

/// Integral of a smooth f over the finite interval [a, b] (adaptive
/// Gauss-Kronrod). Relative tolerance.
double integrate_finite(const std::function<double(double)>& f, double a, double b,
                        double rel_tol);

}  // namespace cogup::numeric
