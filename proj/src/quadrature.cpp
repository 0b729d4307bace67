/*
 * SPDX-License-Identifier: Apache-2.0
 */

#include "cogup/quadrature.hpp"

#include <boost/math/constants/constants.hpp>
#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/tools/toms748_solve.hpp>

#include <cmath>
#include <cstdint>
#include <limits>

namespace cogup::numeric {

double solve_bracketed(const std::function<double(double)>& f, double lo,
                       double hi, double f_lo, double f_hi,
                       double residual_tol, int max_iter,
                       const std::string& what) {
  if (std::abs(f_lo) <= residual_tol) return lo;
  if (std::abs(f_hi) <= residual_tol) return hi;
  if ((f_lo > 0) == (f_hi > 0)) {
    throw NumericFailure(what + ": root is not bracketed");
  }
  // Returning an exact zero makes TOMS 748 stop at that abscissa.
  auto g = [&](double x) {
    const double v = f(x);
    if (!std::isfinite(v)) {
      throw NumericFailure(what + ": non-finite residual at " + std::to_string(x));
    }
    return std::abs(v) <= residual_tol ? 0.0 : v;
  };
  std::uintmax_t iters = static_cast<std::uintmax_t>(max_iter);
  auto tol = boost::math::tools::eps_tolerance<double>(
      std::numeric_limits<double>::digits - 3);
  const auto [a, b] = boost::math::tools::toms748_solve(g, lo, hi, f_lo, f_hi, tol, iters);
  if (iters >= static_cast<std::uintmax_t>(max_iter) && !tol(a, b)) {
    throw NumericFailure(what + ": no convergence after " + std::to_string(max_iter) +
                         " iterations, bracket [" + std::to_string(a) + ", " +
                         std::to_string(b) + "]");
  }
  return a == b ? a : 0.5 * (a + b);
}

Bracket bracket_positive_root(const std::function<double(double)>& f,
                              double start, double factor, int max_steps,
                              const std::string& what) {
  double lo = start;
  double hi = start;
  double f_lo = f(lo);
  double f_hi = f_lo;
  // Monotone f: widening both ends eventually straddles the root.
  for (int i = 0; i < max_steps; ++i) {
    if ((f_lo > 0) != (f_hi > 0) || f_lo == 0 || f_hi == 0) {
      return {lo, hi, f_lo, f_hi};
    }
    hi *= factor;
    f_hi = f(hi);
    if ((f_hi > 0) != (f_lo > 0)) break;
    lo /= factor;
    f_lo = f(lo);
  }
  if ((f_lo > 0) == (f_hi > 0) && f_lo != 0 && f_hi != 0) {
    throw NumericFailure(what + ": could not bracket root in [" + std::to_string(lo) +
                         ", " + std::to_string(hi) + "]");
  }
  return {lo, hi, f_lo, f_hi};
}

TanhSinhRule::TanhSinhRule(int max_level, double endpoint_cutoff) {
  const double pi = boost::math::constants::pi<double>();
  // min(u, 1-u) ~ exp(-pi sinh|s|) drops below the cutoff past s_max.
  const double s_max = std::asinh(-std::log(endpoint_cutoff) / pi);
  auto make = [pi](double s) {
    const double e = std::exp(-pi * std::sinh(std::abs(s)));
    const double small = e / (1.0 + e);
    const double large = 1.0 / (1.0 + e);
    Node node;
    node.u = s < 0 ? small : large;
    node.uc = s < 0 ? large : small;
    node.weight = pi * std::cosh(s) * small * large;
    return node;
  };
  levels_.resize(static_cast<std::size_t>(max_level) + 1);
  for (int k = 0; k * 1.0 <= s_max; ++k) {
    levels_[0].push_back(make(k));
    if (k > 0) levels_[0].push_back(make(-k));
  }
  for (int lev = 1; lev <= max_level; ++lev) {
    const double h = std::ldexp(1.0, -lev);
    for (long j = 0;; ++j) {
      const double s = (2 * j + 1) * h;
      if (s > s_max) break;
      levels_[lev].push_back(make(s));
      levels_[lev].push_back(make(-s));
    }
  }
}

const TanhSinhRule& TanhSinhRule::standard() {
  static const TanhSinhRule rule(9, 1e-30);
  return rule;
}

std::size_t TanhSinhRule::size() const {
  std::size_t n = 0;
  for (const auto& l : levels_) n += l.size();
  return n;
}

double integrate_half_line(const std::function<double(double)>& f, double a,
                           double rel_tol) {
  thread_local boost::math::quadrature::exp_sinh<double> integrator;
  double error = 0.0;
  double l1 = 0.0;
  const double value = integrator.integrate(
      [&](double y) { return f(a + y); }, 0.0, std::numeric_limits<double>::infinity(),
      rel_tol, &error, &l1);
  if (!std::isfinite(value) || error > 100.0 * rel_tol * l1 + 1e-300) {
    throw NumericFailure("half-line quadrature from " + std::to_string(a) +
                         ": estimate " + std::to_string(value) + ", error " +
                         std::to_string(error));
  }
  return value;
}

double integrate_finite(const std::function<double(double)>& f, double a, double b,
                        double rel_tol) {
  if (!(b > a)) return 0.0;
  double error = 0.0;
  double l1 = 0.0;
  const double value = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
      f, a, b, 20, rel_tol, &error, &l1);
  if (!std::isfinite(value) || error > 100.0 * rel_tol * l1 + 1e-300) {
    throw NumericFailure("finite quadrature on [" + std::to_string(a) + ", " +
                         std::to_string(b) + "]: estimate " + std::to_string(value) +
                         ", error " + std::to_string(error));
  }
  return value;
}

}  // namespace cogup::numeric
