/*
 * SPDX-License-Identifier: Apache-2.0
 */

#include "cogup/calibrate.hpp"

#include <boost/math/special_functions/expint.hpp>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <string>

#include "cogup/error.hpp"
#include "cogup/joint_state.hpp"
#include "cogup/quadrature.hpp"

namespace cogup {

namespace {

constexpr double kInnerRelTol = 1e-11;
constexpr double kOuterAbsTol = 1e-15;
constexpr double kOuterRelTol = 1e-9;
constexpr double kPowerTol = 1e-9;         // relative residual, inner solves
constexpr double kInterferenceTol = 1e-7;  // relative residual, outer solves
constexpr double kSlack = 1e-9;

const double kNaN = std::numeric_limits<double>::quiet_NaN();

// Root of a decreasing f on (0, hi] with f(hi) <= 0, searched in log space.
// The lower end starts at `lo_guess` and moves down until f > 0.
double solve_down(const std::function<double(double)>& f, double hi, double lo_guess,
                  double tol, const std::string& what) {
  double f_hi = f(hi);
  if (std::abs(f_hi) <= tol) return hi;
  if (f_hi > 0) {
    throw NumericFailure(what + ": residual " + std::to_string(f_hi) +
                         " is positive at the upper bound " + std::to_string(hi));
  }
  double lo = std::min(lo_guess, 0.5 * hi);
  double f_lo = f(lo);
  for (int i = 0; f_lo <= 0; ++i) {
    if (std::abs(f_lo) <= tol) return lo;
    if (i == 200) {
      throw Infeasible(what + ": budget cannot be reached for any multiplier above " +
                       std::to_string(lo));
    }
    hi = lo;
    f_hi = f_lo;
    lo *= 0.25;
    f_lo = f(lo);
  }
  auto in_log = [&](double y) { return f(std::exp(y)); };
  return std::exp(numeric::solve_bracketed(in_log, std::log(lo), std::log(hi), f_lo, f_hi, tol,
                                           200, what));
}

struct Problem {
  const FadingModel& h;
  const FadingModel& g;
  int n;
  double p;
  int evals = 0;

  ConstraintFunctionals at(double lambda, double mu) {
    ++evals;
    return evaluate_functionals(h, g, n, lambda, mu, joint_threshold(h, g, lambda, mu, p));
  }
  ConstraintFunctionals at_tau(double lambda, double mu, double tau) {
    ++evals;
    return evaluate_functionals(h, g, n, lambda, mu, tau);
  }
};

Calibration finish(Problem& pr, double lambda, double mu, ActiveSet active,
                   std::optional<double> p_ave, double q_ave) {
  Calibration c;
  c.functionals = pr.at(lambda, mu);
  c.multipliers = {lambda, mu, c.functionals.threshold, pr.p, false};
  c.active = active;
  c.power_residual = p_ave ? c.functionals.avg_power / *p_ave - 1.0 : kNaN;
  c.interference_residual = c.functionals.avg_interference / q_ave - 1.0;
  c.threshold_premise = c.functionals.threshold >= 1.0;
  c.evaluations = pr.evals;
  return c;
}

// Both budgets; complementary slackness by trying single-constraint
// solutions first.
Calibration solve_two_budgets(Problem& pr, double p_ave, double q_ave) {
  const double np = pr.n * pr.p;
  const double lambda_max = np / p_ave;
  const double mu_max = np / q_ave;
  auto power_res = [&](double lambda, double mu) {
    return pr.at(lambda, mu).avg_power / p_ave - 1.0;
  };

  const double lambda_a = solve_down([&](double l) { return power_res(l, 0.0); }, lambda_max,
                                     0.5 * lambda_max, kPowerTol, "power budget (mu = 0)");
  if (pr.at(lambda_a, 0.0).avg_interference <= q_ave * (1.0 + kSlack)) {
    return finish(pr, lambda_a, 0.0, ActiveSet::PowerOnly, p_ave, q_ave);
  }

  // lambda = 0 is only admissible when E[1/g] is finite.
  const bool lambda_zero_ok = std::isfinite(pr.g.mean_inverse());
  double mu_hi = mu_max;
  if (lambda_zero_ok) {
    const double mu_b = solve_down(
        [&](double m) { return pr.at(0.0, m).avg_interference / q_ave - 1.0; }, mu_max,
        0.5 * mu_max, kInterferenceTol, "interference budget (lambda = 0)");
    if (pr.at(0.0, mu_b).avg_power <= p_ave * (1.0 + kSlack)) {
      return finish(pr, 0.0, mu_b, ActiveSet::InterferenceOnly, p_ave, q_ave);
    }
    mu_hi = mu_b;
  }

  double lambda_guess = lambda_a;
  auto lambda_of = [&](double mu) {
    if (lambda_zero_ok && pr.at(0.0, mu).avg_power <= p_ave) return 0.0;
    const double l = solve_down([&](double x) { return power_res(x, mu); }, lambda_max,
                                0.5 * lambda_guess, kPowerTol, "power budget");
    lambda_guess = l;
    return l;
  };
  const double mu_c = solve_down(
      [&](double m) { return pr.at(lambda_of(m), m).avg_interference / q_ave - 1.0; }, mu_hi,
      1e-2 * mu_hi, kInterferenceTol, "interference budget");
  return finish(pr, lambda_of(mu_c), mu_c, ActiveSet::Both, p_ave, q_ave);
}

// Interference budget only; the ratio threshold does not depend on mu.
Calibration solve_interference_only(Problem& pr, double q_ave, double t_ratio,
                                    std::optional<double> p_ave) {
  const double mu_max = pr.n * pr.p / q_ave;
  const double mu = solve_down(
      [&](double m) { return pr.at_tau(0.0, m, t_ratio / m).avg_interference / q_ave - 1.0; },
      mu_max, 0.5 * mu_max, kInterferenceTol, "interference budget");
  Calibration c;
  c.functionals = pr.at_tau(0.0, mu, t_ratio / mu);
  c.multipliers = {0.0, mu, t_ratio, pr.p, true};
  c.active = ActiveSet::InterferenceOnly;
  c.power_residual = p_ave ? c.functionals.avg_power / *p_ave - 1.0 : kNaN;
  c.interference_residual = c.functionals.avg_interference / q_ave - 1.0;
  c.threshold_premise = c.functionals.threshold >= 1.0;
  c.evaluations = pr.evals;
  return c;
}

}  // namespace

double tail_moment_log(const FadingModel& h, double a) {
  if (!(a > 0.0)) throw DomainError("tail moment needs a > 0");
  if (h.kind() == FadingKind::Rayleigh) return boost::math::expint(1, a);
  if (a >= 1.0) {
    return numeric::integrate_half_line([&](double t) { return h.survival(a * std::exp(t)); },
                                        0.0, kInnerRelTol);
  }
  // int_a^1 S(x)/x dx with x = e^{-t}.
  return tail_moment_log(h, 1.0) +
         numeric::integrate_finite([&](double t) { return h.survival(std::exp(-t)); }, 0.0,
                                   -std::log(a), kInnerRelTol);
}

double tail_moment_inv(const FadingModel& h, double a) {
  if (!(a > 0.0)) throw DomainError("tail moment needs a > 0");
  if (h.kind() == FadingKind::Rayleigh) return boost::math::expint(2, a) / a;
  // x = a e^t keeps the integrand bounded by e^{-t}.
  return numeric::integrate_half_line(
             [&](double t) { return h.survival(a * std::exp(t)) * std::exp(-t); }, 0.0,
             kInnerRelTol) /
         a;
}

double head_moment_inv(const FadingModel& h, double a) {
  if (!(a > 0.0)) throw DomainError("head moment needs a > 0");
  if (h.kind() == FadingKind::Rayleigh) return -std::expm1(-a) / a + boost::math::expint(1, a);
  if (a >= 1.0) {
    return numeric::integrate_half_line(
               [&](double t) { return h.cdf(a * std::exp(t)) * std::exp(-t); }, 0.0,
               kInnerRelTol) /
           a;
  }
  // int_a^1 F(x)/x^2 dx with x = e^{-t}.
  return head_moment_inv(h, 1.0) +
         numeric::integrate_finite([&](double t) { return h.cdf(std::exp(-t)) * std::exp(t); },
                                   0.0, -std::log(a), kInnerRelTol);
}

double joint_threshold(const FadingModel& h, const FadingModel& g, double lambda, double mu,
                       double p) {
  if (!(p > 0.0)) throw DomainError("transmission probability must be positive");
  if (p >= 1.0) return 0.0;
  if (mu == 0.0) return h.quantile_upper(p) / lambda;
  if (lambda == 0.0) return JointStateDistribution(h, g, 0.0, 1.0).quantile_upper(p) / mu;
  return JointStateDistribution(h, g, 1.0, mu / lambda).quantile_upper(p) / lambda;
}

ConstraintFunctionals evaluate_functionals(const FadingModel& h, const FadingModel& g,
                                           int n_users, double lambda, double mu,
                                           double tau) {
  if (!(lambda >= 0.0 && mu >= 0.0 && lambda + mu > 0.0) || !(tau >= 0.0)) {
    throw InvalidParameter("functionals need lambda, mu >= 0 (not both zero) and tau >= 0");
  }
  // Given g, with w = lambda + mu g and a = max(tau, 1) w (P > 0 iff h > a):
  //   E[P | g]            = S(a) (1/w - 1/a) + I_2(a)
  //   E[log(1 + hP) | g]  = S(a) log(a/w) + I_1(a)
  // With lambda = 0 the power term behaves like 1/(mu g) near g = 0, too
  // singular for the truncated rule; it is integrated as
  //   E[P | g] = 1/(mu g) - [(k - 1) F(a)/a + J(a)]
  // with E[1/g] taken in closed form.
  const double k = std::max(tau, 1.0);
  const double g_inv_mean = g.mean_inverse();
  const bool power_finite = lambda > 0.0 || std::isfinite(g_inv_mean);
  auto inner = [&](double gv) {
    const double w = lambda + mu * gv;
    const double a = k * w;
    const double s = h.survival(a);
    const double i2 = tail_moment_inv(h, a);
    double ep = 0.0;
    if (lambda > 0.0) {
      ep = s * (1.0 / w - 1.0 / a) + i2;
    } else if (power_finite) {
      ep = (k - 1.0) * h.cdf(a) / a + head_moment_inv(h, a);
    }
    const double gep = lambda == 0.0 ? s * (1.0 - 1.0 / k) / mu + gv * i2 : gv * ep;
    const double elog = s * std::log(k) + tail_moment_log(h, a);
    return std::array<double, 4>{s, ep, gep, elog};
  };

  std::array<double, 4> v{};
  if (mu == 0.0) {
    v = inner(0.0);
    v[2] = v[1] * g.mean();
  } else {
    const auto grid = InterferenceGrid::for_model(g);
    auto f = [&](int lev, std::size_t i) { return inner(grid->level(lev)[i]); };
    v = numeric::integrate_unit<4>(grid->rule(), f, kOuterAbsTol, kOuterRelTol,
                                   "constraint functionals")
            .value;
  }
  ConstraintFunctionals out;
  out.tx_prob = v[0];
  if (!power_finite) {
    out.avg_power = kNaN;
  } else if (lambda > 0.0) {
    out.avg_power = n_users * v[1];
  } else {
    out.avg_power = n_users * (g_inv_mean / mu - v[1]);
  }
  out.avg_interference = n_users * v[2];
  out.avg_log_term = v[3];
  out.threshold = tau;
  return out;
}

ConstraintFunctionals constraint_functionals(const NetworkConfig& config, double lambda,
                                             double mu) {
  config.validate();
  const int n = config.regime == Regime::Orthogonal ? 1 : config.N;
  return evaluate_functionals(
      config.direct, config.interference, n, lambda, mu,
      joint_threshold(config.direct, config.interference, lambda, mu, config.p()));
}

Calibration calibrate_dtpil(const NetworkConfig& config) {
  config.validate();
  if (config.regime != Regime::DTPIL) throw InvalidParameter("calibrate_dtpil needs DTPIL");
  Problem pr{config.direct, config.interference, config.N, config.p()};
  return solve_two_budgets(pr, *config.P_ave, config.Q_ave);
}

Calibration calibrate_dil(const NetworkConfig& config) {
  config.validate();
  if (config.regime != Regime::DIL) throw InvalidParameter("calibrate_dil needs DIL");
  Problem pr{config.direct, config.interference, config.N, config.p()};
  const double t_ratio =
      JointStateDistribution(config.direct, config.interference, 0.0, 1.0)
          .quantile_upper(pr.p);
  return solve_interference_only(pr, config.Q_ave, t_ratio, std::nullopt);
}

Calibration calibrate_orthogonal(const NetworkConfig& config) {
  config.validate();
  Problem pr{config.direct, config.interference, 1, 1.0};
  if (config.P_ave) return solve_two_budgets(pr, *config.P_ave, config.Q_ave);
  return solve_interference_only(pr, config.Q_ave, 0.0, std::nullopt);
}

Calibration calibrate(const NetworkConfig& config) {
  switch (config.regime) {
    case Regime::DTPIL: return calibrate_dtpil(config);
    case Regime::DIL: return calibrate_dil(config);
    case Regime::Orthogonal: return calibrate_orthogonal(config);
  }
  throw InvalidParameter("unknown regime");
}

}  // namespace cogup
