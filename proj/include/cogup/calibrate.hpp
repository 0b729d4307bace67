/*
 * SPDX-License-Identifier: Apache-2.0
 */

#pragma once

#include "cogup/fading.hpp"
#include "cogup/network.hpp"
#include "cogup/policy.hpp"

namespace cogup {

/// Per-network expectations of threshold water-filling at fixed
/// multipliers. Power and interference are summed over the N users; the
/// log term and transmit probability are per user.
struct ConstraintFunctionals {
  double avg_power = 0.0;         // N E[P]; NaN when lambda == 0 and E[1/g] diverges
  double avg_interference = 0.0;  // N E[g P]
  double avg_log_term = 0.0;      // E[log(1 + h P)]
  double tx_prob = 0.0;           // P(P > 0)
  double threshold = 0.0;         // joint-state threshold used
};

/// Inner integrals over h beyond a: I_k(a) = int_a^inf (1 - F_h(x)) x^{-k} dx
/// for k = 1, 2. Closed forms for Rayleigh, quadrature otherwise.
double tail_moment_log(const FadingModel& h, double a);
double tail_moment_inv(const FadingModel& h, double a);
/// J(a) = int_a^inf F_h(x) x^{-2} dx, bounded as a -> 0 when gamma_h > 1.
double head_moment_inv(const FadingModel& h, double a);

/// Functionals at an explicit joint-state threshold `tau` (transmit iff
/// h/(lambda + mu g) > tau). `n_users` scales power and interference.
ConstraintFunctionals evaluate_functionals(const FadingModel& h, const FadingModel& g,
                                           int n_users, double lambda, double mu,
                                           double tau);

/// Threshold on h/(lambda + mu g) at which P(state > tau) = p; zero for
/// p >= 1.
double joint_threshold(const FadingModel& h, const FadingModel& g, double lambda, double mu,
                       double p);

/// Functionals at (lambda, mu) with the threshold set from config.p().
ConstraintFunctionals constraint_functionals(const NetworkConfig& config, double lambda,
                                             double mu);

enum class ActiveSet { PowerOnly, InterferenceOnly, Both };

struct Calibration {
  Multipliers multipliers;
  ConstraintFunctionals functionals;
  ActiveSet active = ActiveSet::Both;
  double power_residual = 0.0;         // avg_power / P_ave - 1 (NaN without P_ave)
  double interference_residual = 0.0;  // avg_interference / Q_ave - 1
  bool threshold_premise = false;      // joint threshold >= 1
  int evaluations = 0;                 // functional evaluations used
};

/// Dispatches on config.regime.
Calibration calibrate(const NetworkConfig& config);
Calibration calibrate_dtpil(const NetworkConfig& config);
Calibration calibrate_dil(const NetworkConfig& config);
/// One user per slot, p = 1, no threshold; same long-run budgets.
Calibration calibrate_orthogonal(const NetworkConfig& config);

}  // namespace cogup
