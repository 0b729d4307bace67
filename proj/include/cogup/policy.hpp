/*
 * SPDX-License-Identifier: Apache-2.0
 */

#pragma once

#include <cstddef>
#include <vector>

#include "cogup/fading.hpp"

namespace cogup {

/// Calibrated dual variables and transmission threshold.
///
/// `threshold` is in units of h/(lambda + mu g) when `ratio_threshold` is
/// false, and in units of h/g when it is true (the interference-only
/// regime, where lambda is zero).
struct Multipliers {
  double lambda = 0.0;
  double mu = 0.0;
  double threshold = 0.0;
  double p = 1.0;
  bool ratio_threshold = false;

  /// Threshold on h/(lambda + mu g) regardless of the stored units.
  double joint_threshold() const {
    return ratio_threshold ? threshold / mu : threshold;
  }
};

/// (1/(lambda + mu g) - 1/h)^+.
double waterfill_power(double h, double g, double lambda, double mu);

/// Water-filling gated by h/(lambda + mu g) > threshold (strict).
double dtpil_power(double h, double g, const Multipliers& m);

/// Water-filling at level 1/(mu g) gated by h/g > threshold (strict).
double dil_power(double h, double g, const Multipliers& m);

/// One state of a discretized channel law.
struct DiscreteState {
  double h;
  double g;
  double prob;
};

/// Random test instance: `n_states` equiprobable (h, g) draws from the
/// given laws, p_target = k/n_states for k in [1, n_states/2], and budgets
/// drawn log-uniformly (P in [-5, 15] dB, Q in [-10, 5] dB).
struct DiscreteInstance {
  std::vector<DiscreteState> states;
  double p_target = 0.0;
  double p_budget = 0.0;
  double q_budget = 0.0;
};
DiscreteInstance random_discrete_instance(const FadingModel& h, const FadingModel& g,
                                          int n_states, Rng& rng);

/// Exhaustive optimum over transmit sets for a discrete channel law:
/// every subset whose probability sums to p_target is water-filled under
/// both budgets, and the best is kept.
struct BruteForceResult {
  std::vector<bool> transmit;  // states of the best subset with P > 0
  std::vector<double> power;
  double value = 0.0;          // sum_i prob_i log(1 + h_i P_i)
  double lambda = 0.0;         // duals of the best subset
  double mu = 0.0;
  std::size_t sets_checked = 0;
};

/// Throws InvalidParameter on bad input and Infeasible (listing the
/// closest achievable set probabilities) when no subset sums to p_target.
BruteForceResult brute_force_policy_search(const std::vector<DiscreteState>& states,
                                           double p_target, double p_budget,
                                           double q_budget);

/// Threshold water-filling on a discrete law: for every ordering of the
/// states by h/(lambda + mu g) (one per interval of mu/lambda), the top
/// states with total probability p_target are water-filled under both
/// budgets, and the best is kept. `self_consistent` is set when the
/// water-filling duals reproduce the ordering that selected the set; on
/// coarse discrete laws this can fail because set selection under an exact
/// probability constraint is combinatorial.
struct ThresholdPolicyResult {
  Multipliers multipliers;  // duals of the chosen set; threshold between in and out keys
  std::vector<bool> transmit;
  std::vector<double> power;
  double value = 0.0;
  bool found = false;
  bool self_consistent = false;
};

ThresholdPolicyResult threshold_policy_discrete(const std::vector<DiscreteState>& states,
                                                double p_target, double p_budget,
                                                double q_budget);

/// True if `set` is the strict top of the states by h/(lambda + mu g) for
/// some lambda, mu >= 0 (not both zero).
bool is_threshold_set(const std::vector<DiscreteState>& states, const std::vector<bool>& set);

/// True if every state in `set` has h/(lambda + mu g) at least as large as
/// every state outside it (relative slack `tol`).
bool is_superlevel_set(const std::vector<DiscreteState>& states, const std::vector<bool>& set,
                       double lambda, double mu, double tol = 1e-9);

}  // namespace cogup
