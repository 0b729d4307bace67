/*
 * SPDX-License-Identifier: Apache-2.0
 */

#include "cogup/policy.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <sstream>
#include <string>

#include "cogup/error.hpp"

namespace cogup {

double waterfill_power(double h, double g, double lambda, double mu) {
  const double level = 1.0 / (lambda + mu * g);
  const double p = level - 1.0 / h;
  return p > 0.0 ? p : 0.0;
}

double dtpil_power(double h, double g, const Multipliers& m) {
  const double w = m.lambda + m.mu * g;
  if (!(h > m.threshold * w)) return 0.0;
  return waterfill_power(h, g, m.lambda, m.mu);
}

double dil_power(double h, double g, const Multipliers& m) {
  if (!(h > m.threshold * g)) return 0.0;
  return waterfill_power(h, g, 0.0, m.mu);
}

namespace {

constexpr int kBisectSteps = 200;
constexpr double kProbTol = 1e-9;

using Mask = std::uint32_t;

// Water-filling restricted to a permitted set, with its own dual search.
// Plain bisection throughout; this is the reference the continuous-law
// calibration is checked against, so it shares no code with it.
struct SetSolver {
  const std::vector<DiscreteState>& states;
  Mask mask;
  double p_budget;
  double q_budget;

  double power(double lambda, double mu) const {
    double s = 0.0;
    for (std::size_t i = 0; i < states.size(); ++i) {
      if (mask >> i & 1u) s += states[i].prob * waterfill_power(states[i].h, states[i].g, lambda, mu);
    }
    return s;
  }
  double interference(double lambda, double mu) const {
    double s = 0.0;
    for (std::size_t i = 0; i < states.size(); ++i) {
      if (mask >> i & 1u) {
        s += states[i].prob * states[i].g *
             waterfill_power(states[i].h, states[i].g, lambda, mu);
      }
    }
    return s;
  }

  // Root of a decreasing f on [lo, hi] with f(lo) > 0 >= f(hi).
  template <class F>
  static double bisect(F&& f, double lo, double hi) {
    for (int i = 0; i < kBisectSteps && hi - lo > 1e-15 * hi; ++i) {
      const double mid = 0.5 * (lo + hi);
      if (f(mid) > 0) {
        lo = mid;
      } else {
        hi = mid;
      }
    }
    return 0.5 * (lo + hi);
  }

  double max_h() const {
    double m = 0.0;
    for (std::size_t i = 0; i < states.size(); ++i) {
      if (mask >> i & 1u) m = std::max(m, states[i].h);
    }
    return m;
  }
  double max_h_over_g() const {
    double m = 0.0;
    for (std::size_t i = 0; i < states.size(); ++i) {
      if (mask >> i & 1u) m = std::max(m, states[i].h / states[i].g);
    }
    return m;
  }

  double lambda_for_power(double mu) const {
    if (mu > 0 && power(0.0, mu) <= p_budget) return 0.0;
    return bisect([&](double l) { return power(l, mu) - p_budget; }, 0.0, max_h());
  }

  std::pair<double, double> solve() const {
    const double la = bisect([&](double l) { return power(l, 0.0) - p_budget; }, 0.0, max_h());
    if (interference(la, 0.0) <= q_budget * (1 + 1e-12)) return {la, 0.0};
    const double mb = bisect([&](double m) { return interference(0.0, m) - q_budget; }, 0.0,
                             max_h_over_g());
    if (power(0.0, mb) <= p_budget * (1 + 1e-12)) return {0.0, mb};
    const double mc = bisect(
        [&](double m) { return interference(lambda_for_power(m), m) - q_budget; }, 0.0, mb);
    return {lambda_for_power(mc), mc};
  }
};

double set_probability(const std::vector<DiscreteState>& states, Mask mask) {
  double s = 0.0;
  for (std::size_t i = 0; i < states.size(); ++i) {
    if (mask >> i & 1u) s += states[i].prob;
  }
  return s;
}

void validate(const std::vector<DiscreteState>& states, double p_target, double p_budget,
              double q_budget) {
  if (states.empty() || states.size() > 20) {
    throw InvalidParameter("discrete policy search needs 1..20 states");
  }
  double total = 0.0;
  for (const auto& s : states) {
    if (!(s.h > 0 && s.g > 0 && s.prob > 0)) {
      throw InvalidParameter("discrete states need h, g, prob > 0");
    }
    total += s.prob;
  }
  if (std::abs(total - 1.0) > 1e-9) {
    throw InvalidParameter("state probabilities sum to " + std::to_string(total));
  }
  if (!(p_target > 0 && p_target <= 1)) {
    throw InvalidParameter("p_target must lie in (0, 1]");
  }
  if (!(p_budget > 0 && q_budget > 0)) {
    throw InvalidParameter("budgets must be positive");
  }
}

std::vector<double> waterfill_powers(const std::vector<DiscreteState>& states, Mask mask,
                                     double lambda, double mu) {
  std::vector<double> out(states.size(), 0.0);
  for (std::size_t i = 0; i < states.size(); ++i) {
    if (mask >> i & 1u) out[i] = waterfill_power(states[i].h, states[i].g, lambda, mu);
  }
  return out;
}

double log_value(const std::vector<DiscreteState>& states, const std::vector<double>& power) {
  double v = 0.0;
  for (std::size_t i = 0; i < states.size(); ++i) {
    v += states[i].prob * std::log1p(states[i].h * power[i]);
  }
  return v;
}

std::vector<bool> to_flags(Mask mask, std::size_t n) {
  std::vector<bool> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = mask >> i & 1u;
  return out;
}

}  // namespace

DiscreteInstance random_discrete_instance(const FadingModel& h, const FadingModel& g,
                                          int n_states, Rng& rng) {
  if (n_states < 2 || n_states > 20) throw InvalidParameter("n_states must lie in [2, 20]");
  DiscreteInstance inst;
  auto draw_h = h.sampler();
  auto draw_g = g.sampler();
  for (int i = 0; i < n_states; ++i) {
    const double hv = draw_h(rng);
    const double gv = draw_g(rng);
    inst.states.push_back({hv, gv, 1.0 / n_states});
  }
  std::uniform_int_distribution<int> k_dist(1, n_states / 2);
  std::uniform_real_distribution<double> p_db(-5.0, 15.0);
  std::uniform_real_distribution<double> q_db(-10.0, 5.0);
  inst.p_target = static_cast<double>(k_dist(rng)) / n_states;
  inst.p_budget = std::pow(10.0, p_db(rng) / 10.0);
  inst.q_budget = std::pow(10.0, q_db(rng) / 10.0);
  return inst;
}

BruteForceResult brute_force_policy_search(const std::vector<DiscreteState>& states,
                                           double p_target, double p_budget,
                                           double q_budget) {
  validate(states, p_target, p_budget, q_budget);
  const std::size_t n = states.size();
  BruteForceResult best;
  best.value = -std::numeric_limits<double>::infinity();
  std::map<double, int> achievable;
  for (Mask mask = 1; mask < (Mask{1} << n); ++mask) {
    const double prob = set_probability(states, mask);
    if (std::abs(prob - p_target) > kProbTol) {
      achievable[prob] += 1;
      continue;
    }
    ++best.sets_checked;
    const SetSolver solver{states, mask, p_budget, q_budget};
    const auto [lambda, mu] = solver.solve();
    const auto power = waterfill_powers(states, mask, lambda, mu);
    const double v = log_value(states, power);
    if (v > best.value) {
      best.value = v;
      best.power = power;
      best.lambda = lambda;
      best.mu = mu;
    }
  }
  if (best.sets_checked == 0) {
    std::vector<double> sums;
    for (const auto& [prob, count] : achievable) sums.push_back(prob);
    std::sort(sums.begin(), sums.end(), [&](double a, double b) {
      return std::abs(a - p_target) < std::abs(b - p_target);
    });
    std::ostringstream msg;
    msg << "no transmit set has probability " << p_target << "; nearest achievable:";
    for (std::size_t i = 0; i < std::min<std::size_t>(3, sums.size()); ++i) {
      msg << ' ' << sums[i];
    }
    throw Infeasible(msg.str());
  }
  best.transmit.resize(n);
  for (std::size_t i = 0; i < n; ++i) best.transmit[i] = best.power[i] > 0.0;
  return best;
}

bool is_superlevel_set(const std::vector<DiscreteState>& states, const std::vector<bool>& set,
                       double lambda, double mu, double tol) {
  double min_in = std::numeric_limits<double>::infinity();
  double max_out = 0.0;
  for (std::size_t i = 0; i < states.size(); ++i) {
    const double key = states[i].h / (lambda + mu * states[i].g);
    if (set[i]) {
      min_in = std::min(min_in, key);
    } else {
      max_out = std::max(max_out, key);
    }
  }
  return min_in >= max_out * (1.0 - tol);
}

namespace {

std::vector<double> ordering_ratios(const std::vector<DiscreteState>& states) {
  // The order by h/(lambda + mu g) depends only on r = mu/lambda and changes
  // only where two keys cross; one representative r per interval suffices.
  const std::size_t n = states.size();
  std::vector<double> crossings;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double den = states[j].h * states[i].g - states[i].h * states[j].g;
      const double r = (states[i].h - states[j].h) / den;
      if (den != 0 && r > 0 && std::isfinite(r)) crossings.push_back(r);
    }
  }
  std::sort(crossings.begin(), crossings.end());
  std::vector<double> probes{0.0};
  for (std::size_t k = 0; k < crossings.size(); ++k) {
    const double next = k + 1 < crossings.size() ? crossings[k + 1] : 2.0 * crossings[k];
    probes.push_back(0.5 * (crossings[k] + next));
  }
  probes.push_back(std::numeric_limits<double>::infinity());
  return probes;
}

double ordering_key(const DiscreteState& s, double r) {
  return std::isinf(r) ? s.h / s.g : s.h / (1.0 + r * s.g);
}

}  // namespace

bool is_threshold_set(const std::vector<DiscreteState>& states, const std::vector<bool>& set) {
  for (const double r : ordering_ratios(states)) {
    double min_in = std::numeric_limits<double>::infinity();
    double max_out = 0.0;
    for (std::size_t i = 0; i < states.size(); ++i) {
      const double key = ordering_key(states[i], r);
      if (set[i]) {
        min_in = std::min(min_in, key);
      } else {
        max_out = std::max(max_out, key);
      }
    }
    if (min_in > max_out) return true;
  }
  return false;
}

ThresholdPolicyResult threshold_policy_discrete(const std::vector<DiscreteState>& states,
                                                double p_target, double p_budget,
                                                double q_budget) {
  validate(states, p_target, p_budget, q_budget);
  const std::size_t n = states.size();

  std::vector<Mask> candidates;
  std::vector<std::size_t> order(n);
  for (const double r : ordering_ratios(states)) {
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](auto a, auto b) {
      return ordering_key(states[a], r) > ordering_key(states[b], r);
    });
    Mask mask = 0;
    double prob = 0.0;
    for (const auto i : order) {
      if (prob >= p_target - kProbTol) break;
      mask |= Mask{1} << i;
      prob += states[i].prob;
    }
    if (std::abs(prob - p_target) <= kProbTol &&
        std::find(candidates.begin(), candidates.end(), mask) == candidates.end()) {
      candidates.push_back(mask);
    }
  }

  ThresholdPolicyResult best;
  best.value = -std::numeric_limits<double>::infinity();
  for (const Mask mask : candidates) {
    const SetSolver solver{states, mask, p_budget, q_budget};
    const auto [lambda, mu] = solver.solve();
    const auto flags = to_flags(mask, n);
    double min_in = std::numeric_limits<double>::infinity();
    double max_out = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double key = states[i].h / (lambda + mu * states[i].g);
      if (flags[i]) {
        min_in = std::min(min_in, key);
      } else {
        max_out = std::max(max_out, key);
      }
    }
    auto power = waterfill_powers(states, mask, lambda, mu);
    const double v = log_value(states, power);
    if (v > best.value) {
      best.value = v;
      best.multipliers = {lambda, mu, 0.5 * (min_in + max_out), p_target, false};
      best.transmit = flags;
      best.power = std::move(power);
      best.self_consistent = min_in > max_out;
      best.found = true;
    }
  }
  return best;
}

}  // namespace cogup
