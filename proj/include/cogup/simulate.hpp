/*
 * SPDX-License-Identifier: Apache-2.0
 */

#pragma once

#include <cstdint>

#include "cogup/calibrate.hpp"
#include "cogup/fading.hpp"
#include "cogup/network.hpp"
#include "cogup/policy.hpp"

namespace cogup {

/// One fading block of the N-user collision channel.
struct BlockOutcome {
  int transmitter_count = 0;   // users with P > 0
  double delivered_rate = 0.0;  // log(1 + hP) of the sole transmitter, else 0
  double total_power = 0.0;
  double total_interference = 0.0;
  double max_state = 0.0;     // largest state, in threshold units
  double second_state = 0.0;  // second largest (0 when N = 1)
};

struct Estimate {
  double mean = 0.0;
  double ci = 0.0;  // 1.96 standard errors; NaN with a single block
};

struct SimEstimate {
  Estimate sum_rate;          // nats per channel use
  Estimate success_prob;      // P(exactly one transmitter)
  Estimate avg_power;         // total over users, per block
  Estimate avg_interference;  // total over users, per block
  double mean_transmitters = 0.0;
  std::uint64_t blocks = 0;
  std::uint64_t seed = 0;
  bool ci_defined = false;
};

/// Seed of the independent substream for (seed, index); splitmix64 mixing.
std::uint64_t substream_seed(std::uint64_t seed, std::uint64_t index);

/// Draws N (h, g) pairs (one pair for the orthogonal regime) and applies
/// the policy selected by `m.ratio_threshold`.
BlockOutcome simulate_block(const NetworkConfig& config, const Multipliers& m, Rng& rng);

/// Block b uses substream_seed(seed, b); results are bit-identical for any
/// thread count. `threads` = 0 picks the hardware concurrency.
SimEstimate run_monte_carlo(const NetworkConfig& config, const Multipliers& m,
                            std::uint64_t blocks, std::uint64_t seed, unsigned threads = 0);

/// N (1 - p')^{N-1} E[log(1 + hP)] with p' = P(P > 0).
double semi_analytic_rate(const NetworkConfig& config, const Multipliers& m);

/// Orthogonal access with the same long-run budgets: calibrates the
/// single-user water-filling duals, then simulates one user per block.
struct BaselineResult {
  Calibration calibration;
  SimEstimate estimate;
  double semi_analytic = 0.0;
};
BaselineResult orthogonal_baseline(const NetworkConfig& config, std::uint64_t blocks,
                                   std::uint64_t seed, unsigned threads = 0);

}  // namespace cogup
