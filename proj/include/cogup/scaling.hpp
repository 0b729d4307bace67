/*
 * SPDX-License-Identifier: Apache-2.0
 */

#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "cogup/calibrate.hpp"
#include "cogup/network.hpp"
#include "cogup/simulate.hpp"

namespace cogup {

struct ScalingOptions {
  std::uint64_t blocks = 0;  // 0: semi-analytic rates only
  std::uint64_t seed = 1;
  bool baseline = false;
  std::uint64_t baseline_blocks = 0;  // 0: use `blocks`
  unsigned threads = 0;
};

struct ScalingRow {
  int N = 0;
  double p = 0.0;
  Calibration calibration;
  bool simulated = false;
  SimEstimate sim;
  double semi_analytic_rate = 0.0;
  double baseline_rate = std::numeric_limits<double>::quiet_NaN();
  double baseline_ci = std::numeric_limits<double>::quiet_NaN();
  std::uint64_t seed = 0;
  std::string status = "ok";

  bool ok() const { return status == "ok"; }
  /// Monte Carlo estimate when simulated, otherwise the semi-analytic rate.
  double sum_rate() const { return simulated ? sim.sum_rate.mean : semi_analytic_rate; }
};

struct ScalingTable {
  NetworkConfig config;  // N and p_rule as run; N is the last grid point
  std::vector<ScalingRow> rows;
};

/// Calibrates (and optionally simulates) every N of a strictly increasing
/// grid. Row seeds are substream_seed(seed, N), so tables with different p
/// rules share channel draws per N. A failing row keeps its error text in
/// `status` and the sweep continues.
ScalingTable scaling_experiment(const NetworkConfig& config, const std::vector<int>& n_grid,
                                const ScalingOptions& options);

enum class ScalingLaw { LogN, LogLogN };
enum class FitWindow { TopHalf, All };

struct FitResult {
  ScalingLaw law = ScalingLaw::LogN;
  double fitted_prelog = 0.0;
  double theory_prelog = 0.0;
  double fitted_intercept = 0.0;
  double theory_intercept = 0.0;
  double relative_error = 0.0;  // |fitted - theory| / theory, pre-log
  std::size_t rows_used = 0;
};

/// Least squares of sum_rate on log N (LogN) or log log N (LogLogN) over
/// the ok rows. Throws DomainError with fewer than 4 usable rows.
FitResult fit_scaling(const ScalingTable& table, ScalingLaw law,
                      FitWindow window = FitWindow::TopHalf);

/// Law matching the regime: LogLogN for DTPIL, LogN otherwise.
ScalingLaw law_for(Regime regime);

struct PnOptimum {
  double p_star = 0.0;
  double rate = 0.0;               // semi-analytic rate at p_star
  double rate_one_over_n = 0.0;    // semi-analytic rate at p = 1/N
  bool unimodal = true;            // coarse scan had a single peak
  std::vector<std::pair<double, double>> scan;  // (N p, rate)
};

/// Maximizes the semi-analytic rate over p in (0, min(0.5, 20/N)),
/// recalibrating at every candidate: log-spaced coarse scan, then golden
/// section around the best scan point. A multi-peaked scan falls back to
/// the scan argmax and clears `unimodal`.
PnOptimum optimize_pn(const NetworkConfig& config, int n);

/// One table per rule, sharing per-N seeds.
std::vector<ScalingTable> pn_comparison(const NetworkConfig& config,
                                        const std::vector<int>& n_grid,
                                        const std::vector<PRule>& rules,
                                        const ScalingOptions& options);

}  // namespace cogup
