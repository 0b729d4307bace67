/*
 * SPDX-License-Identifier: Apache-2.0
 */

#include "cogup/scaling.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "cogup/error.hpp"

namespace cogup {

namespace {

constexpr std::uint64_t kBaselineStream = 0x6261736531ULL;
constexpr int kScanPoints = 25;

double rate_at(const NetworkConfig& base, int n, double p) {
  NetworkConfig c = base;
  c.N = n;
  c.p_rule = PRule::fixed(p);
  const auto cal = calibrate(c);
  return semi_analytic_rate(c, cal.multipliers);
}

}  // namespace

ScalingTable scaling_experiment(const NetworkConfig& config, const std::vector<int>& n_grid,
                                const ScalingOptions& options) {
  if (n_grid.empty()) throw InvalidParameter("empty N grid");
  for (std::size_t i = 0; i < n_grid.size(); ++i) {
    if (n_grid[i] < 2 || (i > 0 && n_grid[i] <= n_grid[i - 1])) {
      throw InvalidParameter("N grid must be strictly increasing with N >= 2");
    }
  }
  ScalingTable table;
  table.config = config;

  BaselineResult baseline;
  bool have_baseline = false;
  if (options.baseline) {
    NetworkConfig ortho = config;
    ortho.regime = Regime::Orthogonal;
    ortho.N = 1;
    baseline = orthogonal_baseline(ortho, 0, 0, options.threads);
    have_baseline = true;
  }
  const std::uint64_t baseline_blocks =
      options.baseline_blocks ? options.baseline_blocks : options.blocks;

  for (const int n : n_grid) {
    ScalingRow row;
    row.N = n;
    row.seed = substream_seed(options.seed, static_cast<std::uint64_t>(n));
    try {
      NetworkConfig c = config;
      c.N = n;
      if (c.p_rule.kind == PRule::Kind::Optimized) {
        c.p_rule = PRule::fixed(optimize_pn(c, n).p_star);
      }
      row.p = c.p();
      row.calibration = calibrate(c);
      row.semi_analytic_rate = semi_analytic_rate(c, row.calibration.multipliers);
      if (options.blocks > 0) {
        row.sim = run_monte_carlo(c, row.calibration.multipliers, options.blocks, row.seed,
                                  options.threads);
        row.simulated = true;
      }
      if (have_baseline) {
        if (baseline_blocks > 0) {
          NetworkConfig ortho = c;
          ortho.regime = Regime::Orthogonal;
          const auto est =
              run_monte_carlo(ortho, baseline.calibration.multipliers, baseline_blocks,
                              substream_seed(row.seed, kBaselineStream), options.threads);
          row.baseline_rate = est.sum_rate.mean;
          row.baseline_ci = est.sum_rate.ci;
        } else {
          row.baseline_rate = baseline.semi_analytic;
          row.baseline_ci = 0.0;
        }
      }
    } catch (const std::exception& e) {
      row.status = std::string("error: ") + e.what();
    }
    table.rows.push_back(std::move(row));
  }
  table.config.N = n_grid.back();
  return table;
}

ScalingLaw law_for(Regime regime) {
  return regime == Regime::DTPIL ? ScalingLaw::LogLogN : ScalingLaw::LogN;
}

FitResult fit_scaling(const ScalingTable& table, ScalingLaw law, FitWindow window) {
  std::vector<const ScalingRow*> rows;
  for (const auto& r : table.rows) {
    if (r.ok()) rows.push_back(&r);
  }
  if (window == FitWindow::TopHalf) {
    rows.erase(rows.begin(), rows.begin() + static_cast<std::ptrdiff_t>(rows.size() / 2));
  }
  if (rows.size() < 4 && window == FitWindow::All) {
    throw DomainError("fit_scaling needs at least 4 rows, got " + std::to_string(rows.size()));
  }
  if (rows.size() < 4) {
    throw DomainError("fit_scaling needs at least 4 rows in the top half of the grid, got " +
                      std::to_string(rows.size()));
  }
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (const auto* r : rows) {
    const double x = law == ScalingLaw::LogN ? std::log(r->N) : std::log(std::log(r->N));
    const double y = r->sum_rate();
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double n = static_cast<double>(rows.size());
  const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  FitResult out;
  out.law = law;
  out.fitted_prelog = slope;
  out.fitted_intercept = (sy - slope * sx) / n;
  const double e = std::numbers::e;
  const auto& cfg = table.config;
  if (law == ScalingLaw::LogN) {
    out.theory_prelog = 1.0 / (e * cfg.interference.class_c_params().gamma);
    out.theory_intercept = std::log(cfg.Q_ave) / e;
  } else {
    out.theory_prelog = 1.0 / (e * cfg.direct.class_c_params().n);
    out.theory_intercept = cfg.P_ave ? std::log(*cfg.P_ave) / e
                                     : std::numeric_limits<double>::quiet_NaN();
  }
  out.relative_error = std::abs(out.fitted_prelog - out.theory_prelog) / out.theory_prelog;
  out.rows_used = rows.size();
  return out;
}

PnOptimum optimize_pn(const NetworkConfig& config, int n) {
  if (n < 2) throw InvalidParameter("optimize_pn needs N >= 2");
  PnOptimum out;
  const double a_max = std::min(0.5 * n, 20.0);
  const double a_min = std::min(0.05, 0.1 * a_max);
  const double la = std::log(a_min);
  const double lb = std::log(a_max);
  std::vector<double> xs(kScanPoints);
  std::vector<double> rates(kScanPoints);
  for (int i = 0; i < kScanPoints; ++i) {
    xs[i] = la + (lb - la) * i / (kScanPoints - 1);
    rates[i] = rate_at(config, n, std::exp(xs[i]) / n);
    out.scan.emplace_back(std::exp(xs[i]), rates[i]);
  }
  const auto best = static_cast<int>(std::max_element(rates.begin(), rates.end()) - rates.begin());
  for (int i = 1; i < kScanPoints; ++i) {
    const bool rising = rates[i] > rates[i - 1] * (1 + 1e-9);
    const bool falling = rates[i] < rates[i - 1] * (1 - 1e-9);
    if ((i <= best && falling) || (i > best && rising)) out.unimodal = false;
  }
  out.rate_one_over_n = rate_at(config, n, 1.0 / n);
  if (!out.unimodal) {
    out.p_star = std::exp(xs[best]) / n;
    out.rate = rates[best];
    return out;
  }
  // Golden section on log(N p) inside the neighbouring scan points.
  double lo = xs[std::max(best - 1, 0)];
  double hi = xs[std::min(best + 1, kScanPoints - 1)];
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = hi - inv_phi * (hi - lo);
  double x2 = lo + inv_phi * (hi - lo);
  double f1 = rate_at(config, n, std::exp(x1) / n);
  double f2 = rate_at(config, n, std::exp(x2) / n);
  while (hi - lo > 1e-3) {
    if (f1 < f2) {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + inv_phi * (hi - lo);
      f2 = rate_at(config, n, std::exp(x2) / n);
    } else {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - inv_phi * (hi - lo);
      f1 = rate_at(config, n, std::exp(x1) / n);
    }
  }
  const double x = 0.5 * (lo + hi);
  out.p_star = std::exp(x) / n;
  out.rate = rate_at(config, n, out.p_star);
  if (rates[best] > out.rate) {
    out.p_star = std::exp(xs[best]) / n;
    out.rate = rates[best];
  }
  return out;
}

std::vector<ScalingTable> pn_comparison(const NetworkConfig& config,
                                        const std::vector<int>& n_grid,
                                        const std::vector<PRule>& rules,
                                        const ScalingOptions& options) {
  if (rules.empty()) throw InvalidParameter("pn_comparison needs at least one p rule");
  std::vector<ScalingTable> out;
  for (const auto& rule : rules) {
    NetworkConfig c = config;
    c.p_rule = rule;
    out.push_back(scaling_experiment(c, n_grid, options));
  }
  return out;
}

}  // namespace cogup
