/*
 * SPDX-License-Identifier: Apache-2.0
 */

#include "cogup/simulate.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <thread>
#include <vector>

#include "cogup/error.hpp"

namespace cogup {

namespace {

constexpr std::uint64_t kChunk = 1024;

struct Sums {
  double rate = 0, rate2 = 0;
  double success = 0;
  double power = 0, power2 = 0;
  double interf = 0, interf2 = 0;
  double tx = 0;

  void add(const BlockOutcome& b) {
    rate += b.delivered_rate;
    rate2 += b.delivered_rate * b.delivered_rate;
    success += b.transmitter_count == 1 ? 1.0 : 0.0;
    power += b.total_power;
    power2 += b.total_power * b.total_power;
    interf += b.total_interference;
    interf2 += b.total_interference * b.total_interference;
    tx += b.transmitter_count;
  }
  void merge(const Sums& o) {
    rate += o.rate;
    rate2 += o.rate2;
    success += o.success;
    power += o.power;
    power2 += o.power2;
    interf += o.interf;
    interf2 += o.interf2;
    tx += o.tx;
  }
};

Estimate estimate(double sum, double sum2, double n) {
  Estimate e;
  e.mean = sum / n;
  if (n < 2) {
    e.ci = std::numeric_limits<double>::quiet_NaN();
    return e;
  }
  const double var = std::max(0.0, (sum2 - n * e.mean * e.mean) / (n - 1));
  e.ci = 1.96 * std::sqrt(var / n);
  return e;
}

}  // namespace

std::uint64_t substream_seed(std::uint64_t seed, std::uint64_t index) {
  auto mix = [](std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  };
  return mix(mix(seed) ^ index);
}

BlockOutcome simulate_block(const NetworkConfig& config, const Multipliers& m, Rng& rng) {
  const int users = config.regime == Regime::Orthogonal ? 1 : config.N;
  auto draw_h = config.direct.sampler();
  auto draw_g = config.interference.sampler();
  BlockOutcome out;
  double tx_rate = 0.0;
  for (int i = 0; i < users; ++i) {
    const double h = draw_h(rng);
    const double g = draw_g(rng);
    double state;
    double power;
    if (m.ratio_threshold) {
      state = h / g;
      power = dil_power(h, g, m);
    } else {
      state = h / (m.lambda + m.mu * g);
      power = dtpil_power(h, g, m);
    }
    if (state > out.max_state) {
      out.second_state = out.max_state;
      out.max_state = state;
    } else if (state > out.second_state) {
      out.second_state = state;
    }
    if (power > 0.0) {
      ++out.transmitter_count;
      out.total_power += power;
      out.total_interference += g * power;
      tx_rate = std::log1p(h * power);
    }
  }
  out.delivered_rate = out.transmitter_count == 1 ? tx_rate : 0.0;
  return out;
}

SimEstimate run_monte_carlo(const NetworkConfig& config, const Multipliers& m,
                            std::uint64_t blocks, std::uint64_t seed, unsigned threads) {
  config.validate();
  if (blocks == 0) throw InvalidParameter("run_monte_carlo needs at least one block");
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  const std::uint64_t chunks = (blocks + kChunk - 1) / kChunk;
  std::vector<Sums> partial(chunks);
  std::atomic<std::uint64_t> next{0};
  auto worker = [&] {
    for (std::uint64_t c = next++; c < chunks; c = next++) {
      Sums s;
      const std::uint64_t end = std::min(blocks, (c + 1) * kChunk);
      for (std::uint64_t b = c * kChunk; b < end; ++b) {
        Rng rng(substream_seed(seed, b));
        s.add(simulate_block(config, m, rng));
      }
      partial[c] = s;
    }
  };
  const unsigned n_threads = static_cast<unsigned>(std::min<std::uint64_t>(threads, chunks));
  if (n_threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < n_threads; ++t) pool.emplace_back(worker);
  }
  // Fixed merge order keeps the floating-point sums independent of scheduling.
  Sums total;
  for (const auto& s : partial) total.merge(s);
  const double n = static_cast<double>(blocks);
  SimEstimate est;
  est.sum_rate = estimate(total.rate, total.rate2, n);
  est.success_prob = estimate(total.success, total.success, n);
  est.avg_power = estimate(total.power, total.power2, n);
  est.avg_interference = estimate(total.interf, total.interf2, n);
  est.mean_transmitters = total.tx / n;
  est.blocks = blocks;
  est.seed = seed;
  est.ci_defined = blocks >= 2;
  return est;
}

double semi_analytic_rate(const NetworkConfig& config, const Multipliers& m) {
  config.validate();
  const int n = config.regime == Regime::Orthogonal ? 1 : config.N;
  const auto f = evaluate_functionals(config.direct, config.interference, n, m.lambda, m.mu,
                                      m.joint_threshold());
  return n * std::exp((n - 1) * std::log1p(-f.tx_prob)) * f.avg_log_term;
}

BaselineResult orthogonal_baseline(const NetworkConfig& config, std::uint64_t blocks,
                                   std::uint64_t seed, unsigned threads) {
  NetworkConfig ortho = config;
  ortho.regime = Regime::Orthogonal;
  BaselineResult out;
  out.calibration = calibrate_orthogonal(ortho);
  out.semi_analytic = semi_analytic_rate(ortho, out.calibration.multipliers);
  if (blocks > 0) {
    out.estimate = run_monte_carlo(ortho, out.calibration.multipliers, blocks, seed, threads);
  }
  return out;
}

}  // namespace cogup
