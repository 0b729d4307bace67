/*
 * SPDX-License-Identifier: Apache-2.0
 */

#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "cogup/fading.hpp"

namespace cogup {

/// DTPIL: total-power and interference budgets; DIL: interference budget
/// only; Orthogonal: one scheduled user per slot, no threshold.
enum class Regime { DTPIL, DIL, Orthogonal };

std::string to_string(Regime r);
Regime parse_regime(std::string_view text);

/// How the per-user transmission probability depends on N.
/// Text forms: "1/N", "c/N" (e.g. "0.25/N"), "fixed:<p>", "optimized".
struct PRule {
  enum class Kind { OneOverN, Scaled, Fixed, Optimized };
  Kind kind = Kind::OneOverN;
  double value = 1.0;  // c for Scaled, p for Fixed

  static PRule one_over_n() { return {}; }
  static PRule scaled(double c);
  static PRule fixed(double p);
  static PRule optimized() { return {Kind::Optimized, 0.0}; }
  static PRule parse(std::string_view text);

  /// Throws DomainError for Optimized (needs a search) or if the result
  /// falls outside (0, 1].
  double probability(int n) const;
  std::string to_string() const;
};

struct NetworkConfig {
  Regime regime = Regime::DTPIL;
  int N = 2;
  PRule p_rule;
  std::optional<double> P_ave;  // linear; unused for DIL
  double Q_ave = 1.0;           // linear
  FadingModel direct = FadingModel::rayleigh();
  FadingModel interference = FadingModel::rayleigh();

  /// Transmission probability for this N (1 for Orthogonal).
  double p() const;
  /// Throws InvalidParameter on missing or out-of-range fields.
  void validate() const;
};

}  // namespace cogup
