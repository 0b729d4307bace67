/*
 * SPDX-License-Identifier: Apache-2.0
 */

#include "cogup/network.hpp"

#include <charconv>
#include <cmath>

#include "cogup/error.hpp"

namespace cogup {

namespace {

double parse_positive(std::string_view text, std::string_view what) {
  double v = 0.0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
  if (res.ec != std::errc() || res.ptr != text.data() + text.size() || !(v > 0.0)) {
    throw InvalidParameter("bad " + std::string(what) + " '" + std::string(text) + "'");
  }
  return v;
}

std::string shortest(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

}  // namespace

std::string to_string(Regime r) {
  switch (r) {
    case Regime::DTPIL: return "DTPIL";
    case Regime::DIL: return "DIL";
    case Regime::Orthogonal: return "orthogonal";
  }
  return {};
}

Regime parse_regime(std::string_view text) {
  if (text == "DTPIL" || text == "dtpil") return Regime::DTPIL;
  if (text == "DIL" || text == "dil") return Regime::DIL;
  if (text == "orthogonal" || text == "Orthogonal") return Regime::Orthogonal;
  throw InvalidParameter("unknown regime '" + std::string(text) + "'");
}

PRule PRule::scaled(double c) {
  if (!(c > 0.0)) throw InvalidParameter("p rule c/N needs c > 0");
  return {Kind::Scaled, c};
}

PRule PRule::fixed(double p) {
  if (!(p > 0.0 && p <= 1.0)) throw InvalidParameter("fixed p must lie in (0, 1]");
  return {Kind::Fixed, p};
}

PRule PRule::parse(std::string_view text) {
  if (text == "1/N") return one_over_n();
  if (text == "optimized") return optimized();
  if (text.starts_with("fixed:")) return fixed(parse_positive(text.substr(6), "fixed p"));
  if (text.ends_with("/N")) {
    return scaled(parse_positive(text.substr(0, text.size() - 2), "p rule constant"));
  }
  throw InvalidParameter("unknown p rule '" + std::string(text) + "'");
}

double PRule::probability(int n) const {
  double p = 0.0;
  switch (kind) {
    case Kind::OneOverN: p = 1.0 / n; break;
    case Kind::Scaled: p = value / n; break;
    case Kind::Fixed: p = value; break;
    case Kind::Optimized:
      throw DomainError("optimized p rule has no closed form; run the p search");
  }
  if (!(p > 0.0 && p <= 1.0)) {
    throw DomainError("p rule " + to_string() + " gives p = " + shortest(p) + " at N = " +
                      std::to_string(n));
  }
  return p;
}

std::string PRule::to_string() const {
  switch (kind) {
    case Kind::OneOverN: return "1/N";
    case Kind::Scaled: return shortest(value) + "/N";
    case Kind::Fixed: return "fixed:" + shortest(value);
    case Kind::Optimized: return "optimized";
  }
  return {};
}

double NetworkConfig::p() const {
  if (regime == Regime::Orthogonal) return 1.0;
  return p_rule.probability(N);
}

void NetworkConfig::validate() const {
  if (N < 1 || (regime != Regime::Orthogonal && N < 2)) {
    throw InvalidParameter("N must be >= 2 (got " + std::to_string(N) + ")");
  }
  if (!(Q_ave > 0.0 && std::isfinite(Q_ave))) {
    throw InvalidParameter("Q_ave must be positive and finite");
  }
  if (regime == Regime::DTPIL && !P_ave) {
    throw InvalidParameter("P_ave is required for the DTPIL regime");
  }
  if (P_ave && !(*P_ave > 0.0 && std::isfinite(*P_ave))) {
    throw InvalidParameter("P_ave must be positive and finite");
  }
}

}  // namespace cogup
