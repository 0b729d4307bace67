/*
 * SPDX-License-Identifier: Apache-2.0
 */

#include "cogup/experiment.hpp"

#include <boost/version.hpp>

#include <algorithm>
#include <cerrno>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <istream>
#include <map>
#include <numbers>
#include <sstream>

#include "cogup/calibrate.hpp"
#include "cogup/policy.hpp"
#include "cogup/scaling.hpp"
#include "cogup/simulate.hpp"

namespace cogup {

namespace {

constexpr const char* kVersion = "1.0.0";
const double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  for (const char c : s) {
    if (c == ',' || c == ' ' || c == '\t') {
      if (!cur.empty()) out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

struct Entry {
  std::string value;
  int line;
};

using Section = std::map<std::string, Entry>;

const std::map<std::string, std::vector<std::string>>& known_keys() {
  static const std::map<std::string, std::vector<std::string>> keys{
      {"run",
       {"experiment", "seed", "blocks", "threads", "units", "rate_units", "baseline",
        "baseline_blocks"}},
      {"network", {"regime", "fading_h", "fading_g", "P_ave", "Q_ave", "p_rule", "N"}},
      {"grid", {"N"}},
      {"pn_sweep", {"rules"}},
      {"oracle_check", {"instances", "min_states", "max_states"}},
      {"versions", {}},
  };
  return keys;
}

class SpecReader {
 public:
  SpecReader(std::istream& in, std::string source) : source_(std::move(source)) {
    std::string line;
    std::string section;
    int n = 0;
    while (std::getline(in, line)) {
      ++n;
      const auto hash = line.find('#');
      std::string t = trim(hash == std::string::npos ? line : line.substr(0, hash));
      if (t.empty()) continue;
      if (t.front() == '[') {
        if (t.back() != ']') fail(n, t, "unterminated section header");
        section = trim(t.substr(1, t.size() - 2));
        if (!known_keys().count(section)) fail(n, section, "unknown section");
        sections_[section];
        continue;
      }
      const auto eq = t.find('=');
      if (eq == std::string::npos) fail(n, t, "expected 'key = value'");
      if (section.empty()) fail(n, t, "key outside of any section");
      const std::string key = trim(t.substr(0, eq));
      const std::string value = trim(t.substr(eq + 1));
      if (section == "versions") continue;
      const auto& allowed = known_keys().at(section);
      if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
        fail(n, section + "." + key, "unknown key");
      }
      if (sections_[section].count(key)) fail(n, section + "." + key, "duplicate key");
      sections_[section][key] = {value, n};
    }
  }

  [[noreturn]] void fail(int line, const std::string& field, const std::string& msg) const {
    throw ParseError(source_, line, field, msg);
  }

  const Entry* find(const std::string& section, const std::string& key) const {
    const auto s = sections_.find(section);
    if (s == sections_.end()) return nullptr;
    const auto k = s->second.find(key);
    return k == s->second.end() ? nullptr : &k->second;
  }

  const Entry& require(const std::string& section, const std::string& key,
                       const std::string& why) const {
    const auto* e = find(section, key);
    if (!e) fail(0, section + "." + key, "missing required field" + why);
    return *e;
  }

  template <class T>
  T number(const Entry& e, const std::string& field) const {
    T v{};
    const auto* b = e.value.data();
    const auto* end = b + e.value.size();
    const auto res = std::from_chars(b, end, v);
    if (res.ec != std::errc() || res.ptr != end) {
      fail(e.line, field, "bad number '" + e.value + "'");
    }
    return v;
  }

  template <class F>
  auto wrap(const Entry& e, const std::string& field, F&& f) const {
    try {
      return f(e.value);
    } catch (const ParseError&) {
      throw;
    } catch (const std::exception& ex) {
      fail(e.line, field, ex.what());
    }
  }

 private:
  std::string source_;
  std::map<std::string, Section> sections_;
};

std::vector<int> parse_grid(const std::string& text) {
  // "2^a..2^b" or a list of integers.
  if (text.rfind("2^", 0) == 0 && text.find("..") != std::string::npos) {
    const auto dots = text.find("..");
    const std::string hi = text.substr(dots + 2);
    if (hi.rfind("2^", 0) != 0) throw InvalidParameter("range must look like 2^a..2^b");
    const int a = std::stoi(text.substr(2, dots - 2));
    const int b = std::stoi(hi.substr(2));
    if (a < 1 || b > 30 || a > b) throw InvalidParameter("bad power-of-two range");
    std::vector<int> out;
    for (int k = a; k <= b; ++k) out.push_back(1 << k);
    return out;
  }
  std::vector<int> out;
  for (const auto& tok : split_list(text)) {
    int v = 0;
    const auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (res.ec != std::errc() || res.ptr != tok.data() + tok.size()) {
      throw InvalidParameter("bad N value '" + tok + "'");
    }
    out.push_back(v);
  }
  if (out.empty()) throw InvalidParameter("empty N list");
  return out;
}

ExperimentKind parse_kind(const std::string& s) {
  if (s == "calibrate") return ExperimentKind::Calibrate;
  if (s == "simulate") return ExperimentKind::Simulate;
  if (s == "scaling") return ExperimentKind::Scaling;
  if (s == "pn_sweep") return ExperimentKind::PnSweep;
  if (s == "oracle_check") return ExperimentKind::OracleCheck;
  throw InvalidParameter("unknown experiment '" + s + "'");
}

bool parse_bool(const std::string& s) {
  if (s == "true" || s == "yes" || s == "1") return true;
  if (s == "false" || s == "no" || s == "0") return false;
  throw InvalidParameter("expected true or false, got '" + s + "'");
}

std::string num17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string num9(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (const char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string join_grid(const std::vector<int>& grid) {
  std::string s;
  for (std::size_t i = 0; i < grid.size(); ++i) s += (i ? ", " : "") + std::to_string(grid[i]);
  return s;
}

double rate_scale(RateUnits u) { return u == RateUnits::Bits ? 1.0 / std::numbers::ln2 : 1.0; }

CsvRow base_row(const ExperimentSpec& spec, const NetworkConfig& c) {
  CsvRow r;
  r.experiment = to_string(spec.kind);
  r.regime = to_string(c.regime);
  r.fading_h = c.direct.to_string();
  r.fading_g = c.interference.to_string();
  r.N = c.N;
  r.p_rule = c.p_rule.to_string();
  r.seed = spec.seed;
  r.baseline_rate = kNaN;
  return r;
}

std::vector<int> grid_of(const ExperimentSpec& spec) {
  return spec.n_grid.empty() ? std::vector<int>{spec.network.N} : spec.n_grid;
}

CsvRow row_from_scaling(const ExperimentSpec& spec, const NetworkConfig& c,
                        const ScalingRow& s) {
  NetworkConfig rc = c;
  rc.N = s.N;
  CsvRow r = base_row(spec, rc);
  const double k = rate_scale(spec.rate_units);
  r.p = s.p;
  r.seed = s.seed;
  r.status = s.status;
  if (!s.ok()) {
    r.lambda = r.mu = r.threshold = r.sum_rate = r.sum_rate_ci = r.success_prob = kNaN;
    r.avg_power = r.avg_interference = kNaN;
    return r;
  }
  const auto& m = s.calibration.multipliers;
  r.lambda = m.lambda;
  r.mu = m.mu;
  r.threshold = m.threshold;
  if (s.simulated) {
    r.sum_rate = s.sim.sum_rate.mean * k;
    r.sum_rate_ci = s.sim.sum_rate.ci * k;
    r.success_prob = s.sim.success_prob.mean;
    r.avg_power = s.sim.avg_power.mean;
    r.avg_interference = s.sim.avg_interference.mean;
  } else {
    const auto& f = s.calibration.functionals;
    r.sum_rate = s.semi_analytic_rate * k;
    r.sum_rate_ci = kNaN;
    r.success_prob = s.N * f.tx_prob * std::exp((s.N - 1) * std::log1p(-f.tx_prob));
    r.avg_power = f.avg_power;
    r.avg_interference = f.avg_interference;
  }
  r.baseline_rate = s.baseline_rate * k;
  if (!s.calibration.threshold_premise) r.status = "ok_threshold_below_1";
  return r;
}

void summarize_table(std::ostringstream& out, const ScalingTable& t, RateUnits units) {
  const double k = rate_scale(units);
  const char* u = units == RateUnits::Bits ? "bits" : "nats";
  out << "p rule " << t.config.p_rule.to_string() << "\n";
  auto col = [&](const std::string& v) { out << ' ' << std::setw(14) << v; };
  out << std::setw(8) << "N";
  for (const char* h : {"p", "lambda", "mu", "rate", "ci", "semi", "success", "baseline"}) col(h);
  out << "  status\n";
  for (const auto& r : t.rows) {
    out << std::setw(8) << r.N;
    if (r.ok()) {
      const auto& m = r.calibration.multipliers;
      col(num9(r.p));
      col(num9(m.lambda));
      col(num9(m.mu));
      col(num9(r.sum_rate() * k));
      col(num9(r.simulated ? r.sim.sum_rate.ci * k : kNaN));
      col(num9(r.semi_analytic_rate * k));
      col(num9(r.simulated ? r.sim.success_prob.mean : kNaN));
      col(num9(r.baseline_rate * k));
      out << "  " << (r.calibration.threshold_premise ? "ok" : "ok (threshold < 1)") << "\n";
    } else {
      out << "  " << r.status << "\n";
    }
  }
  out << "(rates in " << u << " per channel use)\n";
}

void summarize_fit(std::ostringstream& out, const ScalingTable& t, RateUnits units) {
  const double k = rate_scale(units);
  const auto law = law_for(t.config.regime);
  const char* axis = law == ScalingLaw::LogN ? "log N" : "log log N";
  for (const auto window : {FitWindow::TopHalf, FitWindow::All}) {
    const char* name = window == FitWindow::TopHalf ? "top half" : "all rows";
    try {
      const auto fit = fit_scaling(t, law, window);
      out << "fit vs " << axis << " (" << name << ", " << fit.rows_used
          << " rows): pre-log " << num9(fit.fitted_prelog * k) << " (theory "
          << num9(fit.theory_prelog * k) << ", relative error " << num9(fit.relative_error)
          << "), intercept " << num9(fit.fitted_intercept * k) << " (theory term "
          << num9(fit.theory_intercept * k) << ")\n";
    } catch (const DomainError& e) {
      out << "fit vs " << axis << " (" << name << "): skipped, " << e.what() << "\n";
    }
  }
}

ScalingOptions options_of(const ExperimentSpec& spec) {
  ScalingOptions o;
  o.blocks = spec.blocks;
  o.seed = spec.seed;
  o.baseline = spec.baseline;
  o.baseline_blocks = spec.baseline_blocks;
  o.threads = spec.threads;
  return o;
}

}  // namespace

ParseError::ParseError(std::string source, int line, std::string field,
                       const std::string& message)
    : InvalidParameter(source + (line > 0 ? ":" + std::to_string(line) : std::string()) +
                       ": " + field + ": " + message),
      line_(line),
      field_(std::move(field)) {}

std::string to_string(ExperimentKind k) {
  switch (k) {
    case ExperimentKind::Calibrate: return "calibrate";
    case ExperimentKind::Simulate: return "simulate";
    case ExperimentKind::Scaling: return "scaling";
    case ExperimentKind::PnSweep: return "pn_sweep";
    case ExperimentKind::OracleCheck: return "oracle_check";
  }
  return {};
}

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

ExperimentSpec parse_spec(std::istream& in, const std::string& source,
                          const SpecOverrides& overrides) {
  const SpecReader rd(in, source);
  ExperimentSpec spec;

  const auto& kind = rd.require("run", "experiment", "");
  spec.kind = rd.wrap(kind, "run.experiment", parse_kind);
  if (const auto* e = rd.find("run", "seed")) spec.seed = rd.number<std::uint64_t>(*e, "run.seed");
  if (const auto* e = rd.find("run", "blocks")) {
    spec.blocks = rd.number<std::uint64_t>(*e, "run.blocks");
  }
  if (const auto* e = rd.find("run", "threads")) {
    spec.threads = rd.number<unsigned>(*e, "run.threads");
  }
  BudgetUnits units = BudgetUnits::Decibel;
  if (const auto* e = rd.find("run", "units")) {
    if (e->value == "db") {
      units = BudgetUnits::Decibel;
    } else if (e->value == "linear") {
      units = BudgetUnits::Linear;
    } else {
      rd.fail(e->line, "run.units", "expected db or linear");
    }
  }
  if (const auto* e = rd.find("run", "rate_units")) {
    if (e->value == "nats") {
      spec.rate_units = RateUnits::Nats;
    } else if (e->value == "bits") {
      spec.rate_units = RateUnits::Bits;
    } else {
      rd.fail(e->line, "run.rate_units", "expected nats or bits");
    }
  }
  if (const auto* e = rd.find("run", "baseline")) {
    spec.baseline = rd.wrap(*e, "run.baseline", parse_bool);
  }
  if (const auto* e = rd.find("run", "baseline_blocks")) {
    spec.baseline_blocks = rd.number<std::uint64_t>(*e, "run.baseline_blocks");
  }
  if (overrides.seed) spec.seed = *overrides.seed;
  if (overrides.threads) spec.threads = *overrides.threads;
  if (overrides.units) units = *overrides.units;
  if (overrides.rate_units) spec.rate_units = *overrides.rate_units;

  auto budget = [&](const Entry& e, const std::string& field) {
    const double v = rd.number<double>(e, field);
    const double lin = units == BudgetUnits::Decibel ? db_to_linear(v) : v;
    if (!(lin > 0.0) || !std::isfinite(lin)) rd.fail(e.line, field, "budget must be positive");
    return lin;
  };

  auto& net = spec.network;
  const auto& regime = rd.require("network", "regime", "");
  net.regime = rd.wrap(regime, "network.regime", parse_regime);
  const std::string regime_note = " for the " + to_string(net.regime) + " regime";
  if (const auto* e = rd.find("network", "fading_h")) {
    net.direct = rd.wrap(*e, "network.fading_h", FadingModel::parse);
  }
  if (const auto* e = rd.find("network", "fading_g")) {
    net.interference = rd.wrap(*e, "network.fading_g", FadingModel::parse);
  }
  net.Q_ave = budget(rd.require("network", "Q_ave", regime_note), "network.Q_ave");
  if (net.regime == Regime::DTPIL) {
    net.P_ave = budget(rd.require("network", "P_ave", regime_note), "network.P_ave");
  } else if (const auto* e = rd.find("network", "P_ave")) {
    net.P_ave = budget(*e, "network.P_ave");
  }
  if (const auto* e = rd.find("network", "p_rule")) {
    net.p_rule = rd.wrap(*e, "network.p_rule", PRule::parse);
  }
  if (const auto* e = rd.find("network", "N")) {
    net.N = rd.number<int>(*e, "network.N");
    if (net.N < 2) rd.fail(e->line, "network.N", "N must be >= 2");
  }
  if (const auto* e = rd.find("grid", "N")) {
    spec.n_grid = rd.wrap(*e, "grid.N", parse_grid);
    for (std::size_t i = 0; i < spec.n_grid.size(); ++i) {
      if (spec.n_grid[i] < 2 || (i > 0 && spec.n_grid[i] <= spec.n_grid[i - 1])) {
        rd.fail(e->line, "grid.N", "N values must be >= 2 and strictly increasing");
      }
    }
    net.N = spec.n_grid.back();
  }
  if (const auto* e = rd.find("pn_sweep", "rules")) {
    for (const auto& tok : split_list(e->value)) {
      spec.pn_rules.push_back(rd.wrap(*e, "pn_sweep.rules", [&](const std::string&) {
        return PRule::parse(tok);
      }));
    }
  }
  if (const auto* e = rd.find("oracle_check", "instances")) {
    spec.oracle_instances = rd.number<int>(*e, "oracle_check.instances");
  }
  if (const auto* e = rd.find("oracle_check", "min_states")) {
    spec.oracle_min_states = rd.number<int>(*e, "oracle_check.min_states");
  }
  if (const auto* e = rd.find("oracle_check", "max_states")) {
    spec.oracle_max_states = rd.number<int>(*e, "oracle_check.max_states");
  }

  switch (spec.kind) {
    case ExperimentKind::Calibrate:
    case ExperimentKind::Simulate:
      if (spec.n_grid.empty() && !rd.find("network", "N")) {
        rd.require("grid", "N", " (or network.N)");
      }
      break;
    case ExperimentKind::Scaling:
      rd.require("grid", "N", "");
      break;
    case ExperimentKind::PnSweep:
      rd.require("grid", "N", "");
      rd.require("pn_sweep", "rules", "");
      break;
    case ExperimentKind::OracleCheck:
      if (spec.oracle_min_states < 2 || spec.oracle_max_states > 16 ||
          spec.oracle_min_states > spec.oracle_max_states) {
        rd.fail(0, "oracle_check.min_states", "state counts must satisfy 2 <= min <= max <= 16");
      }
      break;
  }
  if (spec.kind == ExperimentKind::Simulate && spec.blocks == 0) {
    rd.fail(0, "run.blocks", "simulate needs blocks >= 1");
  }
  try {
    if (spec.kind != ExperimentKind::OracleCheck) net.validate();
  } catch (const InvalidParameter& e) {
    throw ParseError(source, 0, "network", e.what());
  }
  return spec;
}

ExperimentSpec load_spec(const std::filesystem::path& path, const SpecOverrides& overrides) {
  std::ifstream in(path);
  if (!in) throw InvalidParameter("cannot open spec file " + path.string());
  return parse_spec(in, path.string(), overrides);
}

std::string manifest_text(const ExperimentSpec& spec) {
  std::ostringstream out;
  const auto& n = spec.network;
  out << "# Resolved experiment; budgets in linear units.\n";
  out << "[run]\n";
  out << "experiment = " << to_string(spec.kind) << "\n";
  out << "seed = " << spec.seed << "\n";
  out << "blocks = " << spec.blocks << "\n";
  out << "threads = " << spec.threads << "\n";
  out << "units = linear\n";
  out << "rate_units = " << (spec.rate_units == RateUnits::Bits ? "bits" : "nats") << "\n";
  out << "baseline = " << (spec.baseline ? "true" : "false") << "\n";
  out << "baseline_blocks = " << spec.baseline_blocks << "\n\n";
  out << "[network]\n";
  out << "regime = " << to_string(n.regime) << "\n";
  out << "fading_h = " << n.direct.to_string() << "\n";
  out << "fading_g = " << n.interference.to_string() << "\n";
  if (n.P_ave) out << "P_ave = " << num17(*n.P_ave) << "\n";
  out << "Q_ave = " << num17(n.Q_ave) << "\n";
  out << "p_rule = " << n.p_rule.to_string() << "\n";
  out << "N = " << n.N << "\n";
  if (!spec.n_grid.empty()) out << "\n[grid]\nN = " << join_grid(spec.n_grid) << "\n";
  if (!spec.pn_rules.empty()) {
    out << "\n[pn_sweep]\nrules = ";
    for (std::size_t i = 0; i < spec.pn_rules.size(); ++i) {
      out << (i ? ", " : "") << spec.pn_rules[i].to_string();
    }
    out << "\n";
  }
  if (spec.kind == ExperimentKind::OracleCheck) {
    out << "\n[oracle_check]\ninstances = " << spec.oracle_instances
        << "\nmin_states = " << spec.oracle_min_states
        << "\nmax_states = " << spec.oracle_max_states << "\n";
  }
  out << "\n[versions]\n";
  out << "cogup = " << kVersion << "\n";
  out << "boost = " << BOOST_VERSION / 100000 << "." << BOOST_VERSION / 100 % 1000 << "."
      << BOOST_VERSION % 100 << "\n";
#if defined(__clang__)
  out << "compiler = clang " << __clang_major__ << "." << __clang_minor__ << "\n";
#elif defined(__GNUC__)
  out << "compiler = gcc " << __GNUC__ << "." << __GNUC_MINOR__ << "\n";
#endif
  return out.str();
}

const char* const kCsvHeader =
    "experiment,regime,fading_h,fading_g,N,p_rule,p,lambda,mu,threshold,sum_rate,sum_rate_ci,"
    "success_prob,avg_power,avg_interference,baseline_rate,status,seed";

void write_csv(std::ostream& out, const std::vector<CsvRow>& rows) {
  out << kCsvHeader << '\n';
  for (const auto& r : rows) {
    out << csv_field(r.experiment) << ',' << csv_field(r.regime) << ','
        << csv_field(r.fading_h) << ',' << csv_field(r.fading_g) << ',' << r.N << ','
        << csv_field(r.p_rule) << ',' << num9(r.p) << ',' << num9(r.lambda) << ','
        << num9(r.mu) << ',' << num9(r.threshold) << ',' << num9(r.sum_rate) << ','
        << num9(r.sum_rate_ci) << ',' << num9(r.success_prob) << ',' << num9(r.avg_power)
        << ',' << num9(r.avg_interference) << ',' << num9(r.baseline_rate) << ','
        << csv_field(r.status) << ',' << r.seed << '\n';
  }
}

std::vector<CsvRow> read_csv(std::istream& in) {
  std::string header;
  if (!std::getline(in, header) || header != kCsvHeader) {
    throw ParseError("csv", 1, "header", "unexpected header");
  }
  std::vector<CsvRow> rows;
  std::string line;
  int n = 1;
  while (std::getline(in, line)) {
    ++n;
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
      const char c = line[i];
      if (quoted) {
        if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
          cur += '"';
          ++i;
        } else if (c == '"') {
          quoted = false;
        } else {
          cur += c;
        }
      } else if (c == '"') {
        quoted = true;
      } else if (c == ',') {
        f.push_back(cur);
        cur.clear();
      } else {
        cur += c;
      }
    }
    f.push_back(cur);
    if (f.size() != 18) {
      throw ParseError("csv", n, "row", "expected 18 fields, got " + std::to_string(f.size()));
    }
    auto num = [&](const std::string& s, const char* field) {
      errno = 0;
      char* end = nullptr;
      const double v = std::strtod(s.c_str(), &end);
      if (s.empty() || *end != '\0') throw ParseError("csv", n, field, "bad number '" + s + "'");
      return v;
    };
    CsvRow r;
    r.experiment = f[0];
    r.regime = f[1];
    r.fading_h = f[2];
    r.fading_g = f[3];
    r.N = std::stoll(f[4]);
    r.p_rule = f[5];
    r.p = num(f[6], "p");
    r.lambda = num(f[7], "lambda");
    r.mu = num(f[8], "mu");
    r.threshold = num(f[9], "threshold");
    r.sum_rate = num(f[10], "sum_rate");
    r.sum_rate_ci = num(f[11], "sum_rate_ci");
    r.success_prob = num(f[12], "success_prob");
    r.avg_power = num(f[13], "avg_power");
    r.avg_interference = num(f[14], "avg_interference");
    r.baseline_rate = num(f[15], "baseline_rate");
    r.status = f[16];
    r.seed = std::stoull(f[17]);
    rows.push_back(std::move(r));
  }
  return rows;
}

ExperimentResult execute(const ExperimentSpec& spec) {
  ExperimentResult res;
  std::ostringstream sum;
  const auto& net = spec.network;
  const double k = rate_scale(spec.rate_units);
  sum << "experiment: " << to_string(spec.kind) << "\n";
  sum << "regime: " << to_string(net.regime) << ", h ~ " << net.direct.to_string()
      << ", g ~ " << net.interference.to_string() << "\n";
  if (net.P_ave) {
    sum << "P_ave = " << num9(*net.P_ave) << " (" << num9(10 * std::log10(*net.P_ave))
        << " dB), ";
  }
  sum << "Q_ave = " << num9(net.Q_ave) << " (" << num9(10 * std::log10(net.Q_ave))
      << " dB)\n";
  sum << "seed " << spec.seed << ", blocks " << spec.blocks << "\n\n";

  auto finish = [&]() {
    for (const auto& r : res.rows) {
      if (r.status.rfind("ok", 0) != 0 && r.experiment != "oracle_check") ++res.failed_rows;
    }
    res.summary = sum.str();
    return res;
  };

  switch (spec.kind) {
    case ExperimentKind::Calibrate:
    case ExperimentKind::Simulate: {
      ScalingOptions o = options_of(spec);
      if (spec.kind == ExperimentKind::Calibrate) o.blocks = 0;
      const auto table = scaling_experiment(net, grid_of(spec), o);
      for (const auto& r : table.rows) res.rows.push_back(row_from_scaling(spec, net, r));
      summarize_table(sum, table, spec.rate_units);
      for (const auto& r : table.rows) {
        if (!r.ok()) continue;
        const auto& c = r.calibration;
        sum << "N = " << r.N << ": power residual " << num9(c.power_residual)
            << ", interference residual " << num9(c.interference_residual) << ", active "
            << (c.active == ActiveSet::PowerOnly          ? "power"
                : c.active == ActiveSet::InterferenceOnly ? "interference"
                                                          : "both")
            << "\n";
      }
      return finish();
    }
    case ExperimentKind::Scaling: {
      const auto table = scaling_experiment(net, spec.n_grid, options_of(spec));
      for (const auto& r : table.rows) res.rows.push_back(row_from_scaling(spec, net, r));
      summarize_table(sum, table, spec.rate_units);
      summarize_fit(sum, table, spec.rate_units);
      return finish();
    }
    case ExperimentKind::PnSweep: {
      const auto tables = pn_comparison(net, spec.n_grid, spec.pn_rules, options_of(spec));
      for (const auto& t : tables) {
        for (const auto& r : t.rows) res.rows.push_back(row_from_scaling(spec, t.config, r));
        summarize_table(sum, t, spec.rate_units);
        sum << "\n";
      }
      for (std::size_t i = 0; i < spec.n_grid.size(); ++i) {
        sum << "N = " << spec.n_grid[i] << ": rates";
        for (const auto& t : tables) {
          sum << "  " << t.config.p_rule.to_string() << " -> "
              << num9(t.rows[i].ok() ? t.rows[i].sum_rate() * k : kNaN);
        }
        sum << "\n";
      }
      return finish();
    }
    case ExperimentKind::OracleCheck: {
      Rng rng(substream_seed(spec.seed, 0));
      std::uniform_int_distribution<int> states(spec.oracle_min_states, spec.oracle_max_states);
      int own_duals = 0;
      int structure_ok = 0;
      int value_ok = 0;
      for (int i = 0; i < spec.oracle_instances; ++i) {
        const int n_states = states(rng);
        const auto inst = random_discrete_instance(net.direct, net.interference, n_states, rng);
        CsvRow r = base_row(spec, net);
        r.regime = "discrete";
        r.N = n_states;
        r.p_rule = "fixed:" + num9(inst.p_target);
        r.p = inst.p_target;
        try {
          const auto bf = brute_force_policy_search(inst.states, inst.p_target, inst.p_budget,
                                                    inst.q_budget);
          const auto tp = threshold_policy_discrete(inst.states, inst.p_target, inst.p_budget,
                                                    inst.q_budget);
          own_duals += is_superlevel_set(inst.states, bf.transmit, bf.lambda, bf.mu);
          const bool sup = is_threshold_set(inst.states, bf.transmit);
          const double gap = tp.found ? (bf.value - tp.value) / bf.value : 1.0;
          structure_ok += sup;
          value_ok += gap < 0.01;
          r.lambda = bf.lambda;
          r.mu = bf.mu;
          r.threshold = tp.found ? tp.multipliers.threshold : kNaN;
          r.sum_rate = bf.value * k;
          r.sum_rate_ci = kNaN;
          r.success_prob = kNaN;
          r.avg_power = inst.p_budget;
          r.avg_interference = inst.q_budget;
          r.baseline_rate = tp.found ? tp.value * k : kNaN;
          r.status = sup && gap < 0.01 ? "ok" : (!sup ? "not_threshold_set" : "value_gap");
        } catch (const std::exception& e) {
          r.status = std::string("error: ") + e.what();
        }
        r.seed = spec.seed;
        res.rows.push_back(r);
      }
      sum << "discrete oracle instances: " << spec.oracle_instances << "\n";
      sum << "optimum is a top set of h/(1 + r g) for some r >= 0: " << structure_ok << "\n";
      sum << "optimum is a superlevel set for its own duals: " << own_duals << "\n";
      sum << "threshold policy within 1% of the optimum: " << value_ok << "\n";
      sum << "(sum_rate = exhaustive optimum, baseline_rate = threshold policy;"
             " avg_power/avg_interference columns hold the instance budgets)\n";
      for (const auto& r : res.rows) {
        if (r.status != "ok") ++res.failed_rows;
      }
      res.summary = sum.str();
      return res;
    }
  }
  return finish();
}

int run_experiment(const ExperimentSpec& spec, const std::filesystem::path& out_dir) {
  std::filesystem::create_directories(out_dir);
  {
    std::ofstream m(out_dir / "manifest.ini", std::ios::binary);
    m << manifest_text(spec);
  }
  const auto res = execute(spec);
  {
    std::ofstream c(out_dir / "results.csv", std::ios::binary);
    write_csv(c, res.rows);
    if (!c) throw std::runtime_error("failed to write results.csv");
  }
  {
    std::ofstream s(out_dir / "summary.txt", std::ios::binary);
    s << res.summary;
  }
  return res.failed_rows > 0 ? 2 : 0;
}

}  // namespace cogup
