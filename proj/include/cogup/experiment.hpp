/*
 * SPDX-License-Identifier: Apache-2.0
 */

#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "cogup/error.hpp"
#include "cogup/network.hpp"

namespace cogup {

/// Spec-file error with the offending line (0 when the field is missing)
/// and field name.
class ParseError : public InvalidParameter {
 public:
  ParseError(std::string source, int line, std::string field, const std::string& message);
  int line() const { return line_; }
  const std::string& field() const { return field_; }

 private:
  int line_;
  std::string field_;
};

enum class ExperimentKind { Calibrate, Simulate, Scaling, PnSweep, OracleCheck };
enum class BudgetUnits { Decibel, Linear };
enum class RateUnits { Nats, Bits };

std::string to_string(ExperimentKind k);

/// Fully resolved experiment description. Budgets are stored linear.
struct ExperimentSpec {
  ExperimentKind kind = ExperimentKind::Scaling;
  NetworkConfig network;
  std::vector<int> n_grid;
  std::uint64_t blocks = 0;
  std::uint64_t seed = 1;
  unsigned threads = 0;
  RateUnits rate_units = RateUnits::Nats;
  bool baseline = false;
  std::uint64_t baseline_blocks = 0;
  std::vector<PRule> pn_rules;
  int oracle_instances = 50;
  int oracle_min_states = 8;
  int oracle_max_states = 12;
};

/// Overrides given on the command line; they take precedence over the file.
struct SpecOverrides {
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> threads;
  std::optional<BudgetUnits> units;
  std::optional<RateUnits> rate_units;
};

/// Parses the sectioned key = value format (see README). `source` names
/// the input in error messages.
ExperimentSpec parse_spec(std::istream& in, const std::string& source,
                          const SpecOverrides& overrides = {});
ExperimentSpec load_spec(const std::filesystem::path& path, const SpecOverrides& overrides = {});

/// Linear-unit spec text that parses back to the same ExperimentSpec.
std::string manifest_text(const ExperimentSpec& spec);

double db_to_linear(double db);

/// One line of the results file.
struct CsvRow {
  std::string experiment;
  std::string regime;
  std::string fading_h;
  std::string fading_g;
  long long N = 0;
  std::string p_rule;
  double p = 0, lambda = 0, mu = 0, threshold = 0;
  double sum_rate = 0, sum_rate_ci = 0, success_prob = 0;
  double avg_power = 0, avg_interference = 0, baseline_rate = 0;
  std::string status;
  std::uint64_t seed = 0;
};

extern const char* const kCsvHeader;

/// 9 significant digits, '\n' line ends, RFC 4180 quoting when needed.
void write_csv(std::ostream& out, const std::vector<CsvRow>& rows);
/// Inverse of write_csv. Throws ParseError on a malformed file.
std::vector<CsvRow> read_csv(std::istream& in);

struct ExperimentResult {
  std::vector<CsvRow> rows;
  std::string summary;
  int failed_rows = 0;
};

/// Runs the experiment in memory.
ExperimentResult execute(const ExperimentSpec& spec);

/// Runs the experiment and writes manifest.ini, results.csv and
/// summary.txt into `out_dir`. Returns 0 on success, 2 if some rows failed.
int run_experiment(const ExperimentSpec& spec, const std::filesystem::path& out_dir);

}  // namespace cogup
