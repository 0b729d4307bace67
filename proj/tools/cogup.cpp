/*
 * SPDX-License-Identifier: Apache-2.0
 */

// Experiment runner: reads a spec file, writes manifest.ini, results.csv and
// summary.txt into the output directory.

#include <CLI11.hpp>

#include <iostream>

#include "cogup/experiment.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Threshold water-filling experiments for a cognitive uplink"};
  std::string spec_path;
  std::string out_dir = "out";
  std::uint64_t seed = 0;
  unsigned threads = 0;
  std::string units;
  std::string rate_units;
  app.add_option("--spec", spec_path, "Experiment spec file")->required()->check(CLI::ExistingFile);
  app.add_option("--out", out_dir, "Output directory")->capture_default_str();
  auto* seed_opt = app.add_option("--seed", seed, "Override the spec seed");
  auto* threads_opt = app.add_option("--threads", threads, "Worker threads (0 = all cores)");
  app.add_option("--units", units, "Budget units in the spec")
      ->check(CLI::IsMember({"db", "linear"}));
  app.add_option("--rate-units", rate_units, "Rate units in outputs")
      ->check(CLI::IsMember({"nats", "bits"}));
  CLI11_PARSE(app, argc, argv);

  cogup::SpecOverrides ov;
  if (seed_opt->count()) ov.seed = seed;
  if (threads_opt->count()) ov.threads = threads;
  if (!units.empty()) {
    ov.units = units == "db" ? cogup::BudgetUnits::Decibel : cogup::BudgetUnits::Linear;
  }
  if (!rate_units.empty()) {
    ov.rate_units = rate_units == "bits" ? cogup::RateUnits::Bits : cogup::RateUnits::Nats;
  }
  try {
    const auto spec = cogup::load_spec(spec_path, ov);
    const int status = cogup::run_experiment(spec, out_dir);
    std::cout << "wrote " << out_dir << "/{manifest.ini,results.csv,summary.txt}\n";
    if (status != 0) std::cerr << "some rows failed; see the status column\n";
    return status;
  } catch (const cogup::ParseError& e) {
    std::cerr << "spec error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
