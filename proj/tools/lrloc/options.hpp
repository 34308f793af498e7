#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "lrloc/ensemble.hpp"

namespace lrloc::cli {

/// Every parameter a subcommand can take. Validated before any work starts and
/// echoed into the metadata of every output file.
struct RunConfig {
  std::string command;

  int n = 15;
  double p = 0.5;
  double w = 20.0;
  double alpha = 3.0;
  double nn_amplitude = 1.0;
  int realizations = 200;
  int min_realizations = 0;
  std::uint64_t seed = 0;
  double time_min = 1e-1;
  double time_max = 1e17;
  int time_points = 60;
  double coverage = 0.9;

  // collapse
  double shell_width = 0.5;
  double shell_max_radius = 6.0;
  std::size_t min_samples = 100;
  std::size_t min_shells = 3;

  // phase-scan
  std::vector<double> p_grid{0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0};
  std::vector<double> w_grid{2, 5, 10, 20, 40, 80};
  double lo = 0.1;
  double hi = 0.9;

  // scaling
  std::vector<int> n_list{21, 31, 41, 101};
  std::vector<int> predict_n;
  double target = 1.2e-2;
  double w_max = 1e3;

  // execution only; not echoed
  int workers = 1;
  std::filesystem::path out = ".";
  std::optional<std::filesystem::path> checkpoint_dir;
  std::optional<std::size_t> max_new_records;
  bool progress = false;

  LatticeSpec spec() const;
  std::vector<double> time_grid() const;
  EnsembleJob ensemble_job(const ObservableSet& observables) const;
  /// Throws DomainError on any invalid combination.
  void validate() const;
  /// Parameters that determine the results, for output metadata.
  nlohmann::json echo() const;
};

void add_ensemble_options(CLI::App& sub, RunConfig& c);
void add_execution_options(CLI::App& sub, RunConfig& c);
void add_collapse_options(CLI::App& sub, RunConfig& c);
void add_phase_scan_options(CLI::App& sub, RunConfig& c);
void add_scaling_options(CLI::App& sub, RunConfig& c);

}  // namespace lrloc::cli
