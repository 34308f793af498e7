#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "lrloc/ensemble.hpp"

namespace lrloc {

enum class Classification { localized, crossover, diffusive };

std::string_view to_string(Classification c);

struct ClassifyThresholds {
  double lo = 0.1;  // edge_fraction <= lo: localized
  double hi = 0.9;  // edge_fraction >= hi: diffusive
};

Classification classify_edge_fraction(double edge_fraction, const ClassifyThresholds& t = {});

/// Throws UnconvergedError if the summary has not met the convergence rule.
Classification classify_point(const EnsembleSummary& summary, const LatticeSpec& spec,
                              const ClassifyThresholds& thresholds = {});

struct PhasePoint {
  double p = 0;
  double w = 0;
  Classification classification = Classification::localized;
  double mean_final_L = 0;
  double edge_fraction = 0;
  bool converged = false;
};

struct PhaseScanJob {
  LatticeSpec base;  // n_per_dim, alpha, nn_amplitude; p and w come from the grids
  std::vector<double> p_grid;
  std::vector<double> w_grid;
  int n_realizations = 1;
  int min_realizations = 0;
  std::uint64_t master_seed = 0;
  std::vector<double> time_grid;
  double coverage = 0.9;
  ClassifyThresholds thresholds;

  std::size_t point_count() const { return p_grid.size() * w_grid.size(); }
  /// Point k is (p_grid[k / |w_grid|], w_grid[k % |w_grid|]).
  EnsembleJob point_job(std::size_t k) const;
};

struct PhaseScanOptions {
  int workers = 1;
  std::optional<std::filesystem::path> record_dir;
  std::optional<std::size_t> max_new_records;
};

struct PhaseScanResult {
  std::vector<PhasePoint> points;
  std::vector<EnsembleSummary> summaries;
  bool interrupted = false;
  bool all_converged() const;
};

PhaseScanResult run_phase_scan(const PhaseScanJob& job, const PhaseScanOptions& options = {});

nlohmann::json to_json(const PhaseScanJob& job);
nlohmann::json phase_scan_summary_json(const PhaseScanResult& result, const PhaseScanJob& job);

}  // namespace lrloc
