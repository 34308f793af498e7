#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "lrloc/lattice.hpp"
#include "lrloc/observables.hpp"
#include "lrloc/rng.hpp"

namespace lrloc {

struct ObservableSet {
  bool L_of_t = true;
  bool ipr = true;
  bool shells = false;
  bool heisenberg = false;
  friend bool operator==(const ObservableSet&, const ObservableSet&) = default;
};

struct EnsembleJob {
  LatticeSpec spec;
  int n_realizations = 1;  // hard cap
  std::uint64_t master_seed = 0;
  std::vector<double> time_grid;
  ObservableSet observables;
  double coverage = 0.9;
  double shell_width = 0.5;
  double shell_max_radius = 6.0;
  // When > 0, realizations run in batches of this size and the job stops
  // early once the standard error of mean L(t_final) drops below 2% of N.
  int min_realizations = 0;

  void validate() const;
  friend bool operator==(const EnsembleJob&, const EnsembleJob&) = default;
};

/// Fixed log-spaced IPR bins: 60 bins per ensemble over [1e-6, 1].
struct IprBins {
  static constexpr int kCount = 60;
  static constexpr double kLog10Min = -6.0;
  static int bin_of(double value);
  static double lower_edge(int bin);
  static double upper_edge(int bin);
};

enum class RecordStatus { done, failed };

struct RealizationRecord {
  std::uint64_t index = 0;
  std::uint64_t seed = 0;
  std::uint64_t occupied_count = 0;
  std::vector<double> L_of_t;
  double i_min_ratio = 0;
  std::vector<std::uint64_t> ipr_histogram;  // IprBins counts, empty unless ipr requested
  std::optional<ShellSamples> shell_samples;
  std::optional<double> t_heisenberg;
  RecordStatus status = RecordStatus::done;
  std::string error;

  friend bool operator==(const RealizationRecord&, const RealizationRecord&);
};

struct EnsembleSummary {
  std::vector<double> time_grid;
  std::vector<double> mean_L;
  std::vector<double> se_L;
  std::vector<double> edge_fraction_of_t;  // fraction with L(t) >= N
  double edge_fraction = 0;                // at the final time
  std::vector<std::uint64_t> ipr_histogram;
  double min_i_min_ratio = 0;
  double mean_i_min_ratio = 0;
  std::optional<double> mean_t_heisenberg;
  std::optional<double> se_t_heisenberg;
  std::optional<ShellSamples> shells;
  std::size_t n_completed = 0;
  std::size_t n_failed = 0;
  double se_final_L = 0;
  bool converged = false;
};

/// True when the standard error of mean L(t_final) is below 2% of N.
bool is_converged(const EnsembleSummary& s, const LatticeSpec& spec);

/// Order-independent reduction over immutable records. Merging partial
/// accumulators gives exactly the same summary as accumulating everything at once.
class EnsembleAccumulator {
public:
  explicit EnsembleAccumulator(const EnsembleJob& job) : job_(job) {}

  void add(RealizationRecord record);
  void merge(const EnsembleAccumulator& other);
  EnsembleSummary finalize() const;

  std::size_t size() const { return records_.size(); }
  const std::vector<RealizationRecord>& records() const { return records_; }

private:
  EnsembleJob job_;
  std::vector<RealizationRecord> records_;
};

EnsembleSummary aggregate(std::span<const RealizationRecord> records, const EnsembleJob& job);

/// Full pipeline for one realization: sample, build, decompose, propagate,
/// observables. Errors are captured in the record's status.
RealizationRecord run_realization(const EnsembleJob& job, std::uint64_t index,
                                  const std::optional<std::filesystem::path>& checkpoint_dir = {});

struct RunOptions {
  int workers = 1;
  std::optional<std::filesystem::path> record_file;  // JSON lines, appended
  std::optional<std::filesystem::path> checkpoint_dir;
  /// Stop after this many new records (simulates an interrupted run).
  std::optional<std::size_t> max_new_records;
  std::function<void(std::size_t done, std::size_t total)> progress;
};

struct EnsembleRun {
  EnsembleSummary summary;
  std::vector<RealizationRecord> records;  // sorted by index
  std::size_t resumed = 0;                 // records read back from record_file
  bool interrupted = false;
};

/// Runs the job in parallel. Existing records for the same job in
/// `record_file` are reused, so an interrupted run can be resumed. The
/// summary does not depend on the worker count or on interruptions.
/// Throws NumericError if more than 1% of realizations fail.
EnsembleRun run_ensemble(const EnsembleJob& job, const RunOptions& options = {});

}  // namespace lrloc
