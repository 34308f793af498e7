#include "lrloc/ensemble.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <limits>
#include <mutex>
#include <set>
#include <string>

#include <omp.h>

#include "lrloc/dynamics.hpp"
#include "lrloc/errors.hpp"
#include "lrloc/hamiltonian.hpp"
#include "lrloc/records.hpp"

namespace lrloc {

void EnsembleJob::validate() const {
  spec.validate();
  if (n_realizations < 1) throw DomainError("n_realizations must be >= 1");
  if (min_realizations < 0) throw DomainError("min_realizations must be >= 0");
  if ((observables.L_of_t || observables.shells) && !spec.has_center())
    throw DomainError("wavepacket observables need odd N (a center site)");
  if ((observables.L_of_t || observables.shells) && time_grid.empty())
    throw DomainError("time grid is empty");
  for (std::size_t i = 1; i < time_grid.size(); ++i)
    if (!(time_grid[i] > time_grid[i - 1])) throw DomainError("time grid must be strictly increasing");
  for (double t : time_grid)
    if (!(t >= 0) || !std::isfinite(t)) throw DomainError("times must be finite and >= 0");
  if (!(coverage > 0 && coverage < 1)) throw DomainError("coverage must lie in (0, 1)");
  if (!(shell_width > 0)) throw DomainError("shell width must be > 0");
}

int IprBins::bin_of(double value) {
  const double x = std::log10(std::max(value, 1e-300));
  const int b = static_cast<int>(std::floor((x - kLog10Min) / (-kLog10Min) * kCount));
  return std::clamp(b, 0, kCount - 1);
}

double IprBins::lower_edge(int bin) {
  return std::pow(10.0, kLog10Min + (-kLog10Min) * bin / kCount);
}

double IprBins::upper_edge(int bin) { return lower_edge(bin + 1); }

bool operator==(const RealizationRecord& a, const RealizationRecord& b) {
  return a.index == b.index && a.seed == b.seed && a.occupied_count == b.occupied_count &&
         a.L_of_t == b.L_of_t && a.i_min_ratio == b.i_min_ratio &&
         a.ipr_histogram == b.ipr_histogram && a.shell_samples == b.shell_samples &&
         a.t_heisenberg == b.t_heisenberg && a.status == b.status && a.error == b.error;
}

bool is_converged(const EnsembleSummary& s, const LatticeSpec& spec) {
  return s.n_completed >= 2 && s.se_final_L < 0.02 * spec.n_per_dim;
}

// --- realization pipeline -----------------------------------------------------

RealizationRecord run_realization(const EnsembleJob& job, std::uint64_t index,
                                  const std::optional<std::filesystem::path>& checkpoint_dir) {
  RealizationRecord rec;
  rec.index = index;
  rec.seed = rng::seed_for(job.master_seed, index);
  try {
    const DisorderRealization real = sample_realization(job.spec, rec.seed);
    rec.occupied_count = real.occupied_count();
    const HamiltonianMatrix h = build(job.spec, real);
    const SpectralDecomposition d = decompose(h);
    if (checkpoint_dir) {
      const CheckpointHeader header{job.spec.n_per_dim, job.spec.occupation,
                                    job.spec.disorder_width, rec.seed,
                                    static_cast<std::uint64_t>(d.dimension())};
      write_checkpoint(*checkpoint_dir / ("eig_" + std::to_string(rec.seed) + ".bin"), header, d);
    }

    const std::vector<Coord> coords = occupied_coordinates(job.spec, real);
    const auto start = job.spec.has_center()
                           ? static_cast<Eigen::Index>(real.row_of(real.center_index))
                           : Eigen::Index{0};

    Eigen::MatrixXd densities;
    if (job.observables.L_of_t) {
      densities = propagate_densities(d, start, job.time_grid);
      const RadialOrder radial(coords, job.spec.center());
      rec.L_of_t.resize(job.time_grid.size());
      for (Eigen::Index j = 0; j < densities.cols(); ++j) {
        const auto col = densities.col(j);
        rec.L_of_t[static_cast<std::size_t>(j)] =
            radial.diameter(std::span<const double>(col.data(), col.size()), job.coverage);
      }
    }

    const IprDistribution iprs = ipr_distribution(d, job.spec);
    rec.i_min_ratio = iprs.min_ratio();
    if (job.observables.ipr) {
      rec.ipr_histogram.assign(IprBins::kCount, 0);
      for (double v : iprs.values) ++rec.ipr_histogram[static_cast<std::size_t>(IprBins::bin_of(v))];
    }

    if (job.observables.shells) {
      Eigen::VectorXd last;
      if (densities.cols() > 0) {
        last = densities.col(densities.cols() - 1);
      } else {
        const double t_final = job.time_grid.back();
        last = propagate_densities(d, start, std::span<const double>(&t_final, 1)).col(0);
      }
      rec.shell_samples = shell_log_amplitudes(std::span<const double>(last.data(), last.size()),
                                               coords, job.shell_width, job.shell_max_radius);
    }

    if (job.observables.heisenberg) rec.t_heisenberg = heisenberg_time(d);
    rec.status = RecordStatus::done;
  } catch (const std::exception& e) {
    rec = RealizationRecord{};
    rec.index = index;
    rec.seed = rng::seed_for(job.master_seed, index);
    rec.status = RecordStatus::failed;
    rec.error = e.what();
  }
  return rec;
}

// --- aggregation ----------------------------------------------------------------

namespace {

bool record_less(const RealizationRecord& a, const RealizationRecord& b) {
  if (a.index != b.index) return a.index < b.index;
  if (a.seed != b.seed) return a.seed < b.seed;
  if (a.status != b.status) return a.status < b.status;
  if (a.L_of_t != b.L_of_t) return a.L_of_t < b.L_of_t;
  return a.i_min_ratio < b.i_min_ratio;
}

struct MeanAndError {
  double mean = 0;
  double se = 0;
};

// Sample mean and standard error (n - 1 variance); se = 0 for a single value.
MeanAndError mean_and_error(const std::vector<double>& xs) {
  MeanAndError out;
  if (xs.empty()) return out;
  for (double x : xs) out.mean += x;
  const double n = static_cast<double>(xs.size());
  out.mean /= n;
  if (xs.size() > 1) {
    double ss = 0;
    for (double x : xs) ss += (x - out.mean) * (x - out.mean);
    out.se = std::sqrt(ss / (n - 1) / n);
  }
  return out;
}

}  // namespace

void EnsembleAccumulator::add(RealizationRecord record) {
  if (record.status == RecordStatus::done && job_.observables.L_of_t &&
      record.L_of_t.size() != job_.time_grid.size())
    throw DomainError("record " + std::to_string(record.index) + " has a different time grid");
  records_.push_back(std::move(record));
}

void EnsembleAccumulator::merge(const EnsembleAccumulator& other) {
  if (!(other.job_ == job_)) throw DomainError("cannot merge accumulators of different jobs");
  for (const auto& r : other.records_) add(r);
}

EnsembleSummary EnsembleAccumulator::finalize() const {
  std::vector<const RealizationRecord*> sorted;
  sorted.reserve(records_.size());
  for (const auto& r : records_) sorted.push_back(&r);
  std::sort(sorted.begin(), sorted.end(),
            [](const auto* a, const auto* b) { return record_less(*a, *b); });

  std::vector<const RealizationRecord*> done;
  EnsembleSummary s;
  for (const auto* r : sorted) {
    if (r->status == RecordStatus::done)
      done.push_back(r);
    else
      ++s.n_failed;
  }
  s.n_completed = done.size();
  s.time_grid = job_.time_grid;
  const double n_side = job_.spec.n_per_dim;

  if (job_.observables.L_of_t && !done.empty()) {
    const std::size_t nt = job_.time_grid.size();
    s.mean_L.resize(nt);
    s.se_L.resize(nt);
    s.edge_fraction_of_t.resize(nt);
    std::vector<double> column(done.size());
    for (std::size_t j = 0; j < nt; ++j) {
      std::size_t at_edge = 0;
      for (std::size_t r = 0; r < done.size(); ++r) {
        column[r] = done[r]->L_of_t[j];
        if (column[r] >= n_side) ++at_edge;
      }
      const MeanAndError me = mean_and_error(column);
      s.mean_L[j] = me.mean;
      s.se_L[j] = me.se;
      s.edge_fraction_of_t[j] = static_cast<double>(at_edge) / static_cast<double>(done.size());
    }
    s.edge_fraction = s.edge_fraction_of_t.back();
    s.se_final_L = s.se_L.back();
  }

  if (!done.empty()) {
    s.min_i_min_ratio = std::numeric_limits<double>::infinity();
    std::vector<double> ratios;
    for (const auto* r : done) {
      s.min_i_min_ratio = std::min(s.min_i_min_ratio, r->i_min_ratio);
      ratios.push_back(r->i_min_ratio);
    }
    s.mean_i_min_ratio = mean_and_error(ratios).mean;
  }

  if (job_.observables.ipr) {
    s.ipr_histogram.assign(IprBins::kCount, 0);
    for (const auto* r : done)
      for (std::size_t b = 0; b < r->ipr_histogram.size() && b < s.ipr_histogram.size(); ++b)
        s.ipr_histogram[b] += r->ipr_histogram[b];
  }

  if (job_.observables.heisenberg) {
    std::vector<double> th;
    for (const auto* r : done)
      if (r->t_heisenberg) th.push_back(*r->t_heisenberg);
    if (!th.empty()) {
      const MeanAndError me = mean_and_error(th);
      s.mean_t_heisenberg = me.mean;
      s.se_t_heisenberg = me.se;
    }
  }

  if (job_.observables.shells) {
    ShellSamples pooled;
    pooled.shell_width = job_.shell_width;
    for (const auto* r : done)
      if (r->shell_samples) pooled.merge(*r->shell_samples);
    s.shells = std::move(pooled);
  }

  s.converged = job_.observables.L_of_t && is_converged(s, job_.spec);
  return s;
}

EnsembleSummary aggregate(std::span<const RealizationRecord> records, const EnsembleJob& job) {
  EnsembleAccumulator acc(job);
  for (const auto& r : records) acc.add(r);
  return acc.finalize();
}

// --- parallel driver ---------------------------------------------------------------

namespace {

std::vector<RealizationRecord> load_records(const std::filesystem::path& path,
                                            const EnsembleJob& job) {
  std::vector<RealizationRecord> out;
  std::ifstream in(path);
  if (!in) return out;
  std::set<std::uint64_t> seen;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
    if (j.is_discarded()) continue;  // torn write from an interrupted run
    RealizationRecord r = record_from_json(j, job);
    if (r.index >= static_cast<std::uint64_t>(job.n_realizations)) continue;
    if (!seen.insert(r.index).second) continue;
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace

EnsembleRun run_ensemble(const EnsembleJob& job, const RunOptions& options) {
  job.validate();
  if (options.workers < 1) throw DomainError("workers must be >= 1");
  if (options.checkpoint_dir) std::filesystem::create_directories(*options.checkpoint_dir);

  EnsembleRun run;
  std::vector<std::optional<RealizationRecord>> slots(static_cast<std::size_t>(job.n_realizations));
  if (options.record_file) {
    for (auto& r : load_records(*options.record_file, job)) {
      const auto i = static_cast<std::size_t>(r.index);
      slots[i] = std::move(r);
      ++run.resumed;
    }
  }

  std::ofstream writer;
  if (options.record_file) {
    if (options.record_file->has_parent_path())
      std::filesystem::create_directories(options.record_file->parent_path());
    bool needs_newline = false;
    if (std::ifstream last(*options.record_file, std::ios::binary); last && last.seekg(-1, std::ios::end)) {
      char c = '\n';
      last.get(c);
      needs_newline = c != '\n';
    }
    writer.open(*options.record_file, std::ios::app);
    if (!writer) throw DomainError("cannot open record file " + options.record_file->string());
    // Terminate a torn last line so the next record starts on its own line.
    if (needs_newline) writer << '\n';
  }
  std::mutex writer_mutex;
  std::atomic<std::size_t> launched{0};
  std::atomic<std::size_t> finished{run.resumed};
  const std::size_t budget = options.max_new_records.value_or(std::numeric_limits<std::size_t>::max());

  const std::size_t total = slots.size();
  const std::size_t batch = job.min_realizations > 0
                                ? static_cast<std::size_t>(job.min_realizations)
                                : total;
  std::size_t end = 0;
  while (end < total) {
    const std::size_t begin = end;
    end = std::min(total, begin + batch);
    std::vector<std::size_t> pending;
    for (std::size_t i = begin; i < end; ++i)
      if (!slots[i]) pending.push_back(i);

#pragma omp parallel for schedule(dynamic, 1) num_threads(options.workers)
    for (std::size_t k = 0; k < pending.size(); ++k) {
      if (launched.fetch_add(1) >= budget) continue;
      const std::size_t i = pending[k];
      RealizationRecord rec = run_realization(job, i, options.checkpoint_dir);
      {
        std::lock_guard lock(writer_mutex);
        if (writer.is_open()) {
          writer << record_to_json(rec, job).dump() << '\n';
          writer.flush();
        }
        slots[i] = std::move(rec);
        const std::size_t done = ++finished;
        if (options.progress) options.progress(done, total);
      }
    }

    if (launched.load() >= budget && std::any_of(slots.begin(), slots.begin() + static_cast<std::ptrdiff_t>(end),
                                                 [](const auto& s) { return !s; })) {
      run.interrupted = true;
      break;
    }
    if (job.min_realizations > 0 && end < total) {
      EnsembleAccumulator partial(job);
      for (std::size_t i = 0; i < end; ++i) partial.add(*slots[i]);
      if (partial.finalize().converged) break;
    }
  }

  // Records past an early-stop point (e.g. left over from a longer run) are ignored.
  EnsembleAccumulator acc(job);
  for (std::size_t i = 0; i < end; ++i)
    if (slots[i]) acc.add(*slots[i]);
  run.summary = acc.finalize();
  run.records = acc.records();
  std::sort(run.records.begin(), run.records.end(),
            [](const auto& a, const auto& b) { return a.index < b.index; });

  const std::size_t attempted = run.summary.n_completed + run.summary.n_failed;
  if (!run.interrupted && attempted > 0 &&
      static_cast<double>(run.summary.n_failed) > 0.01 * static_cast<double>(attempted)) {
    std::string first_error;
    for (const auto& r : run.records)
      if (r.status == RecordStatus::failed) {
        first_error = r.error;
        break;
      }
    throw NumericError(std::to_string(run.summary.n_failed) + " of " + std::to_string(attempted) +
                       " realizations failed; first error: " + first_error);
  }
  return run;
}

}  // namespace lrloc
