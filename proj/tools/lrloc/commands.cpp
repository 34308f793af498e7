#include "commands.hpp"

#include <cmath>
#include <iostream>
#include <string>

#include "lrloc/errors.hpp"
#include "lrloc/phase_scan.hpp"
#include "lrloc/records.hpp"
#include "lrloc/scaling.hpp"
#include "output.hpp"

namespace lrloc::cli {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

json metadata(const RunConfig& c) {
  return json{{"schema_version", kSummarySchemaVersion},
              {"rng_id", rng::kRngId},
              {"master_seed", c.seed},
              {"config", c.echo()}};
}

json with_config(json j, const RunConfig& c) {
  j["config"] = c.echo();
  return j;
}

RunOptions run_options(const RunConfig& c, const fs::path& record_file) {
  RunOptions ro;
  ro.workers = c.workers;
  ro.record_file = record_file;
  ro.checkpoint_dir = c.checkpoint_dir;
  ro.max_new_records = c.max_new_records;
  if (c.progress)
    ro.progress = [](std::size_t done, std::size_t total) {
      std::cerr << "\rrealizations " << done << "/" << total << std::flush;
      if (done == total) std::cerr << '\n';
    };
  return ro;
}

// Runs the ensemble or reports an interruption; nullopt means nothing to write yet.
std::optional<EnsembleRun> run_or_pause(const EnsembleJob& job, const RunConfig& c,
                                        const std::string& stem) {
  fs::create_directories(c.out);
  EnsembleRun run = run_ensemble(job, run_options(c, c.out / (stem + "_records.jsonl")));
  if (run.interrupted) {
    std::cerr << "stopped after " << run.records.size() << " of " << job.n_realizations
              << " realizations; rerun the same command to resume\n";
    return std::nullopt;
  }
  return run;
}

int convergence_exit(const EnsembleSummary& s, const RunConfig& c) {
  if (c.min_realizations > 0 && !s.converged) {
    std::cerr << "ensemble not converged: se of final L = " << s.se_final_L
              << " (need < " << 0.02 * c.n << ")\n";
    return 4;
  }
  return 0;
}

}  // namespace

int cmd_dynamics(const RunConfig& c) {
  const EnsembleJob job = c.ensemble_job(ObservableSet{true, false, false, true});
  const auto run = run_or_pause(job, c, "dynamics");
  if (!run) return 0;
  const EnsembleSummary& s = run->summary;
  write_json(c.out / "dynamics_summary.json", with_config(summary_to_json(s, job), c));

  CsvWriter csv(c.out / "L_of_t.csv", metadata(c), {"t", "mean_L", "se_L", "edge_fraction"});
  for (std::size_t j = 0; j < s.time_grid.size(); ++j) {
    csv.cell(s.time_grid[j]).cell(s.mean_L[j]).cell(s.se_L[j]).cell(s.edge_fraction_of_t[j]);
    csv.end_row();
  }
  return convergence_exit(s, c);
}

int cmd_ipr(const RunConfig& c) {
  const EnsembleJob job = c.ensemble_job(ObservableSet{false, true, false, false});
  const auto run = run_or_pause(job, c, "ipr");
  if (!run) return 0;
  const EnsembleSummary& s = run->summary;
  write_json(c.out / "ipr_summary.json", with_config(summary_to_json(s, job), c));

  std::uint64_t total = 0;
  for (auto n : s.ipr_histogram) total += n;
  CsvWriter hist(c.out / "ipr_hist.csv", metadata(c), {"bin_lower", "bin_upper", "count", "fraction"});
  for (int b = 0; b < IprBins::kCount; ++b) {
    const auto n = s.ipr_histogram[static_cast<std::size_t>(b)];
    hist.cell(IprBins::lower_edge(b)).cell(IprBins::upper_edge(b)).cell(static_cast<long long>(n));
    hist.cell(total ? static_cast<double>(n) / static_cast<double>(total) : 0.0);
    hist.end_row();
  }

  CsvWriter ratios(c.out / "i_min_ratio.csv", metadata(c),
                   {"index", "seed", "occupied_count", "i_min_ratio"});
  for (const auto& r : run->records) {
    if (r.status != RecordStatus::done) continue;
    ratios.cell(static_cast<long long>(r.index)).cell(std::to_string(r.seed));
    ratios.cell(static_cast<long long>(r.occupied_count)).cell(r.i_min_ratio);
    ratios.end_row();
  }
  return 0;
}

int cmd_collapse(const RunConfig& c) {
  const EnsembleJob job = c.ensemble_job(ObservableSet{false, false, true, false});
  const auto run = run_or_pause(job, c, "collapse");
  if (!run) return 0;
  const EnsembleSummary& s = run->summary;
  write_json(c.out / "collapse_summary.json", with_config(summary_to_json(s, job), c));

  CollapseFit fit;
  try {
    fit = lognormal_collapse_fit(*s.shells, {}, CollapseOptions{c.min_samples, c.min_shells, 4000});
  } catch (const DomainError& e) {
    std::cerr << "collapse fit: " << e.what() << "; increase --realizations\n";
    return 4;
  }

  json out{{"schema_version", kSummarySchemaVersion},
           {"software_version", software_version()},
           {"rng_id", rng::kRngId},
           {"master_seed", c.seed},
           {"loc_length", fit.loc_length},
           {"sigma", fit.sigma},
           {"goodness", fit.goodness},
           {"shell_indices", fit.shell_indices},
           {"shells_used", fit.shells_used},
           {"shell_width", job.shell_width},
           {"objective", fit.objective},
           {"iterations", fit.iterations},
           {"n_completed", s.n_completed}};
  write_json(c.out / "collapse_fit.json", with_config(out, c));

  CsvWriter csv(c.out / "collapse_histograms.csv", metadata(c), {"shell", "mean_radius", "x", "density"});
  for (const auto& h : scaled_histograms(*s.shells, fit.shell_indices, fit.loc_length, fit.sigma))
    for (std::size_t b = 0; b < h.x_center.size(); ++b) {
      csv.cell(static_cast<long long>(h.shell)).cell(h.mean_radius).cell(h.x_center[b]).cell(h.density[b]);
      csv.end_row();
    }
  return 0;
}

int cmd_phase_scan(const RunConfig& c) {
  PhaseScanJob job;
  job.base = c.spec();
  job.p_grid = c.p_grid;
  job.w_grid = c.w_grid;
  job.n_realizations = c.realizations;
  job.min_realizations = c.min_realizations;
  job.master_seed = c.seed;
  job.time_grid = c.time_grid();
  job.coverage = c.coverage;
  job.thresholds = {c.lo, c.hi};

  fs::create_directories(c.out);
  PhaseScanOptions options;
  options.workers = c.workers;
  options.record_dir = c.out / "phase_records";
  options.max_new_records = c.max_new_records;
  const PhaseScanResult result = run_phase_scan(job, options);
  if (result.interrupted) {
    std::cerr << "phase scan stopped at point " << result.points.size() << " of "
              << job.point_count() << "; rerun the same command to resume\n";
    return 0;
  }
  write_json(c.out / "phase_scan.json", with_config(phase_scan_summary_json(result, job), c));

  CsvWriter csv(c.out / "phase_grid.csv", metadata(c),
                {"p", "w", "mean_final_L", "edge_fraction", "classification"});
  for (const auto& pt : result.points) {
    csv.cell(pt.p).cell(pt.w).cell(pt.mean_final_L).cell(pt.edge_fraction).cell(to_string(pt.classification));
    csv.end_row();
  }
  if (!result.all_converged()) {
    std::cerr << "some grid points did not converge (see \"converged\" in phase_scan.json)\n";
    return 4;
  }
  return 0;
}

int cmd_scaling(const RunConfig& c) {
  fs::create_directories(c.out);
  const IsoprobabilityOptions iso{c.nn_amplitude, c.w_max, 1e-4};

  auto write_line = [&](const CrossoverLine& line) {
    CsvWriter csv(c.out / ("scaling_N" + std::to_string(line.n_per_dim) + ".csv"), metadata(c),
                  {"p", "w_solved"});
    for (std::size_t i = 0; i < line.p.size(); ++i) {
      csv.cell(line.p[i]).cell(line.w[i]);
      csv.end_row();
    }
  };

  std::vector<CrossoverLine> lines;
  json unreachable = json::object();
  for (int n : c.n_list) {
    lines.push_back(isoprobability_line(n, c.target, c.p_grid, iso));
    write_line(lines.back());
    if (!lines.back().unreachable_p.empty()) unreachable[std::to_string(n)] = lines.back().unreachable_p;
  }
  const CrossoverFit fit = fit_crossover_line(lines, c.nn_amplitude);

  json predictions = json::array();
  for (int n : c.predict_n) {
    const CrossoverLine line = isoprobability_line(n, c.target, c.p_grid, iso);
    write_line(line);
    for (std::size_t i = 0; i < line.p.size(); ++i) {
      const double predicted = crossover_w(fit, line.p[i], n, c.nn_amplitude);
      predictions.push_back({{"N", n},
                             {"p", line.p[i]},
                             {"w_solved", line.w[i]},
                             {"w_predicted", predicted},
                             {"rel_error", std::abs(predicted - line.w[i]) / line.w[i]}});
    }
  }

  json out{{"schema_version", kSummarySchemaVersion},
           {"software_version", software_version()},
           {"rng_id", rng::kRngId},
           {"master_seed", c.seed},
           {"A", fit.A},
           {"B", fit.B},
           {"residuals", fit.residuals},
           {"rms_residual", fit.rms_residual},
           {"N_list", fit.n_list},
           {"target", c.target},
           {"unreachable_p", unreachable},
           {"predictions", predictions}};
  write_json(c.out / "scaling_fit.json", with_config(out, c));
  return 0;
}

}  // namespace lrloc::cli
