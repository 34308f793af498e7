#include "lrloc/phase_scan.hpp"

#include <algorithm>
#include <limits>

#include "lrloc/errors.hpp"
#include "lrloc/records.hpp"

namespace lrloc {

std::string_view to_string(Classification c) {
  switch (c) {
    case Classification::localized: return "localized";
    case Classification::crossover: return "crossover";
    case Classification::diffusive: return "diffusive";
  }
  return "?";
}

Classification classify_edge_fraction(double edge_fraction, const ClassifyThresholds& t) {
  if (edge_fraction >= t.hi) return Classification::diffusive;
  if (edge_fraction <= t.lo) return Classification::localized;
  return Classification::crossover;
}

Classification classify_point(const EnsembleSummary& summary, const LatticeSpec& spec,
                              const ClassifyThresholds& thresholds) {
  if (!is_converged(summary, spec))
    throw UnconvergedError("ensemble at p=" + std::to_string(spec.occupation) +
                           ", w=" + std::to_string(spec.disorder_width) +
                           " has not converged (se of final L = " +
                           std::to_string(summary.se_final_L) + ")");
  return classify_edge_fraction(summary.edge_fraction, thresholds);
}

EnsembleJob PhaseScanJob::point_job(std::size_t k) const {
  if (k >= point_count()) throw DomainError("phase point index out of range");
  EnsembleJob job;
  job.spec = base;
  job.spec.occupation = p_grid[k / w_grid.size()];
  job.spec.disorder_width = w_grid[k % w_grid.size()];
  job.n_realizations = n_realizations;
  job.min_realizations = min_realizations;
  job.master_seed = rng::seed_for(master_seed, k);
  job.time_grid = time_grid;
  job.observables = ObservableSet{true, false, false, false};
  job.coverage = coverage;
  return job;
}

bool PhaseScanResult::all_converged() const {
  return std::all_of(points.begin(), points.end(), [](const PhasePoint& p) { return p.converged; });
}

PhaseScanResult run_phase_scan(const PhaseScanJob& job, const PhaseScanOptions& options) {
  if (job.p_grid.empty() || job.w_grid.empty()) throw DomainError("phase grid is empty");
  if (!(job.thresholds.lo < job.thresholds.hi)) throw DomainError("thresholds need lo < hi");

  PhaseScanResult result;
  std::size_t budget = options.max_new_records.value_or(std::numeric_limits<std::size_t>::max());
  for (std::size_t k = 0; k < job.point_count(); ++k) {
    const EnsembleJob pj = job.point_job(k);
    RunOptions ro;
    ro.workers = options.workers;
    if (options.record_dir) ro.record_file = *options.record_dir / ("point_" + std::to_string(k) + ".jsonl");
    if (options.max_new_records) ro.max_new_records = budget;
    const EnsembleRun run = run_ensemble(pj, ro);
    if (options.max_new_records) {
      const std::size_t fresh = run.records.size() - std::min(run.records.size(), run.resumed);
      budget -= std::min(budget, fresh);
    }

    PhasePoint pt;
    pt.p = pj.spec.occupation;
    pt.w = pj.spec.disorder_width;
    pt.mean_final_L = run.summary.mean_L.empty() ? 0.0 : run.summary.mean_L.back();
    pt.edge_fraction = run.summary.edge_fraction;
    pt.converged = run.summary.converged;
    pt.classification = classify_edge_fraction(pt.edge_fraction, job.thresholds);
    result.points.push_back(pt);
    result.summaries.push_back(run.summary);
    if (run.interrupted) {
      result.interrupted = true;
      break;
    }
  }
  return result;
}

nlohmann::json to_json(const PhaseScanJob& job) {
  return nlohmann::json{{"base_spec", to_json(job.base)},
                        {"p_grid", job.p_grid},
                        {"w_grid", job.w_grid},
                        {"n_realizations", job.n_realizations},
                        {"min_realizations", job.min_realizations},
                        {"master_seed", job.master_seed},
                        {"time_grid", job.time_grid},
                        {"coverage", job.coverage},
                        {"thresholds", {{"lo", job.thresholds.lo}, {"hi", job.thresholds.hi}}}};
}

nlohmann::json phase_scan_summary_json(const PhaseScanResult& result, const PhaseScanJob& job) {
  nlohmann::json points = nlohmann::json::array();
  for (std::size_t k = 0; k < result.points.size(); ++k) {
    const auto& pt = result.points[k];
    points.push_back({{"p", pt.p},
                      {"w", pt.w},
                      {"classification", to_string(pt.classification)},
                      {"mean_final_L", pt.mean_final_L},
                      {"edge_fraction", pt.edge_fraction},
                      {"converged", pt.converged},
                      {"summary", summary_to_json(result.summaries[k], job.point_job(k))}});
  }
  return nlohmann::json{{"schema_version", kSummarySchemaVersion},
                        {"software_version", software_version()},
                        {"rng_id", rng::kRngId},
                        {"job", to_json(job)},
                        {"interrupted", result.interrupted},
                        {"points", std::move(points)}};
}

}  // namespace lrloc
