#include "options.hpp"

#include <algorithm>

#include "lrloc/dynamics.hpp"
#include "lrloc/errors.hpp"
#include "lrloc/records.hpp"

namespace lrloc::cli {

LatticeSpec RunConfig::spec() const {
  LatticeSpec s;
  s.n_per_dim = n;
  s.alpha = alpha;
  s.nn_amplitude = nn_amplitude;
  s.occupation = p;
  s.disorder_width = w;
  return s;
}

std::vector<double> RunConfig::time_grid() const {
  return log_time_grid(time_min, time_max, time_points);
}

EnsembleJob RunConfig::ensemble_job(const ObservableSet& observables) const {
  EnsembleJob job;
  job.spec = spec();
  job.n_realizations = realizations;
  job.min_realizations = min_realizations;
  job.master_seed = seed;
  job.observables = observables;
  if (observables.L_of_t || observables.shells) job.time_grid = time_grid();
  job.coverage = coverage;
  job.shell_width = shell_width;
  job.shell_max_radius = shell_max_radius;
  return job;
}

void RunConfig::validate() const {
  if (workers < 1) throw DomainError("--workers must be >= 1");
  if (realizations < 1) throw DomainError("--realizations must be >= 1");
  if (min_realizations < 0) throw DomainError("--min-realizations must be >= 0");
  if (time_points < 2) throw DomainError("--time-points must be >= 2");
  if (!(time_min > 0) || !(time_max > time_min))
    throw DomainError("need 0 < --time-min < --time-max");
  if (!(coverage > 0 && coverage < 1)) throw DomainError("--coverage must lie in (0, 1)");
  if (command == "phase-scan") {
    if (p_grid.empty() || w_grid.empty()) throw DomainError("--p-grid and --w-grid must be non-empty");
    if (!(lo < hi)) throw DomainError("need --lo < --hi");
    for (double x : p_grid)
      if (!(x > 0 && x <= 1)) throw DomainError("--p-grid values must lie in (0, 1]");
    for (double x : w_grid)
      if (!(x >= 0)) throw DomainError("--w-grid values must be >= 0");
    LatticeSpec s = spec();
    s.occupation = 1.0;
    s.disorder_width = 0.0;
    s.validate();
    if (!s.has_center()) throw DomainError("--n must be odd for wavepacket observables");
  } else if (command == "scaling") {
    if (n_list.size() < 2) throw DomainError("--n-list needs at least two sizes");
    for (int x : n_list)
      if (x < 3 || x % 2 == 0) throw DomainError("--n-list sizes must be odd and >= 3");
    for (int x : predict_n)
      if (x < 3 || x % 2 == 0) throw DomainError("--predict-n sizes must be odd and >= 3");
    if (!(target > 0 && target < 1)) throw DomainError("--target must lie in (0, 1)");
    if (p_grid.size() < 3) throw DomainError("--p-grid needs at least three points");
    for (double x : p_grid)
      if (!(x > 0 && x <= 1)) throw DomainError("--p-grid values must lie in (0, 1]");
  } else {
    const bool wavepacket = command != "ipr";
    ensemble_job(ObservableSet{wavepacket, true, command == "collapse", false}).validate();
  }
}

nlohmann::json RunConfig::echo() const {
  nlohmann::json j{{"command", command}};
  if (command == "scaling") {
    j["n_list"] = n_list;
    j["predict_n"] = predict_n;
    j["target"] = target;
    j["p_grid"] = p_grid;
    j["gamma"] = nn_amplitude;
    j["w_max"] = w_max;
    return j;
  }
  j["n"] = n;
  j["alpha"] = alpha;
  j["nn_amplitude"] = nn_amplitude;
  if (command == "phase-scan") {
    j["p_grid"] = p_grid;
    j["w_grid"] = w_grid;
    j["lo"] = lo;
    j["hi"] = hi;
  } else {
    j["p"] = p;
    j["w"] = w;
  }
  j["realizations"] = realizations;
  j["min_realizations"] = min_realizations;
  j["seed"] = seed;
  if (command != "ipr") {
    j["time_min"] = time_min;
    j["time_max"] = time_max;
    j["time_points"] = time_points;
    j["coverage"] = coverage;
  }
  if (command == "collapse") {
    j["shell_width"] = shell_width;
    j["shell_max_radius"] = shell_max_radius;
    j["min_samples"] = min_samples;
    j["min_shells"] = min_shells;
  }
  return j;
}

void add_ensemble_options(CLI::App& sub, RunConfig& c) {
  sub.add_option("--n", c.n, "Lattice side N (odd unless only IPRs are computed)")->capture_default_str();
  sub.add_option("--p", c.p, "Occupied fraction p")->capture_default_str();
  sub.add_option("--w", c.w, "Disorder width w")->capture_default_str();
  sub.add_option("--alpha", c.alpha, "Hopping exponent")->capture_default_str();
  sub.add_option("--t-nn", c.nn_amplitude, "Nearest-neighbour hopping")->capture_default_str();
  sub.add_option("--realizations", c.realizations, "Number of disorder realizations (cap)")
      ->capture_default_str();
  sub.add_option("--min-realizations", c.min_realizations,
                 "Batch size for early stopping once converged (0: run all)")
      ->capture_default_str();
  sub.add_option("--seed", c.seed, "Master seed")->capture_default_str();
  sub.add_option("--time-min", c.time_min, "First time of the log grid")->capture_default_str();
  sub.add_option("--time-max", c.time_max, "Last time of the log grid")->capture_default_str();
  sub.add_option("--time-points", c.time_points, "Points in the log time grid")->capture_default_str();
  sub.add_option("--coverage", c.coverage, "Density fraction inside the sphere defining L")
      ->capture_default_str();
}

void add_execution_options(CLI::App& sub, RunConfig& c) {
  sub.add_option("--workers", c.workers, "Parallel workers")->capture_default_str();
  sub.add_option("--out", c.out, "Output directory")->capture_default_str();
  sub.add_option("--checkpoint", c.checkpoint_dir, "Directory for eigensystem checkpoints");
  sub.add_option("--max-new-records", c.max_new_records,
                 "Stop after this many new realizations (resume later)");
  sub.add_flag("--progress", c.progress, "Print a progress line on stderr");
}

void add_collapse_options(CLI::App& sub, RunConfig& c) {
  sub.add_option("--shell-width", c.shell_width, "Shell width in lattice constants")->capture_default_str();
  sub.add_option("--shell-max-radius", c.shell_max_radius, "Largest radius sampled")->capture_default_str();
  sub.add_option("--min-samples", c.min_samples, "Pooled samples a shell needs to enter the fit")
      ->capture_default_str();
  sub.add_option("--min-shells", c.min_shells, "Shells the fit needs")->capture_default_str();
}

void add_phase_scan_options(CLI::App& sub, RunConfig& c) {
  sub.add_option("--p-grid", c.p_grid, "Comma-separated p values")->delimiter(',')->capture_default_str();
  sub.add_option("--w-grid", c.w_grid, "Comma-separated w values")->delimiter(',')->capture_default_str();
  sub.add_option("--lo", c.lo, "Edge fraction at or below which a point is localized")->capture_default_str();
  sub.add_option("--hi", c.hi, "Edge fraction at or above which a point is diffusive")->capture_default_str();
}

void add_scaling_options(CLI::App& sub, RunConfig& c) {
  sub.add_option("--n-list", c.n_list, "Lattice sizes fitted")->delimiter(',')->capture_default_str();
  sub.add_option("--predict-n", c.predict_n, "Sizes solved directly and compared to the fit")
      ->delimiter(',');
  sub.add_option("--target", c.target, "No-resonance probability of the lines")->capture_default_str();
  sub.add_option("--p-grid", c.p_grid, "Comma-separated p values")->delimiter(',')->capture_default_str();
  sub.add_option("--gamma", c.nn_amplitude, "Hopping amplitude t~ a^alpha")->capture_default_str();
  sub.add_option("--w-max", c.w_max, "Upper end of the w bisection")->capture_default_str();
}

}  // namespace lrloc::cli
