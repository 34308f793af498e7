#include "lrloc/records.hpp"

#include <cmath>

#include "lrloc/errors.hpp"
#include "lrloc/hamiltonian.hpp"
#include "lrloc/phase.hpp"

namespace lrloc {

using nlohmann::json;

std::string_view software_version() { return LRLOC_VERSION; }

json to_json(const LatticeSpec& spec) {
  return json{{"n_per_dim", spec.n_per_dim},
              {"alpha", spec.alpha},
              {"nn_amplitude", spec.nn_amplitude},
              {"occupation", spec.occupation},
              {"disorder_width", spec.disorder_width},
              {"boundary", "open"}};
}

LatticeSpec spec_from_json(const json& j) {
  LatticeSpec s;
  s.n_per_dim = j.at("n_per_dim").get<int>();
  s.alpha = j.at("alpha").get<double>();
  s.nn_amplitude = j.at("nn_amplitude").get<double>();
  s.occupation = j.at("occupation").get<double>();
  s.disorder_width = j.at("disorder_width").get<double>();
  if (j.at("boundary").get<std::string>() != "open") throw DomainError("unknown boundary rule");
  return s;
}

namespace {

json observables_json(const ObservableSet& o) {
  json out = json::array();
  if (o.L_of_t) out.push_back("L_of_t");
  if (o.ipr) out.push_back("ipr");
  if (o.shells) out.push_back("shells");
  if (o.heisenberg) out.push_back("heisenberg");
  return out;
}

json shell_stats(const ShellSamples& s) {
  json out = json::array();
  for (const auto& [k, samples] : s.shells) {
    double mean = 0;
    for (const auto& x : samples) mean += x.log_amplitude;
    const double n = static_cast<double>(samples.size());
    mean /= n;
    double var = 0;
    for (const auto& x : samples) var += (x.log_amplitude - mean) * (x.log_amplitude - mean);
    out.push_back({{"shell", k},
                   {"r_lower", k * s.shell_width},
                   {"mean_radius", s.mean_radius(k)},
                   {"count", samples.size()},
                   {"mean_log_amplitude", mean},
                   {"var_log_amplitude", samples.size() > 1 ? var / (n - 1) : 0.0}});
  }
  return out;
}

}  // namespace

json to_json(const EnsembleJob& job) {
  return json{{"spec", to_json(job.spec)},
              {"n_realizations", job.n_realizations},
              {"min_realizations", job.min_realizations},
              {"master_seed", job.master_seed},
              {"time_grid", job.time_grid},
              {"observables", observables_json(job.observables)},
              {"coverage", job.coverage},
              {"shell_width", job.shell_width},
              {"shell_max_radius", job.shell_max_radius}};
}

json to_json(const ShellSamples& shells) {
  json by_shell = json::object();
  for (const auto& [k, samples] : shells.shells) {
    json arr = json::array();
    for (const auto& x : samples) arr.push_back(json::array({x.radius, x.log_amplitude}));
    by_shell[std::to_string(k)] = std::move(arr);
  }
  return json{{"shell_width", shells.shell_width}, {"shells", std::move(by_shell)}};
}

ShellSamples shells_from_json(const json& j) {
  ShellSamples s;
  s.shell_width = j.at("shell_width").get<double>();
  for (const auto& [key, arr] : j.at("shells").items()) {
    auto& dst = s.shells[std::stoi(key)];
    for (const auto& pair : arr) dst.push_back({pair.at(0).get<double>(), pair.at(1).get<double>()});
  }
  return s;
}

json record_to_json(const RealizationRecord& r, const EnsembleJob& job) {
  json j{{"schema_version", kRecordSchemaVersion},
         {"software_version", software_version()},
         {"rng_id", rng::kRngId},
         {"spec", to_json(job.spec)},
         {"grid", job.time_grid},
         {"observables", observables_json(job.observables)},
         {"master_seed", job.master_seed},
         {"index", r.index},
         {"seed", r.seed},
         {"occupied_count", r.occupied_count},
         {"L_of_t", r.L_of_t},
         {"i_min_ratio", r.i_min_ratio},
         {"ipr_histogram", r.ipr_histogram},
         {"status", r.status == RecordStatus::done ? "done" : "failed"}};
  j["shell_samples"] = r.shell_samples ? to_json(*r.shell_samples) : json(nullptr);
  j["t_heisenberg"] = r.t_heisenberg ? json(*r.t_heisenberg) : json(nullptr);
  if (!r.error.empty()) j["error"] = r.error;
  return j;
}

RealizationRecord record_from_json(const json& j, const EnsembleJob& job) {
  if (j.at("schema_version").get<int>() != kRecordSchemaVersion)
    throw DomainError("unsupported record schema version");
  if (spec_from_json(j.at("spec")) != job.spec || j.at("grid").get<std::vector<double>>() != job.time_grid ||
      j.at("master_seed").get<std::uint64_t>() != job.master_seed ||
      j.at("observables") != observables_json(job.observables))
    throw DomainError("record belongs to a different job");

  RealizationRecord r;
  r.index = j.at("index").get<std::uint64_t>();
  r.seed = j.at("seed").get<std::uint64_t>();
  r.occupied_count = j.at("occupied_count").get<std::uint64_t>();
  r.L_of_t = j.at("L_of_t").get<std::vector<double>>();
  r.i_min_ratio = j.at("i_min_ratio").get<double>();
  r.ipr_histogram = j.at("ipr_histogram").get<std::vector<std::uint64_t>>();
  if (!j.at("shell_samples").is_null()) r.shell_samples = shells_from_json(j.at("shell_samples"));
  if (!j.at("t_heisenberg").is_null()) r.t_heisenberg = j.at("t_heisenberg").get<double>();
  r.status = j.at("status").get<std::string>() == "done" ? RecordStatus::done : RecordStatus::failed;
  if (j.contains("error")) r.error = j.at("error").get<std::string>();
  return r;
}

json summary_to_json(const EnsembleSummary& s, const EnsembleJob& job) {
  json ipr_bins = json::array();
  for (int b = 0; b < IprBins::kCount; ++b)
    ipr_bins.push_back(json::array({IprBins::lower_edge(b), IprBins::upper_edge(b)}));

  const double t_max = job.time_grid.empty() ? 0.0 : job.time_grid.back();
  json j{{"schema_version", kSummarySchemaVersion},
         {"software_version", software_version()},
         {"rng_id", rng::kRngId},
         {"eigensolver", kEigensolverId},
         {"phase_reduction", "double-double product, triple-double 2pi"},
         {"phase_error_bound_rad", reduced_phase_error_bound(1e2, std::max(t_max, 1.0))},
         {"job", to_json(job)},
         {"n_completed", s.n_completed},
         {"n_failed", s.n_failed},
         {"converged", s.converged},
         {"se_final_L", s.se_final_L},
         {"time_grid", s.time_grid},
         {"mean_L", s.mean_L},
         {"se_L", s.se_L},
         {"edge_fraction_of_t", s.edge_fraction_of_t},
         {"edge_fraction", s.edge_fraction},
         {"ipr_histogram", {{"bins", ipr_bins}, {"counts", s.ipr_histogram}}},
         {"min_i_min_ratio", s.min_i_min_ratio},
         {"mean_i_min_ratio", s.mean_i_min_ratio}};
  j["mean_t_heisenberg"] = s.mean_t_heisenberg ? json(*s.mean_t_heisenberg) : json(nullptr);
  j["se_t_heisenberg"] = s.se_t_heisenberg ? json(*s.se_t_heisenberg) : json(nullptr);
  j["shells"] = s.shells ? shell_stats(*s.shells) : json(nullptr);
  return j;
}

std::string dump_stable(const json& j) { return j.dump(2) + "\n"; }

}  // namespace lrloc
