#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "lrloc/dynamics.hpp"
#include "lrloc/observables.hpp"
#include "lrloc/reference.hpp"

namespace fs = std::filesystem;

namespace {

const fs::path kRoot = fs::temp_directory_path() / "lrloc_cli_tests";

int run(const std::string& args) {
  const std::string cmd = std::string(LRLOC_CLI) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

fs::path fresh(const std::string& name) {
  const fs::path p = kRoot / name;
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct Csv {
  std::vector<std::string> metadata;
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  return out;
}

Csv read_csv(const fs::path& p) {
  Csv csv;
  std::ifstream in(p);
  std::string line;
  while (std::getline(in, line)) {
    if (line.starts_with("#")) csv.metadata.push_back(line);
    else if (csv.header.empty()) csv.header = split(line);
    else csv.rows.push_back(split(line));
  }
  return csv;
}

nlohmann::json read_json(const fs::path& p) { return nlohmann::json::parse(slurp(p)); }

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("dynamics writes an L(t) table with 60 rows and metadata") {
  const auto out = fresh("dyn");
  REQUIRE(run("dynamics --n 7 --p 0.5 --w 20 --realizations 8 --seed 7 --out " + out.string()) == 0);
  const Csv csv = read_csv(out / "L_of_t.csv");
  CHECK(csv.header == std::vector<std::string>{"t", "mean_L", "se_L", "edge_fraction"});
  CHECK(csv.rows.size() == 60);
  CHECK(std::stod(csv.rows.front()[0]) == doctest::Approx(0.1));
  CHECK(std::stod(csv.rows.back()[0]) == doctest::Approx(1e17));
  bool version = false, rng = false, seed = false, config = false;
  for (const auto& m : csv.metadata) {
    version |= m.starts_with("# lrloc ");
    rng |= m.find("rng_id") != std::string::npos;
    seed |= m == "# master_seed: 7";
    config |= m.starts_with("# config: {");
  }
  CHECK((version && rng && seed && config));
  const auto summary = read_json(out / "dynamics_summary.json");
  CHECK(summary.at("n_completed") == 8);
  CHECK(summary.at("config").at("w") == 20.0);
  CHECK(summary.contains("software_version"));
  CHECK(summary.contains("rng_id"));
}

TEST_CASE("repeated runs and worker counts give identical bytes") {
  const std::string args = "dynamics --n 5 --p 0.6 --w 8 --realizations 6 --seed 3 --time-points 20";
  const auto a = fresh("rep_a"), b = fresh("rep_b");
  REQUIRE(run(args + " --workers 1 --out " + a.string()) == 0);
  REQUIRE(run(args + " --workers 3 --out " + b.string()) == 0);
  CHECK(slurp(a / "L_of_t.csv") == slurp(b / "L_of_t.csv"));
  CHECK(slurp(a / "dynamics_summary.json") == slurp(b / "dynamics_summary.json"));
  const std::string before = slurp(a / "L_of_t.csv");
  REQUIRE(run(args + " --out " + a.string()) == 0);
  CHECK(slurp(a / "L_of_t.csv") == before);
}

TEST_CASE("interrupted run resumes to the same output") {
  const std::string args = "dynamics --n 5 --p 0.6 --w 8 --realizations 6 --seed 3 --time-points 20";
  const auto full = fresh("int_full"), cut = fresh("int_cut");
  REQUIRE(run(args + " --out " + full.string()) == 0);
  REQUIRE(run(args + " --max-new-records 2 --out " + cut.string()) == 0);
  CHECK_FALSE(fs::exists(cut / "L_of_t.csv"));
  REQUIRE(run(args + " --out " + cut.string()) == 0);
  CHECK(slurp(cut / "L_of_t.csv") == slurp(full / "L_of_t.csv"));
}

TEST_CASE("clean lattice reaches the oracle size") {
  const auto out = fresh("clean");
  REQUIRE(run("dynamics --n 5 --p 1 --w 0 --realizations 2 --time-max 100 --out " + out.string()) == 0);
  const Csv csv = read_csv(out / "L_of_t.csv");
  const double final_l = std::stod(csv.rows.back()[1]);

  lrloc::LatticeSpec spec;
  spec.n_per_dim = 5;
  const auto real = lrloc::sample_realization(spec, 0);
  const auto d = lrloc::decompose(lrloc::reference::build(spec, real));
  const double t = 100;
  const Eigen::MatrixXd rho = lrloc::reference::propagate_densities(
      d, static_cast<Eigen::Index>(real.row_of(real.center_index)), std::span(&t, 1));
  const auto coords = lrloc::occupied_coordinates(spec, real);
  const double oracle = lrloc::wavepacket_size(std::span<const double>(rho.data(), rho.size()),
                                               coords, spec.center());
  CHECK(final_l == doctest::Approx(oracle).epsilon(1e-12));
  CHECK(std::stod(csv.rows.back()[3]) == 1.0);
}

TEST_CASE("ipr outputs") {
  const auto out = fresh("ipr");
  REQUIRE(run("ipr --n 6 --p 0.5 --w 10 --realizations 4 --out " + out.string()) == 0);
  const Csv hist = read_csv(out / "ipr_hist.csv");
  CHECK(hist.header == std::vector<std::string>{"bin_lower", "bin_upper", "count", "fraction"});
  CHECK(hist.rows.size() == 60);
  long long states = 0;
  for (const auto& r : hist.rows) states += std::stoll(r[2]);
  CHECK(states == 4 * 108);
  const Csv ratios = read_csv(out / "i_min_ratio.csv");
  CHECK(ratios.rows.size() == 4);
  for (const auto& r : ratios.rows) CHECK(std::stod(r[3]) >= 1.0);
}

TEST_CASE("collapse outputs") {
  const auto out = fresh("collapse");
  const int rc = run("collapse --n 9 --p 0.5 --w 80 --realizations 40 --min-samples 60 --out " + out.string());
  REQUIRE(rc == 0);
  const auto fit = read_json(out / "collapse_fit.json");
  for (const char* key : {"loc_length", "sigma", "goodness", "shells_used", "config", "rng_id"})
    CHECK(fit.contains(key));
  CHECK(fit.at("loc_length").get<double>() > 0);
  const Csv csv = read_csv(out / "collapse_histograms.csv");
  CHECK(csv.header == std::vector<std::string>{"shell", "mean_radius", "x", "density"});
  CHECK(csv.rows.size() > 10);
}

TEST_CASE("collapse without enough samples is reported as unconverged") {
  const auto out = fresh("collapse_small");
  CHECK(run("collapse --n 5 --p 0.5 --w 80 --realizations 2 --out " + out.string()) == 4);
}

TEST_CASE("phase scan grid") {
  const auto out = fresh("scan");
  const int rc = run("phase-scan --n 5 --p-grid 0.3,0.9 --w-grid 1,60 --realizations 6 --time-points 20 --out " +
                     out.string());
  CHECK((rc == 0 || rc == 4));
  const Csv csv = read_csv(out / "phase_grid.csv");
  CHECK(csv.header ==
        std::vector<std::string>{"p", "w", "mean_final_L", "edge_fraction", "classification"});
  REQUIRE(csv.rows.size() == 4);
  CHECK(csv.rows[2][4] == "diffusive");
  CHECK(csv.rows[1][4] == "localized");
  const auto j = read_json(out / "phase_scan.json");
  CHECK(j.at("points").size() == 4);
  bool all = true;
  for (const auto& pt : j.at("points")) all = all && pt.at("converged").get<bool>();
  CHECK(rc == (all ? 0 : 4));
}

TEST_CASE("scaling outputs") {
  const auto out = fresh("scaling");
  REQUIRE(run("scaling --p-grid 0.2,0.6,1.0 --n-list 21,31 --predict-n 41 --out " + out.string()) == 0);
  for (const char* f : {"scaling_N21.csv", "scaling_N31.csv", "scaling_N41.csv"}) {
    const Csv csv = read_csv(out / f);
    CHECK(csv.header == std::vector<std::string>{"p", "w_solved"});
    CHECK(csv.rows.size() == 3);
  }
  const auto fit = read_json(out / "scaling_fit.json");
  for (const char* key : {"A", "B", "residuals", "N_list", "target"}) CHECK(fit.contains(key));
  CHECK(fit.at("N_list") == nlohmann::json::array({21, 31}));
  CHECK(fit.at("residuals").size() == 6);
  CHECK(fit.at("predictions").size() == 3);
}

TEST_CASE("config file with flag overrides") {
  const auto out = fresh("config");
  fs::create_directories(out);
  std::ofstream(out / "run.ini") << "[dynamics]\nn = 5\np = 0.7\nw = 3\nrealizations = 3\ntime-points = 10\n";
  REQUIRE(run("dynamics --config " + (out / "run.ini").string() + " --realizations 2 --out " + out.string()) == 0);
  const auto j = read_json(out / "dynamics_summary.json");
  CHECK(j.at("config").at("n") == 5);
  CHECK(j.at("config").at("p") == 0.7);
  CHECK(j.at("config").at("realizations") == 2);
  CHECK(read_csv(out / "L_of_t.csv").rows.size() == 10);

  std::ofstream(out / "bad.ini") << "[dynamics]\nbogus = 1\n";
  CHECK(run("dynamics --config " + (out / "bad.ini").string() + " --out " + out.string()) == 2);
}

TEST_CASE("exit codes") {
  const auto out = fresh("codes");
  CHECK(run("") == 2);
  CHECK(run("dynamics --n x") == 2);
  CHECK(run("dynamics --n 8 --out " + out.string()) == 2);
  CHECK(run("dynamics --coverage 1.5 --out " + out.string()) == 2);
  CHECK(run("phase-scan --lo 0.9 --hi 0.1 --out " + out.string()) == 2);
  CHECK(run("ipr --n 5 --p 0.001 --realizations 3 --out " + out.string()) == 3);
  CHECK(run("dynamics --n 7 --p 0.5 --w 5 --realizations 2 --min-realizations 2 --time-points 10 --out " +
            out.string()) == 4);
  CHECK(run("--help") == 0);
}

}  // TEST_SUITE
