#include <iostream>

#include <CLI11.hpp>

#include "commands.hpp"
#include "lrloc/errors.hpp"
#include "lrloc/records.hpp"
#include "options.hpp"

namespace {

constexpr int kUsage = 2;
constexpr int kNumeric = 3;
constexpr int kUnconverged = 4;

}  // namespace

int main(int argc, char** argv) {
  using namespace lrloc::cli;

  CLI::App app{"Wavepacket spreading and localization in diluted, disordered lattices with "
               "long-range hopping."};
  app.set_version_flag("--version", std::string(lrloc::software_version()));
  app.set_config("--config", "", "INI file; [section] per subcommand, flags override it");
  app.allow_config_extras(CLI::config_extras_mode::error);
  app.fallthrough();
  app.require_subcommand(1);

  RunConfig c;
  auto* dynamics = app.add_subcommand("dynamics", "Mean wavepacket size L(t) over the ensemble");
  auto* ipr = app.add_subcommand("ipr", "Eigenstate IPR distribution and I_min / I_d");
  auto* collapse = app.add_subcommand("collapse", "Log-normal collapse of ln|psi(r)| histograms");
  auto* scan = app.add_subcommand("phase-scan", "Localized / crossover / diffusive map over (p, w)");
  auto* scaling = app.add_subcommand("scaling", "Isoprobability lines and the w = p t (A + B ln N) fit");

  for (auto* sub : {dynamics, ipr, collapse, scan}) {
    add_ensemble_options(*sub, c);
    add_execution_options(*sub, c);
  }
  add_collapse_options(*collapse, c);
  add_phase_scan_options(*scan, c);
  add_scaling_options(*scaling, c);
  scaling->add_option("--out", c.out, "Output directory")->capture_default_str();
  scaling->add_option("--seed", c.seed, "Recorded in metadata; the computation is deterministic");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kUsage;
  }

  CLI::App* chosen = app.get_subcommands().front();
  c.command = chosen->get_name();
  try {
    c.validate();
  } catch (const lrloc::DomainError& e) {
    std::cerr << "invalid configuration: " << e.what() << '\n';
    return kUsage;
  }

  try {
    if (chosen == dynamics) return cmd_dynamics(c);
    if (chosen == ipr) return cmd_ipr(c);
    if (chosen == collapse) return cmd_collapse(c);
    if (chosen == scan) return cmd_phase_scan(c);
    return cmd_scaling(c);
  } catch (const lrloc::UnconvergedError& e) {
    std::cerr << "unconverged: " << e.what() << '\n';
    return kUnconverged;
  } catch (const lrloc::NumericError& e) {
    std::cerr << "numeric failure";
    if (e.seed() != 0) std::cerr << " (realization seed " << e.seed() << ")";
    std::cerr << ": " << e.what() << '\n';
    return kNumeric;
  } catch (const lrloc::DomainError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
