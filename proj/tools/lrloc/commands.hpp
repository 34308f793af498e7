#pragma once

#include "options.hpp"

namespace lrloc::cli {

// Each returns the process exit code: 0 done, 4 unconverged. Other failures
// propagate as exceptions and are mapped in main.
int cmd_dynamics(const RunConfig& c);
int cmd_ipr(const RunConfig& c);
int cmd_collapse(const RunConfig& c);
int cmd_phase_scan(const RunConfig& c);
int cmd_scaling(const RunConfig& c);

}  // namespace lrloc::cli
