#pragma once

// Subcommands of the tdho tool.  Each writes its outputs under the config's output
// directory and returns the process exit code; library errors propagate as exceptions.

#include "run_config.hpp"

namespace tdho::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInput = 1;
inline constexpr int kExitNumerical = 2;
inline constexpr int kExitCriteriaFailed = 3;

/// decouple.json: alpha, residual, Omega_j^2 samples, decision.  Returns 2 when no
/// constant angle decouples the system (the report is still written).
int cmd_decouple(const RunConfig& config);
/// kernel.csv (x1'', x2'', x1', x2', re, im, maslov) and kernel.json.
int cmd_kernel(const RunConfig& config);
/// psi_kernel.csv, psi_split.csv (optional) and propagate.json with the error summary.
int cmd_propagate(const RunConfig& config);
/// verify.json; returns 0 iff every selected criterion passes, else 3.
int cmd_verify(const RunConfig& config);

}  // namespace tdho::cli
