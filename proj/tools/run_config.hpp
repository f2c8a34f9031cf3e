#pragma once

// JSON run configuration of the tdho tool.  Time functions are given as expression
// strings, plain numbers, or {"csv": "path"} (two columns t,value; relative paths are
// resolved against the config file's directory; the output directory is taken
// relative to the working directory).

#include <array>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "tdho/kernel.hpp"
#include "tdho/oracle.hpp"
#include "tdho/system.hpp"
#include "tdho/verify.hpp"

namespace tdho::cli {

struct DecoupleTask {
  double tolerance = kDefaultDecouplingTolerance;
  std::size_t samples = 33;  // Omega_j^2 samples in the report
};

struct KernelTask {
  EndpointGrid endpoints;
  std::array<double, 2> gauge_scale{1.0, 1.0};
};

struct PropagateTask {
  Grid2D grid;
  GaussianParams packet{{1.0, -0.5}, {0.7, 0.35}, {0.5, 0.0}};
  bool split_step = true;
  SplitStepOptions split;
};

struct VerifyTask {
  std::vector<int> criteria = all_criteria();
  VerifyOptions options;
};

struct RunConfig {
  SystemSpec system;
  DecoupleTask decouple;
  KernelTask kernel;
  PropagateTask propagate;
  VerifyTask verify;
  std::filesystem::path output_directory = ".";
  bool write_csv = true;
  /// FNV-1a of the config text and any command-line overrides.
  std::string hash;
};

/// Validates the whole document before anything is computed.  Throws InputError
/// (or ParseError for a bad expression) with the offending JSON path in the message.
RunConfig parse_config(const std::string& text, const std::filesystem::path& base_directory = ".");
RunConfig load_config(const std::filesystem::path& path);

/// Applies --hbar; the override enters the provenance hash.
void override_hbar(RunConfig& config, double hbar);

}  // namespace tdho::cli
