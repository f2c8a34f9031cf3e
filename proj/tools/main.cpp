// tdho: exact propagator of two coupled, driven, time-dependent oscillators.
//
//   tdho <decouple|kernel|propagate|verify> --config run.json [--output dir]
//        [--threads n] [--hbar v] [--seed s]
//
// Exit codes: 0 success, 1 bad input or config, 2 numerical failure, 3 verify found
// a failing criterion.  Errors are reported as one JSON object on stderr.

#include <cstdint>
#include <iostream>
#include <optional>

#include <omp.h>

#include <CLI11.hpp>
#include <json.hpp>

#include "commands.hpp"
#include "tdho/errors.hpp"

namespace {

using tdho::cli::RunConfig;

int report_error(const std::exception& e, const char* kind, int code, const std::optional<double>& residual = {}) {
  nlohmann::ordered_json j;
  j["error"] = kind;
  j["message"] = e.what();
  j["exit_code"] = code;
  if (residual) j["residual"] = *residual;
  std::cerr << j.dump() << '\n';
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact propagator for two coupled time-dependent driven oscillators"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path;
  std::optional<std::string> output;
  std::optional<int> threads;
  std::optional<double> hbar;
  std::uint64_t seed = 0;
  app.add_option("-c,--config", config_path, "JSON run configuration")->required()->check(CLI::ExistingFile);
  app.add_option("-o,--output", output, "output directory (overrides output.directory)");
  app.add_option("-t,--threads", threads, "worker threads for kernel grids and oracles")->check(CLI::PositiveNumber);
  app.add_option("--hbar", hbar, "overrides system.hbar");
  app.add_option("--seed", seed, "reserved; the pipeline is deterministic");

  auto* decouple = app.add_subcommand("decouple", "find the decoupling angle and report Omega_j^2");
  auto* kernel = app.add_subcommand("kernel", "tabulate the propagator on an endpoint grid");
  auto* propagate = app.add_subcommand("propagate", "evolve a Gaussian by kernel quadrature and split-step");
  auto* verify = app.add_subcommand("verify", "run the acceptance criteria");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : tdho::cli::kExitInput;
  }

  try {
    RunConfig config = tdho::cli::load_config(config_path);
    if (hbar) tdho::cli::override_hbar(config, *hbar);
    if (output) config.output_directory = *output;
    if (threads) omp_set_num_threads(*threads);

    if (*decouple) return tdho::cli::cmd_decouple(config);
    if (*kernel) return tdho::cli::cmd_kernel(config);
    if (*propagate) return tdho::cli::cmd_propagate(config);
    if (*verify) return tdho::cli::cmd_verify(config);
  } catch (const tdho::NotDecouplable& e) {
    return report_error(e, "NotDecouplable", tdho::cli::kExitNumerical, e.residual());
  } catch (const tdho::ParseError& e) {
    return report_error(e, "ParseError", tdho::cli::kExitInput);
  } catch (const tdho::InputError& e) {
    return report_error(e, "InputError", tdho::cli::kExitInput);
  } catch (const tdho::DomainError& e) {
    return report_error(e, "DomainError", tdho::cli::kExitInput);
  } catch (const tdho::Caustic& e) {
    return report_error(e, "Caustic", tdho::cli::kExitNumerical);
  } catch (const tdho::GridTooCoarse& e) {
    return report_error(e, "GridTooCoarse", tdho::cli::kExitNumerical);
  } catch (const tdho::NumericalError& e) {
    return report_error(e, "NumericalError", tdho::cli::kExitNumerical);
  } catch (const std::filesystem::filesystem_error& e) {
    return report_error(e, "InputError", tdho::cli::kExitInput);
  }
  return tdho::cli::kExitInput;
}
