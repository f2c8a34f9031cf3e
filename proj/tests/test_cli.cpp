#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#ifdef TDHO_TEST_CLI
#include <sys/wait.h>

#include <json.hpp>

#include "run_config.hpp"
#include "tdho/errors.hpp"

using namespace tdho;
using namespace tdho::cli;
namespace fs = std::filesystem;

namespace {

const char* kMinimal = R"j({
  "system": {"oscillators": [{"mass": 1, "omega": 1}, {"mass": "2*exp(0.1*t)", "omega": "2", "force": "sin(t)"}],
             "coupling": "0.6*exp(0.1*t)"},
  "interval": {"t_initial": 0, "t_final": 1}
})j";

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

struct Run {
  int code;
  std::string err;
};

Run run(const std::string& args, const fs::path& dir) {
  const fs::path err = dir / "stderr.txt";
  const std::string cmd = std::string(TDHO_TEST_CLI) + " " + args + " 2> " + err.string() + " > /dev/null";
  const int status = std::system(cmd.c_str());
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, slurp(err)};
}

fs::path scratch(const std::string& name) {
  const fs::path d = fs::temp_directory_path() / ("tdho_cli_" + name);
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

void write(const fs::path& p, const std::string& text) { std::ofstream(p) << text; }

}  // namespace

TEST_CASE("config parsing") {
  const RunConfig c = parse_config(kMinimal);
  CHECK(c.system.oscillators[1].mass.eval(1.0) == doctest::Approx(2 * std::exp(0.1)));
  CHECK(c.system.interval.end == 1.0);
  CHECK(c.hash.size() == 16);
  CHECK(c.verify.criteria == all_criteria());

  CHECK_THROWS_AS(parse_config("{"), ParseError);
  CHECK_THROWS_AS(parse_config(R"j({"system": {}})j"), InputError);
  std::string typo = kMinimal;
  typo.replace(typo.find("\"omega\": \"2\""), 12, "\"omgea\": \"2\"");
  CHECK_THROWS_AS(parse_config(typo), InputError);
  std::string bad = kMinimal;
  bad.replace(bad.find("sin(t)"), 6, "sin(t");
  CHECK_THROWS_AS(parse_config(bad), ParseError);
  std::string missing = kMinimal;
  missing.replace(missing.find("\"sin(t)\""), 8, R"j({"csv": "no_such_file.csv"})j");
  CHECK_THROWS_AS(parse_config(missing), InputError);
  std::string negative = kMinimal;
  negative.replace(negative.find("\"mass\": 1"), 9, "\"mass\": \"1 - 2*t\"");
  CHECK_THROWS_AS(parse_config(negative), DomainError);
}

TEST_CASE("csv time functions resolve against the config directory") {
  const fs::path d = scratch("csv");
  {
    std::ofstream f(d / "force.csv");
    f << "t,f\n";
    for (int k = 0; k <= 50; ++k) f << 0.02 * k << ',' << 0.02 * k << '\n';
  }
  std::string text = kMinimal;
  text.replace(text.find("\"sin(t)\""), 8, R"j({"csv": "force.csv"})j");
  write(d / "run.json", text);
  const RunConfig c = load_config(d / "run.json");
  CHECK(c.system.oscillators[1].drive.eval(0.5) == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("hbar override enters the hash") {
  RunConfig c = parse_config(kMinimal);
  const std::string before = c.hash;
  override_hbar(c, 0.5);
  CHECK(c.system.hbar == 0.5);
  CHECK(c.verify.options.hbar == 0.5);
  CHECK(c.hash != before);
  CHECK_THROWS_AS(override_hbar(c, -1.0), InputError);
}

TEST_CASE("decouple command") {
  const fs::path d = scratch("decouple");
  const fs::path configs = TDHO_TEST_CONFIGS;
  Run r = run("decouple --config " + (configs / "exponential_mass.json").string() + " --output " + d.string(), d);
  CHECK(r.code == 0);
  const auto report = nlohmann::json::parse(slurp(d / "decouple.json"));
  CHECK(report["decision"] == "decoupled");
  CHECK(report["residual"].get<double>() < 1e-10);
  CHECK(report["config_hash"].get<std::string>().size() == 16);
  const auto& w = report["Omega_sq"]["Omega1_sq"];
  CHECK(w.front().get<double>() == doctest::Approx(w.back().get<double>()).epsilon(1e-12));

  r = run("decouple --config " + (configs / "sinusoidal_coupling.json").string() + " --output " + d.string(), d);
  CHECK(r.code == 2);
  const auto err = nlohmann::json::parse(r.err);
  CHECK(err["error"] == "NotDecouplable");
  CHECK(err["residual"].get<double>() > 1e-3);
  CHECK(nlohmann::json::parse(slurp(d / "decouple.json"))["decision"] == "not_decouplable");

  write(d / "zero.json", R"j({"system": {"oscillators": [{"mass": 1, "omega": 1}, {"mass": 1, "omega": 2}]},
                             "interval": {"t_initial": 0, "t_final": 1}})j");
  r = run("decouple -c " + (d / "zero.json").string() + " -o " + d.string(), d);
  CHECK(r.code == 0);
  CHECK(nlohmann::json::parse(slurp(d / "decouple.json"))["alpha"].get<double>() == 0.0);
}

TEST_CASE("kernel command output is reproducible") {
  const fs::path d = scratch("kernel");
  const fs::path cfg = fs::path(TDHO_TEST_CONFIGS) / "exponential_mass.json";
  REQUIRE(run("kernel -c " + cfg.string() + " -o " + (d / "a").string(), d).code == 0);
  REQUIRE(run("kernel -c " + cfg.string() + " -o " + (d / "b").string() + " --threads 2", d).code == 0);
  const std::string a = slurp(d / "a" / "kernel.csv");
  CHECK(a == slurp(d / "b" / "kernel.csv"));
  CHECK(a.rfind("# config_hash ", 0) == 0);
  std::istringstream lines(a);
  std::string line;
  std::getline(lines, line);
  std::getline(lines, line);
  CHECK(line == "x1_final,x2_final,x1_initial,x2_initial,re,im,maslov");
  std::size_t rows = 0;
  while (std::getline(lines, line)) ++rows;
  CHECK(rows == 9 * 9 * 2 * 2);
  const auto meta = nlohmann::json::parse(slurp(d / "a" / "kernel.json"));
  CHECK(meta["modes"].size() == 2);
  CHECK(meta["caustic_points"] == 0);
}

TEST_CASE("propagate command") {
  const fs::path d = scratch("propagate");
  write(d / "run.json", R"j({
    "system": {"oscillators": [{"mass": 1, "omega": 1, "force": "0.2*sin(t)"}, {"mass": 1, "omega": 1.5}],
               "coupling": 0.2},
    "interval": {"t_initial": 0, "t_final": 1},
    "task": {"propagate": {"grid": {"n": [64, 64], "half_width": [8, 8]},
                           "gaussian": {"center": [0.5, 0], "width": [0.7, 0.6], "momentum": [0, 0.2]},
                           "split_step": {"dt": 0.001}}}
  })j");
  const Run r = run("propagate -c " + (d / "run.json").string() + " -o " + d.string(), d);
  CHECK(r.code == 0);
  const auto summary = nlohmann::json::parse(slurp(d / "propagate.json"));
  CHECK(summary["l2_error"].get<double>() < 1e-5);
  CHECK(std::abs(summary["kernel_norm_drift"].get<double>()) < 1e-6);
  for (const char* f : {"psi_kernel.csv", "psi_kernel.json", "psi_split.csv", "psi_split.json"})
    CHECK(fs::exists(d / f));
  CHECK(slurp(d / "psi_kernel.csv").rfind("# config_hash " + summary["config_hash"].get<std::string>(), 0) == 0);
}

TEST_CASE("verify command") {
  const fs::path d = scratch("verify");
  write(d / "empty.json", R"j({"system": {"oscillators": [{"mass": 1, "omega": 1}, {"mass": 1, "omega": 1}]},
                              "interval": {"t_initial": 0, "t_final": 1}, "task": {"verify": {"criteria": []}}})j");
  Run r = run("verify -c " + (d / "empty.json").string() + " -o " + d.string(), d);
  CHECK(r.code == 0);
  auto report = nlohmann::json::parse(slurp(d / "verify.json"));
  CHECK(report["passed"] == true);
  CHECK(report["criteria"].empty());

  write(d / "quick.json", R"j({"system": {"oscillators": [{"mass": 1, "omega": 1}, {"mass": 1, "omega": 1}]},
                              "interval": {"t_initial": 0, "t_final": 1},
                              "task": {"verify": {"criteria": [1, 3, 6, 10], "random_points": 20}}})j");
  r = run("verify -c " + (d / "quick.json").string() + " -o " + d.string(), d);
  CHECK(r.code == 0);
  report = nlohmann::json::parse(slurp(d / "verify.json"));
  CHECK(report["criteria"].size() == 4);

  write(d / "coarse.json", R"j({"system": {"oscillators": [{"mass": 1, "omega": 1}, {"mass": 1, "omega": 1}]},
                               "interval": {"t_initial": 0, "t_final": 1},
                               "task": {"verify": {"criteria": [11], "grid": {"n": [16, 16], "half_width": [3, 3]}}}})j");
  r = run("verify -c " + (d / "coarse.json").string() + " -o " + d.string(), d);
  CHECK(r.code == 3);
  report = nlohmann::json::parse(slurp(d / "verify.json"));
  CHECK(report["criteria"][0]["passed"] == false);
}

TEST_CASE("bad invocations") {
  const fs::path d = scratch("bad");
  write(d / "broken.json", "{\"system\": ");
  Run r = run("kernel -c " + (d / "broken.json").string(), d);
  CHECK(r.code == 1);
  CHECK(nlohmann::json::parse(r.err)["error"] == "ParseError");
  write(d / "nokernel.json", kMinimal);
  r = run("kernel -c " + (d / "nokernel.json").string() + " -o " + d.string(), d);
  CHECK(r.code == 1);
  CHECK(nlohmann::json::parse(r.err)["error"] == "InputError");
  CHECK(run("explode -c " + (d / "nokernel.json").string(), d).code == 1);
  CHECK(run("kernel -c " + (d / "absent.json").string(), d).code == 1);
}
#endif
