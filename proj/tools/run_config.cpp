#include "run_config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <initializer_list>
#include <sstream>

#include <json.hpp>

#include "tdho/errors.hpp"
#include "tdho/snapshot.hpp"
#include "tdho/timefn.hpp"

namespace tdho::cli {

namespace {

using json = nlohmann::json;

[[noreturn]] void fail(const std::string& where, const std::string& what) {
  throw InputError("config " + where + ": " + what);
}

void allow_keys(const json& j, const std::string& where, std::initializer_list<const char*> keys) {
  if (!j.is_object()) fail(where, "expected an object");
  for (const auto& [key, value] : j.items()) {
    bool known = false;
    for (const char* k : keys) known = known || key == k;
    if (!known) fail(where, "unknown key \"" + key + "\"");
  }
}

double number(const json& j, const std::string& where) {
  if (!j.is_number()) fail(where, "expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) fail(where, "must be finite");
  return v;
}

double positive(const json& j, const std::string& where) {
  const double v = number(j, where);
  if (!(v > 0.0)) fail(where, "must be positive");
  return v;
}

std::size_t count(const json& j, const std::string& where, std::size_t min = 1) {
  if (!j.is_number_integer() || j.get<long long>() < static_cast<long long>(min))
    fail(where, "expected an integer >= " + std::to_string(min));
  return j.get<std::size_t>();
}

std::array<double, 2> pair(const json& j, const std::string& where) {
  if (!j.is_array() || j.size() != 2) fail(where, "expected [a, b]");
  return {number(j[0], where + "[0]"), number(j[1], where + "[1]")};
}

TimeFunction time_function(const json& j, const std::string& where, const std::filesystem::path& base) {
  if (j.is_number()) return TimeFunction(number(j, where));
  if (j.is_string()) {
    try {
      return parse(j.get<std::string>());
    } catch (const ParseError& e) {
      throw ParseError("config " + where + ": " + e.message(), e.position());
    }
  }
  if (j.is_object()) {
    allow_keys(j, where, {"csv"});
    if (!j.contains("csv") || !j["csv"].is_string()) fail(where, "expected {\"csv\": path}");
    std::filesystem::path p = j["csv"].get<std::string>();
    if (p.is_relative()) p = base / p;
    if (!std::filesystem::exists(p)) fail(where, "file not found: " + p.string());
    return read_tabulated_csv(p);
  }
  fail(where, "expected an expression string, a number or {\"csv\": path}");
}

Grid2D grid(const json& j, const std::string& where) {
  allow_keys(j, where, {"n", "half_width"});
  Grid2D g;
  if (j.contains("n")) {
    if (!j["n"].is_array() || j["n"].size() != 2) fail(where + ".n", "expected [n1, n2]");
    g.n1 = count(j["n"][0], where + ".n[0]", 2);
    g.n2 = count(j["n"][1], where + ".n[1]", 2);
  }
  if (j.contains("half_width")) {
    const auto h = pair(j["half_width"], where + ".half_width");
    g.half_width1 = h[0];
    g.half_width2 = h[1];
  }
  try {
    g.validate();
  } catch (const InputError& e) {
    fail(where, e.what());
  }
  return g;
}

// [x0, x1, ...] or {"min": a, "max": b, "n": k}
std::vector<double> axis(const json& j, const std::string& where) {
  std::vector<double> xs;
  if (j.is_array()) {
    if (j.empty()) fail(where, "must not be empty");
    for (std::size_t i = 0; i < j.size(); ++i) xs.push_back(number(j[i], where + "[" + std::to_string(i) + "]"));
    return xs;
  }
  allow_keys(j, where, {"min", "max", "n"});
  if (!j.contains("min") || !j.contains("max") || !j.contains("n")) fail(where, "expected min, max and n");
  const double lo = number(j["min"], where + ".min"), hi = number(j["max"], where + ".max");
  const std::size_t n = count(j["n"], where + ".n");
  if (n > 1 && !(hi > lo)) fail(where, "max must exceed min");
  for (std::size_t i = 0; i < n; ++i)
    xs.push_back(n == 1 ? lo : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1));
  return xs;
}

void read_system(const json& j, RunConfig& c, const std::filesystem::path& base) {
  allow_keys(j, "system", {"oscillators", "coupling", "hbar"});
  if (!j.contains("oscillators") || !j["oscillators"].is_array() || j["oscillators"].size() != 2)
    fail("system.oscillators", "expected two oscillators");
  for (std::size_t k = 0; k < 2; ++k) {
    const std::string where = "system.oscillators[" + std::to_string(k) + "]";
    const json& o = j["oscillators"][k];
    allow_keys(o, where, {"mass", "omega", "force"});
    if (!o.contains("mass") || !o.contains("omega")) fail(where, "mass and omega are required");
    auto& spec = c.system.oscillators[k];
    spec.mass = time_function(o["mass"], where + ".mass", base);
    spec.frequency = time_function(o["omega"], where + ".omega", base);
    spec.drive = o.contains("force") ? time_function(o["force"], where + ".force", base) : TimeFunction(0.0);
  }
  c.system.coupling = j.contains("coupling") ? time_function(j["coupling"], "system.coupling", base) : TimeFunction(0.0);
  if (j.contains("hbar")) c.system.hbar = positive(j["hbar"], "system.hbar");
}

void read_interval(const json& j, RunConfig& c) {
  allow_keys(j, "interval", {"t_initial", "t_final"});
  if (!j.contains("t_initial") || !j.contains("t_final")) fail("interval", "t_initial and t_final are required");
  c.system.interval = {number(j["t_initial"], "interval.t_initial"), number(j["t_final"], "interval.t_final")};
}

void read_tasks(const json& j, RunConfig& c) {
  allow_keys(j, "task", {"decouple", "kernel", "propagate", "verify"});
  if (j.contains("decouple")) {
    const json& d = j["decouple"];
    allow_keys(d, "task.decouple", {"tolerance", "samples"});
    if (d.contains("tolerance")) c.decouple.tolerance = positive(d["tolerance"], "task.decouple.tolerance");
    if (d.contains("samples")) c.decouple.samples = count(d["samples"], "task.decouple.samples", 2);
  }
  if (j.contains("kernel")) {
    const json& k = j["kernel"];
    allow_keys(k, "task.kernel", {"x1_final", "x2_final", "x1_initial", "x2_initial", "gauge_scale"});
    for (const char* key : {"x1_final", "x2_final", "x1_initial", "x2_initial"})
      if (!k.contains(key)) fail("task.kernel", std::string(key) + " is required");
    c.kernel.endpoints.x1_final = axis(k["x1_final"], "task.kernel.x1_final");
    c.kernel.endpoints.x2_final = axis(k["x2_final"], "task.kernel.x2_final");
    c.kernel.endpoints.x1_initial = axis(k["x1_initial"], "task.kernel.x1_initial");
    c.kernel.endpoints.x2_initial = axis(k["x2_initial"], "task.kernel.x2_initial");
    if (k.contains("gauge_scale")) {
      c.kernel.gauge_scale = pair(k["gauge_scale"], "task.kernel.gauge_scale");
      if (!(c.kernel.gauge_scale[0] > 0 && c.kernel.gauge_scale[1] > 0))
        fail("task.kernel.gauge_scale", "must be positive");
    }
  }
  if (j.contains("propagate")) {
    const json& p = j["propagate"];
    allow_keys(p, "task.propagate", {"grid", "gaussian", "split_step"});
    if (p.contains("grid")) c.propagate.grid = grid(p["grid"], "task.propagate.grid");
    if (p.contains("gaussian")) {
      const json& g = p["gaussian"];
      allow_keys(g, "task.propagate.gaussian", {"center", "width", "momentum"});
      auto point = [](std::array<double, 2> a) { return Point2{a[0], a[1]}; };
      if (g.contains("center")) c.propagate.packet.center = point(pair(g["center"], "task.propagate.gaussian.center"));
      if (g.contains("width")) {
        const auto w = pair(g["width"], "task.propagate.gaussian.width");
        if (!(w[0] > 0 && w[1] > 0)) fail("task.propagate.gaussian.width", "must be positive");
        c.propagate.packet.width = point(w);
      }
      if (g.contains("momentum"))
        c.propagate.packet.momentum = point(pair(g["momentum"], "task.propagate.gaussian.momentum"));
    }
    if (p.contains("split_step")) {
      const json& s = p["split_step"];
      allow_keys(s, "task.propagate.split_step", {"enabled", "dt", "edge_population"});
      if (s.contains("enabled")) {
        if (!s["enabled"].is_boolean()) fail("task.propagate.split_step.enabled", "expected a boolean");
        c.propagate.split_step = s["enabled"].get<bool>();
      }
      if (s.contains("dt")) c.propagate.split.dt = positive(s["dt"], "task.propagate.split_step.dt");
      if (s.contains("edge_population"))
        c.propagate.split.edge_population = positive(s["edge_population"], "task.propagate.split_step.edge_population");
    }
  }
  if (j.contains("verify")) {
    const json& v = j["verify"];
    allow_keys(v, "task.verify", {"criteria", "grid", "dt", "semigroup_grid", "random_points", "seed"});
    if (v.contains("criteria")) {
      if (!v["criteria"].is_array()) fail("task.verify.criteria", "expected an array of criterion ids");
      c.verify.criteria.clear();
      const std::vector<int> known = all_criteria();
      for (const json& id : v["criteria"]) {
        if (!id.is_number_integer() || std::find(known.begin(), known.end(), id.get<int>()) == known.end())
          fail("task.verify.criteria", "unknown criterion " + id.dump());
        c.verify.criteria.push_back(id.get<int>());
      }
    }
    VerifyOptions& o = c.verify.options;
    if (v.contains("grid")) o.grid = grid(v["grid"], "task.verify.grid");
    if (v.contains("semigroup_grid")) o.semigroup_grid = grid(v["semigroup_grid"], "task.verify.semigroup_grid");
    if (v.contains("dt")) o.dt = positive(v["dt"], "task.verify.dt");
    if (v.contains("random_points")) o.random_points = count(v["random_points"], "task.verify.random_points");
    if (v.contains("seed")) {
      if (!v["seed"].is_number_unsigned()) fail("task.verify.seed", "expected a non-negative integer");
      o.seed = v["seed"].get<std::uint64_t>();
    }
  }
}

void read_output(const json& j, RunConfig& c) {
  allow_keys(j, "output", {"directory", "formats"});
  if (j.contains("directory")) {
    if (!j["directory"].is_string()) fail("output.directory", "expected a string");
    c.output_directory = j["directory"].get<std::string>();
  }
  if (j.contains("formats")) {
    if (!j["formats"].is_array()) fail("output.formats", "expected an array");
    c.write_csv = false;
    for (const json& f : j["formats"]) {
      if (f == "csv")
        c.write_csv = true;
      else if (f != "json")
        fail("output.formats", "unknown format " + f.dump() + " (csv, json)");
    }
  }
}

}  // namespace

RunConfig parse_config(const std::string& text, const std::filesystem::path& base_directory) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("config is not valid JSON: ") + e.what(), e.byte);
  }
  allow_keys(doc, "root", {"system", "interval", "task", "output"});
  if (!doc.contains("system")) fail("root", "system section is required");
  if (!doc.contains("interval")) fail("root", "interval section is required");

  RunConfig c;
  read_system(doc["system"], c, base_directory);
  read_interval(doc["interval"], c);
  if (doc.contains("task")) read_tasks(doc["task"], c);
  if (doc.contains("output")) read_output(doc["output"], c);
  c.verify.options.hbar = c.system.hbar;
  c.system.validate();
  c.hash = config_hash(text);
  return c;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open config " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str(), path.parent_path().empty() ? std::filesystem::path(".") : path.parent_path());
}

void override_hbar(RunConfig& config, double hbar) {
  if (!(hbar > 0.0) || !std::isfinite(hbar)) throw InputError("--hbar must be positive");
  config.system.hbar = hbar;
  config.verify.options.hbar = hbar;
  config.hash = config_hash(config.hash + "\nhbar=" + format_double(hbar));
}

}  // namespace tdho::cli
