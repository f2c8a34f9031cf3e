#include "commands.hpp"

#include <cmath>
#include <fstream>

#include <json.hpp>

#include "tdho/errors.hpp"
#include "tdho/snapshot.hpp"

namespace tdho::cli {

namespace {

using json = nlohmann::ordered_json;

std::filesystem::path prepare(const RunConfig& c, const char* name) {
  std::filesystem::create_directories(c.output_directory);
  return c.output_directory / name;
}

void write_json(const RunConfig& c, const char* name, const json& doc) {
  const auto path = prepare(c, name);
  std::ofstream out(path);
  if (!out) throw InputError("cannot write " + path.string());
  out << doc.dump(2) << '\n';
  if (!out) throw InputError("failed writing " + path.string());
}

// JSON has no representation for inf or nan.
json finite_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

}  // namespace

int cmd_decouple(const RunConfig& c) {
  const DecoupledSystem dec = analyze_decoupling(c.system, c.decouple.tolerance);
  const Interval iv = c.system.interval;
  json samples = {{"t", json::array()}, {"Omega1_sq", json::array()}, {"Omega2_sq", json::array()}};
  for (std::size_t k = 0; k < c.decouple.samples; ++k) {
    const double t = iv.begin + iv.length() * static_cast<double>(k) / static_cast<double>(c.decouple.samples - 1);
    samples["t"].push_back(t);
    samples["Omega1_sq"].push_back(dec.omega_sq[0].eval(t));
    samples["Omega2_sq"].push_back(dec.omega_sq[1].eval(t));
  }
  json doc;
  doc["config_hash"] = c.hash;
  doc["decision"] = dec.accepted ? "decoupled" : "not_decouplable";
  doc["alpha"] = dec.alpha;
  doc["residual"] = dec.gamma_residual;
  doc["residual_scale"] = dec.residual_scale;
  doc["tolerance"] = c.decouple.tolerance;
  doc["Omega_sq"] = samples;
  write_json(c, "decouple.json", doc);
  if (!dec.accepted) throw NotDecouplable(dec.gamma_residual, c.decouple.tolerance * dec.residual_scale, dec.alpha);
  return kExitOk;
}

int cmd_kernel(const RunConfig& c) {
  const EndpointGrid& e = c.kernel.endpoints;
  if (e.size() == 0) throw InputError("config task.kernel: endpoint grid is required for the kernel command");
  const DecoupledSystem dec = find_decoupling_angle(c.system, c.decouple.tolerance);
  const auto sols = solve_modes(dec, c.system.interval, c.kernel.gauge_scale);
  const KernelGrid k = kernel_grid(c.system, dec, sols, e);

  if (c.write_csv) {
    const auto path = prepare(c, "kernel.csv");
    std::ofstream csv(path);
    if (!csv) throw InputError("cannot write " + path.string());
    csv << "# config_hash " << c.hash << "\n";
    csv << "x1_final,x2_final,x1_initial,x2_initial,re,im,maslov\n";
    std::size_t idx = 0;
    for (double a : e.x1_final)
      for (double b : e.x2_final)
        for (double p : e.x1_initial)
          for (double q : e.x2_initial) {
            const ComplexKernel& v = k.values[idx];
            const bool caustic = k.caustic[idx++] != 0;
            csv << format_double(a) << ',' << format_double(b) << ',' << format_double(p) << ',' << format_double(q)
                << ',' << (caustic ? "nan" : format_double(v.value.real())) << ','
                << (caustic ? "nan" : format_double(v.value.imag())) << ','
                << v.maslov_index[0] + v.maslov_index[1] << '\n';
          }
    if (!csv) throw InputError("failed writing " + path.string());
  }

  std::size_t caustics = 0;
  for (auto f : k.caustic) caustics += f != 0;
  json modes = json::array();
  for (std::size_t j = 0; j < 2; ++j)
    modes.push_back({{"omega0", sols[j].omega0()},
                     {"phi", sols[j].total_phase()},
                     {"ermakov_residual", sols[j].max_residual()}});
  json doc;
  doc["config_hash"] = c.hash;
  doc["alpha"] = dec.alpha;
  doc["decoupling_residual"] = dec.gamma_residual;
  doc["modes"] = modes;
  doc["points"] = e.size();
  doc["caustic_points"] = caustics;
  doc["t_initial"] = c.system.interval.begin;
  doc["t_final"] = c.system.interval.end;
  write_json(c, "kernel.json", doc);
  return kExitOk;
}

int cmd_propagate(const RunConfig& c) {
  const PropagateTask& p = c.propagate;
  const Interval iv = c.system.interval;
  const DecoupledSystem dec = find_decoupling_angle(c.system, c.decouple.tolerance);
  const SystemKernel k(c.system, dec, solve_modes(dec, iv));
  const Wavefunction2D psi0 = gaussian(p.grid, p.packet, c.system.hbar, iv.begin);
  const Wavefunction2D via_kernel = propagate_with_kernel(psi0, k.quadratic_form(), iv.end);

  json doc;
  doc["config_hash"] = c.hash;
  doc["t_initial"] = iv.begin;
  doc["t_final"] = iv.end;
  doc["alpha"] = dec.alpha;
  doc["kernel_norm_drift"] = via_kernel.norm() - psi0.norm();
  if (c.write_csv) write_snapshot(via_kernel, prepare(c, "psi_kernel.csv"), c.hash);
  if (p.split_step) {
    SplitStepReport report;
    const Wavefunction2D split = split_step_evolve(psi0, c.system, iv.end, p.split, &report);
    if (c.write_csv) write_snapshot(split, prepare(c, "psi_split.csv"), c.hash);
    doc["split_step"] = {{"dt", report.dt},
                         {"steps", report.steps},
                         {"norm_drift", report.norm_drift},
                         {"max_norm_drift_per_step", report.max_norm_drift_per_step}};
    doc["l2_error"] = l2_distance(via_kernel, split);
    doc["linf_error"] = linf_distance(via_kernel, split);
  }
  write_json(c, "propagate.json", doc);
  return kExitOk;
}

int cmd_verify(const RunConfig& c) {
  const std::vector<CriterionResult> results = run_criteria(c.verify.criteria, c.verify.options);
  bool all = true;
  json list = json::array();
  for (const CriterionResult& r : results) {
    all = all && r.passed;
    list.push_back({{"id", r.id},
                    {"name", r.name},
                    {"passed", r.passed},
                    {"value", finite_or_null(r.value)},
                    {"threshold", r.threshold},
                    {"detail", r.detail}});
  }
  json doc;
  doc["config_hash"] = c.hash;
  doc["passed"] = all;
  doc["criteria"] = list;
  write_json(c, "verify.json", doc);
  return all ? kExitOk : kExitCriteriaFailed;
}

}  // namespace tdho::cli
