#include "tdho/kernel.hpp"

#include <cmath>
#include <numbers>

#include "quadrature.hpp"
#include "tdho/errors.hpp"

namespace tdho {

namespace {

constexpr double kPi = std::numbers::pi;

// Literal kernel of one mode written with generic scale factors:
//   prefactor sqrt(w0 / (2 pi i hbar s'' s' sin phi)),
//   boundary  (1/2hbar)(b'' y''^2 - b' y'^2),
//   bracket   with y''/r'', y'/r' in place of Q/rho.
struct ModeTerms {
  double scale_f, scale_i;   // s'', s'
  double bound_f, bound_i;   // b'', b'
  double ratio_f, ratio_i;   // r'', r'
};

double bracket_phase(const ModeKernel& k, double hbar, const ModeTerms& m, double y_f, double y_i) {
  const double w0 = k.omega0();
  const double phi = k.phase_angle();
  const double a = y_f / m.ratio_f, b = y_i / m.ratio_i;
  const DriveIntegrals& d = k.drive();
  const double bracket = (a * a + b * b) * std::cos(phi) - 2 * a * b + (2 / w0) * a * d.i1 + (2 / w0) * b * d.i2 -
                         (2 / (w0 * w0)) * d.i3;
  const double boundary = (m.bound_f * y_f * y_f - m.bound_i * y_i * y_i) / (2 * hbar);
  return boundary + w0 * bracket / (2 * hbar * std::sin(phi));
}

double branch_of(double phi) { return -kPi / 4 - (kPi / 2) * std::floor(phi / kPi); }

double prefactor(double w0, double hbar, double s_f, double s_i, double phi) {
  return std::sqrt(w0 / (2 * kPi * hbar * s_f * s_i * std::abs(std::sin(phi))));
}

struct EndpointMasses {
  std::array<double, 2> m_i{}, m_f{}, mdot_i{}, mdot_f{};
};

EndpointMasses endpoint_masses(const SystemSpec& spec, double t_i, double t_f) {
  EndpointMasses e;
  for (std::size_t j = 0; j < 2; ++j) {
    const Taylor a = spec.oscillators[j].mass.taylor(t_i, 1);
    const Taylor b = spec.oscillators[j].mass.taylor(t_f, 1);
    e.m_i[j] = a.c[0];
    e.mdot_i[j] = a.c[1];
    e.m_f[j] = b.c[0];
    e.mdot_f[j] = b.c[1];
  }
  return e;
}

Point2 to_modes(double alpha, const std::array<double, 2>& mass, Point2 x) {
  const double q1 = std::sqrt(mass[0]) * x.x1, q2 = std::sqrt(mass[1]) * x.x2;
  const double c = std::cos(alpha), s = std::sin(alpha);
  return {c * q1 - s * q2, s * q1 + c * q2};
}

void require_same_interval(const std::array<ErmakovSolution, 2>& sols) {
  const Interval a = sols[0].interval(), b = sols[1].interval();
  if (a.begin != b.begin || a.end != b.end) throw InputError("mode solutions cover different intervals");
}

void require_accepted(const DecoupledSystem& dec) {
  if (!dec.accepted)
    throw NotDecouplable(dec.gamma_residual, kDefaultDecouplingTolerance * dec.residual_scale, dec.alpha);
}

ComplexKernel assemble(double magnitude, double action, double branch, const std::array<ModeKernel, 2>& modes) {
  ComplexKernel k;
  k.magnitude = magnitude;
  k.action_phase = action;
  k.branch_phase = branch;
  k.value = std::polar(magnitude, action + branch);
  for (std::size_t j = 0; j < 2; ++j) {
    k.maslov_index[j] = modes[j].maslov_index();
    k.phase_angle[j] = modes[j].phase_angle();
  }
  return k;
}

void throw_if_caustic(const std::array<ModeKernel, 2>& modes) {
  for (const auto& m : modes)
    if (m.caustic()) throw Caustic(m.phase_angle());
}

}  // namespace

DriveIntegrals drive_integrals(const ErmakovSolution& sol, const TimeFunction& force, double tol) {
  const auto& ts = sol.node_times();
  const double total = sol.total_phase();
  auto g = [&](double t) { return force.eval(t) * sol.rho(t); };
  DriveIntegrals d;
  double cumulative = 0.0;  // C(t) at the start of the current step
  for (std::size_t k = 1; k < ts.size(); ++k) {
    const double a = ts[k - 1], b = ts[k];
    const double c_a = cumulative;
    auto early = [&](double t) { return g(t) * std::sin(sol.phase(t)); };
    auto late = [&](double t) { return g(t) * std::sin(total - sol.phase(t)); };
    auto nested = [&](double t) { return late(t) * (c_a + detail::integrate_fixed(early, a, t)); };
    const double step_i1 = detail::integrate_segment(early, a, b, tol);
    d.i2 += detail::integrate_segment(late, a, b, tol);
    d.i3 += detail::integrate_segment(nested, a, b, tol);
    cumulative = c_a + step_i1;
  }
  d.i1 = cumulative;
  return d;
}

ModeKernel::ModeKernel(const ErmakovSolution& sol, const TimeFunction& force, double hbar)
    : hbar_(hbar), omega0_(sol.omega0()) {
  if (!(hbar > 0.0)) throw InputError("hbar must be positive");
  const Interval iv = sol.interval();
  phi_ = sol.total_phase();
  sin_phi_ = std::sin(phi_);
  cos_phi_ = std::cos(phi_);
  rho_i_ = sol.rho(iv.begin);
  drho_i_ = sol.rho_dot(iv.begin);
  rho_f_ = sol.rho(iv.end);
  drho_f_ = sol.rho_dot(iv.end);
  drive_ = drive_integrals(sol, force);
  maslov_ = static_cast<int>(std::floor(phi_ / kPi));
  branch_ = branch_of(phi_);
  if (!caustic()) magnitude_ = prefactor(omega0_, hbar_, rho_f_, rho_i_, phi_);
}

void ModeKernel::check() const {
  if (caustic()) throw Caustic(phi_);
}

double ModeKernel::action_phase(double q_final, double q_initial) const {
  check();
  const double a = q_final / rho_f_, b = q_initial / rho_i_;
  const double bracket = (a * a + b * b) * cos_phi_ - 2 * a * b + (2 / omega0_) * a * drive_.i1 +
                         (2 / omega0_) * b * drive_.i2 - (2 / (omega0_ * omega0_)) * drive_.i3;
  const double boundary =
      (drho_f_ * q_final * q_final / rho_f_ - drho_i_ * q_initial * q_initial / rho_i_) / (2 * hbar_);
  return boundary + omega0_ * bracket / (2 * hbar_ * sin_phi_);
}

ComplexKernel ModeKernel::operator()(double q_final, double q_initial) const {
  ComplexKernel k;
  k.action_phase = action_phase(q_final, q_initial);
  k.magnitude = magnitude_;
  k.branch_phase = branch_;
  k.value = std::polar(magnitude_, k.action_phase + branch_);
  k.maslov_index = {maslov_, 0};
  k.phase_angle = {phi_, 0.0};
  return k;
}

ComplexKernel mode_kernel(const ErmakovSolution& sol, const TimeFunction& force, double q_final, double q_initial,
                          double hbar) {
  return ModeKernel(sol, force, hbar)(q_final, q_initial);
}

std::array<ErmakovSolution, 2> solve_modes(const DecoupledSystem& dec, Interval interval,
                                           std::array<double, 2> gauge_scale, const OdeOptions& options) {
  std::array<ErmakovSolution, 2> sols;
  for (std::size_t j = 0; j < 2; ++j) {
    const double w0 = default_gauge(dec.omega_sq[j], interval.begin) * gauge_scale[j];
    sols[j] = solve_ermakov(dec.omega_sq[j], w0, interval, static_cast<int>(j), options);
  }
  return sols;
}

SystemKernel::SystemKernel(const SystemSpec& spec, const DecoupledSystem& dec,
                           const std::array<ErmakovSolution, 2>& sols)
    : spec_(spec),
      alpha_(dec.alpha),
      t_i_(sols[0].interval().begin),
      t_f_(sols[0].interval().end),
      modes_{ModeKernel(sols[0], dec.force[0], spec.hbar), ModeKernel(sols[1], dec.force[1], spec.hbar)} {
  require_accepted(dec);
  require_same_interval(sols);
  const EndpointMasses e = endpoint_masses(spec, t_i_, t_f_);
  mass_i_ = e.m_i;
  mass_f_ = e.m_f;
  mdot_i_ = e.mdot_i;
  mdot_f_ = e.mdot_f;
}

double SystemKernel::action_phase(Point2 x_final, Point2 x_initial) const {
  const Point2 qf = to_modes(alpha_, mass_f_, x_final);
  const Point2 qi = to_modes(alpha_, mass_i_, x_initial);
  const double mass_phase = -(mdot_f_[0] * x_final.x1 * x_final.x1 + mdot_f_[1] * x_final.x2 * x_final.x2 -
                              mdot_i_[0] * x_initial.x1 * x_initial.x1 - mdot_i_[1] * x_initial.x2 * x_initial.x2) /
                            (4 * spec_.hbar);
  return mass_phase + modes_[0].action_phase(qf.x1, qi.x1) + modes_[1].action_phase(qf.x2, qi.x2);
}

std::complex<double> SystemKernel::amplitude() const {
  throw_if_caustic(modes_);
  const double measure = std::pow(mass_f_[0] * mass_i_[0] * mass_f_[1] * mass_i_[1], 0.25);
  return std::polar(measure * modes_[0].magnitude() * modes_[1].magnitude(),
                    modes_[0].branch_phase() + modes_[1].branch_phase());
}

ComplexKernel SystemKernel::operator()(Point2 x_final, Point2 x_initial) const {
  throw_if_caustic(modes_);
  const double measure = std::pow(mass_f_[0] * mass_i_[0] * mass_f_[1] * mass_i_[1], 0.25);
  return assemble(measure * modes_[0].magnitude() * modes_[1].magnitude(), action_phase(x_final, x_initial),
                  modes_[0].branch_phase() + modes_[1].branch_phase(), modes_);
}

QuadraticKernel SystemKernel::quadratic_form() const {
  return polarize([this](const Eigen::Vector4d& z) { return action_phase({z(0), z(1)}, {z(2), z(3)}); },
                  amplitude());
}

ComplexKernel full_kernel(const SystemSpec& spec, const DecoupledSystem& dec,
                          const std::array<ErmakovSolution, 2>& sols, Point2 x_final, Point2 x_initial) {
  return SystemKernel(spec, dec, sols)(x_final, x_initial);
}

ComplexKernel exponential_mass_kernel(const SystemSpec& spec, const DecoupledSystem& dec,
                                      const std::array<ErmakovSolution, 2>& sols, Point2 x_final, Point2 x_initial) {
  require_accepted(dec);
  require_same_interval(sols);
  const double t_i = sols[0].interval().begin, t_f = sols[0].interval().end;
  for (double t : chebyshev_points({std::min(t_i, t_f), std::max(t_i, t_f)}, 17)) {
    const Taylor a = spec.oscillators[0].mass.taylor(t, 1);
    const Taylor b = spec.oscillators[1].mass.taylor(t, 1);
    const double ra = a.c[1] / a.c[0], rb = b.c[1] / b.c[0];
    if (std::abs(ra - rb) > 1e-12 * std::max(1.0, std::abs(ra)))
      throw InputError("exponential-mass form needs equal mass growth rates");
  }
  const std::array<ModeKernel, 2> modes{ModeKernel(sols[0], dec.force[0], spec.hbar),
                                        ModeKernel(sols[1], dec.force[1], spec.hbar)};
  throw_if_caustic(modes);
  const EndpointMasses e = endpoint_masses(spec, t_i, t_f);
  const Point2 qf = to_modes(dec.alpha, e.m_f, x_final);
  const Point2 qi = to_modes(dec.alpha, e.m_i, x_initial);
  const std::array<double, 2> yf{qf.x1, qf.x2}, yi{qi.x1, qi.x2};
  double magnitude = 1.0, action = 0.0, branch = 0.0;
  for (std::size_t j = 0; j < 2; ++j) {
    const ModeKernel& k = modes[j];
    const double sf = k.rho_final() / std::sqrt(e.m_f[j]), si = k.rho_initial() / std::sqrt(e.m_i[j]);
    const double dsf = k.rho_dot_final() / std::sqrt(e.m_f[j]) - k.rho_final() * e.mdot_f[j] / (2 * std::pow(e.m_f[j], 1.5));
    const double dsi =
        k.rho_dot_initial() / std::sqrt(e.m_i[j]) - k.rho_initial() * e.mdot_i[j] / (2 * std::pow(e.m_i[j], 1.5));
    const ModeTerms m{sf, si, dsf / sf, dsi / si, std::sqrt(e.m_f[j]) * sf, std::sqrt(e.m_i[j]) * si};
    magnitude *= prefactor(k.omega0(), spec.hbar, sf, si, k.phase_angle());
    action += bracket_phase(k, spec.hbar, m, yf[j], yi[j]);
    branch += branch_of(k.phase_angle());
  }
  return assemble(magnitude, action, branch, modes);
}

ComplexKernel uncoupled_kernel(const SystemSpec& spec, const DecoupledSystem& dec,
                               const std::array<ErmakovSolution, 2>& sols, Point2 x_final, Point2 x_initial) {
  require_same_interval(sols);
  if (dec.alpha != 0.0) throw InputError("uncoupled form needs alpha = 0");
  const double t_i = sols[0].interval().begin, t_f = sols[0].interval().end;
  for (double t : chebyshev_points({std::min(t_i, t_f), std::max(t_i, t_f)}, 17))
    if (spec.coupling.eval(t) != 0.0) throw InputError("uncoupled form needs lambda = 0");
  const std::array<ModeKernel, 2> modes{ModeKernel(sols[0], dec.force[0], spec.hbar),
                                        ModeKernel(sols[1], dec.force[1], spec.hbar)};
  throw_if_caustic(modes);
  const EndpointMasses e = endpoint_masses(spec, t_i, t_f);
  const std::array<double, 2> yf{x_final.x1, x_final.x2}, yi{x_initial.x1, x_initial.x2};
  double magnitude = 1.0, action = 0.0, branch = 0.0;
  for (std::size_t j = 0; j < 2; ++j) {
    const ModeKernel& k = modes[j];
    const double sf = k.rho_final() / std::sqrt(e.m_f[j]), si = k.rho_initial() / std::sqrt(e.m_i[j]);
    const double dsf = k.rho_dot_final() / std::sqrt(e.m_f[j]) - k.rho_final() * e.mdot_f[j] / (2 * std::pow(e.m_f[j], 1.5));
    const double dsi =
        k.rho_dot_initial() / std::sqrt(e.m_i[j]) - k.rho_initial() * e.mdot_i[j] / (2 * std::pow(e.m_i[j], 1.5));
    const ModeTerms m{sf, si, e.m_f[j] * dsf / sf, e.m_i[j] * dsi / si, sf, si};
    magnitude *= prefactor(k.omega0(), spec.hbar, sf, si, k.phase_angle());
    action += bracket_phase(k, spec.hbar, m, yf[j], yi[j]);
    branch += branch_of(k.phase_angle());
  }
  return assemble(magnitude, action, branch, modes);
}

KernelGrid kernel_grid(const SystemSpec& spec, const DecoupledSystem& dec, const std::array<ErmakovSolution, 2>& sols,
                       const EndpointGrid& grid) {
  const SystemKernel kernel(spec, dec, sols);
  KernelGrid out;
  out.endpoints = grid;
  const std::size_t n = grid.size();
  out.values.assign(n, ComplexKernel{});
  out.caustic.assign(n, kernel.caustic() ? 1 : 0);
  if (kernel.caustic()) return out;
  const std::size_t n2 = grid.x2_final.size(), n3 = grid.x1_initial.size(), n4 = grid.x2_initial.size();
  const auto rows = static_cast<std::ptrdiff_t>(grid.x1_final.size() * n2);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t r = 0; r < rows; ++r) {
    const auto ur = static_cast<std::size_t>(r);
    const Point2 xf{grid.x1_final[ur / n2], grid.x2_final[ur % n2]};
    std::size_t idx = ur * n3 * n4;
    for (std::size_t c = 0; c < n3; ++c)
      for (std::size_t d = 0; d < n4; ++d) out.values[idx++] = kernel(xf, {grid.x1_initial[c], grid.x2_initial[d]});
  }
  return out;
}

}  // namespace tdho
