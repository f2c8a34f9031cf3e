#pragma once

// Propagators assembled from the Ermakov data of each normal mode.
//
// Single mode (unit mass, frequency Omega(t), force F(t)), with rho, phi from the
// auxiliary equation and G = F rho:
//
//   K(Q'', Q') = sqrt(w0 / (2 pi i hbar rho'' rho' sin phi))
//              * exp{ (i/2hbar) (rho_dot'' Q''^2 / rho'' - rho_dot' Q'^2 / rho') }
//              * exp{ (i w0 / 2 hbar sin phi) [ (Q''^2/rho''^2 + Q'^2/rho'^2) cos phi - 2 Q'' Q' / (rho'' rho')
//                      + (2/w0)(Q''/rho'') I1 + (2/w0)(Q'/rho') I2 - (2/w0^2) I3 ] }
//
// The square root follows the continuous branch
//   sqrt(w0 / (2 pi hbar rho'' rho' |sin phi|)) exp(-i pi/4 - i (pi/2) floor(phi/pi)).

#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <vector>

#include "tdho/ermakov.hpp"
#include "tdho/quadratic_kernel.hpp"
#include "tdho/system.hpp"

namespace tdho {

inline constexpr double kDriveQuadratureTolerance = 1e-10;
inline constexpr double kCausticGuard = 1e-10;

struct DriveIntegrals {
  double i1 = 0.0;  // int G(t) sin phi(t, t') dt
  double i2 = 0.0;  // int G(t) sin phi(t'', t) dt
  double i3 = 0.0;  // int G(t) sin phi(t'', t) C(t) dt,  C(t) = int_{t'}^{t} G sin phi(tau, t') dtau
};

/// Integrals of G = F rho over the solution interval, computed on the dense output.
DriveIntegrals drive_integrals(const ErmakovSolution& sol, const TimeFunction& force,
                               double tol = kDriveQuadratureTolerance);

struct ComplexKernel {
  std::complex<double> value{0.0, 0.0};
  double magnitude = 0.0;
  /// Real exponent, not reduced modulo 2 pi: value = magnitude * exp(i (action_phase + branch_phase)).
  double action_phase = 0.0;
  /// -pi/4 - (pi/2) floor(phi/pi) per mode.
  double branch_phase = 0.0;
  std::array<int, 2> maslov_index{0, 0};
  std::array<double, 2> phase_angle{0.0, 0.0};
};

/// Single-mode kernel with all endpoint-independent data precomputed.
class ModeKernel {
 public:
  ModeKernel(const ErmakovSolution& sol, const TimeFunction& force, double hbar);

  /// Throws Caustic when |sin phi| <= kCausticGuard.
  ComplexKernel operator()(double q_final, double q_initial) const;
  double action_phase(double q_final, double q_initial) const;

  bool caustic() const { return std::abs(sin_phi_) <= kCausticGuard; }
  double omega0() const { return omega0_; }
  double phase_angle() const { return phi_; }
  int maslov_index() const { return maslov_; }
  double magnitude() const { return magnitude_; }
  double branch_phase() const { return branch_; }
  const DriveIntegrals& drive() const { return drive_; }
  double rho_initial() const { return rho_i_; }
  double rho_final() const { return rho_f_; }
  double rho_dot_initial() const { return drho_i_; }
  double rho_dot_final() const { return drho_f_; }

 private:
  void check() const;

  double hbar_;
  double omega0_;
  double phi_, sin_phi_, cos_phi_;
  double rho_i_, rho_f_, drho_i_, drho_f_;
  DriveIntegrals drive_;
  int maslov_;
  double magnitude_ = 0.0;
  double branch_;
};

ComplexKernel mode_kernel(const ErmakovSolution& sol, const TimeFunction& force, double q_final, double q_initial,
                          double hbar = 1.0);

/// Both mode solutions on `interval` (which may run backwards) with gauge
/// frequencies default_gauge(Omega_j^2, interval.begin) * gauge_scale[j].
std::array<ErmakovSolution, 2> solve_modes(const DecoupledSystem& dec, Interval interval,
                                           std::array<double, 2> gauge_scale = {1.0, 1.0},
                                           const OdeOptions& options = ermakov_ode_options());

/// Full two-oscillator propagator
///   K = prod_j (m_j'' m_j')^{1/4} exp{-(i/4hbar)(mdot_j'' x_j''^2 - mdot_j' x_j'^2)} K_j(Q_j'', Q_j').
class SystemKernel {
 public:
  /// Throws NotDecouplable unless dec.accepted.
  SystemKernel(const SystemSpec& spec, const DecoupledSystem& dec, const std::array<ErmakovSolution, 2>& sols);

  ComplexKernel operator()(Point2 x_final, Point2 x_initial) const;
  double action_phase(Point2 x_final, Point2 x_initial) const;
  /// Constant amplitude (modulus and branch) of the kernel.
  std::complex<double> amplitude() const;
  /// The kernel as an explicit quadratic form in (x'', x').
  QuadraticKernel quadratic_form() const;

  bool caustic() const { return modes_[0].caustic() || modes_[1].caustic(); }
  double t_initial() const { return t_i_; }
  double t_final() const { return t_f_; }
  const ModeKernel& mode(int j) const { return modes_[static_cast<std::size_t>(j)]; }
  double alpha() const { return alpha_; }

 private:
  SystemSpec spec_;
  double alpha_;
  double t_i_, t_f_;
  std::array<ModeKernel, 2> modes_;
  std::array<double, 2> mass_i_{}, mass_f_{}, mdot_i_{}, mdot_f_{};
};

ComplexKernel full_kernel(const SystemSpec& spec, const DecoupledSystem& dec,
                          const std::array<ErmakovSolution, 2>& sols, Point2 x_final, Point2 x_initial);

/// Closed form for m_j(t) = m_j e^{g t} written with sigma_j = rho_j / sqrt(m_j); the
/// mass boundary phase is absorbed into sigma_dot/sigma.  Requires mdot_j/m_j equal
/// for both oscillators.
ComplexKernel exponential_mass_kernel(const SystemSpec& spec, const DecoupledSystem& dec,
                                      const std::array<ErmakovSolution, 2>& sols, Point2 x_final, Point2 x_initial);

/// Product of two independent oscillator kernels in lab coordinates.  Requires
/// lambda == 0 and alpha == 0.
ComplexKernel uncoupled_kernel(const SystemSpec& spec, const DecoupledSystem& dec,
                               const std::array<ErmakovSolution, 2>& sols, Point2 x_final, Point2 x_initial);

struct EndpointGrid {
  std::vector<double> x1_final, x2_final, x1_initial, x2_initial;
  std::size_t size() const { return x1_final.size() * x2_final.size() * x1_initial.size() * x2_initial.size(); }
};

struct KernelGrid {
  EndpointGrid endpoints;
  /// Row-major over (x1'', x2'', x1', x2').
  std::vector<ComplexKernel> values;
  std::vector<std::uint8_t> caustic;
};

/// Batch evaluation; caustic points are flagged and left zero.
KernelGrid kernel_grid(const SystemSpec& spec, const DecoupledSystem& dec, const std::array<ErmakovSolution, 2>& sols,
                       const EndpointGrid& grid);

}  // namespace tdho
