#pragma once

// Auxiliary (Ermakov-Pinney) equation  rho'' + Omega^2(t) rho = omega0^2 / rho^3.
//
// The solution is built from two solutions of the linear equation
// u'' + Omega^2 u = 0 with u(t0)=1, u'(t0)=0 and v(t0)=0, v'(t0)=1:
//   rho = sqrt(u^2 + omega0^2 v^2),  rho(t0) = 1,  rho'(t0) = 0,
// and the rescaled time enters through phi(t) = omega0 * int_{t0}^{t} dt / rho^2.

#include <vector>

#include "tdho/ode.hpp"
#include "tdho/timefn.hpp"

namespace tdho {

struct ErmakovState {
  double u, du, v, dv;
  double rho, drho;
  double phase;  // phi(t_begin -> t)
};

class ErmakovSolution {
 public:
  int mode() const { return mode_; }
  double omega0() const { return omega0_; }
  /// Integration runs from interval().begin to interval().end (either direction).
  Interval interval() const { return {traj_.t_begin(), traj_.t_end()}; }

  ErmakovState at(double t) const;
  double rho(double t) const;
  double rho_dot(double t) const;

  /// phi(t_begin -> t).
  double phase(double t) const;
  /// phi(t_a -> t_b) = omega0 int_{t_a}^{t_b} rho^-2 dt, computed as a difference of the
  /// cumulative phase so that phi(a,c) = phi(a,b) + phi(b,c).
  double phase(double t_a, double t_b) const;
  double total_phase() const { return node_phase_.back(); }

  double omega_sq(double t) const { return omega_sq_.eval(t); }

  /// rho'' + Omega^2 rho - omega0^2/rho^3, with rho'' formed from the linear solutions.
  double residual(double t) const;
  /// max |residual| over `points` uniformly spaced times.
  double max_residual(std::size_t points = 101) const;
  double wronskian(double t) const;

  const StepStats& stats() const { return traj_.stats(); }
  const std::vector<double>& node_times() const { return traj_.node_times(); }

 private:
  friend ErmakovSolution solve_ermakov(const TimeFunction&, double, Interval, int, const OdeOptions&);

  void amplitude(double t, ErmakovState& s) const;

  TimeFunction omega_sq_;
  double omega0_ = 1.0;
  int mode_ = 0;
  DenseTrajectory traj_;
  std::vector<double> node_phase_;
};

/// Quadrature tolerance for the phase integral.
inline constexpr double kPhaseQuadratureTolerance = 1e-11;

/// Integrator tolerances for u and v.  The kernel phase amplifies errors in phi by
/// up to Q^2 / sin^2 phi, so these sit two decades below the generic defaults.
inline OdeOptions ermakov_ode_options() {
  OdeOptions o;
  o.rtol = 1e-12;
  o.atol = 1e-14;
  return o;
}

ErmakovSolution solve_ermakov(const TimeFunction& omega_sq, double omega0, Interval interval, int mode = 0,
                              const OdeOptions& options = ermakov_ode_options());

/// Omega(t0) when Omega^2(t0) > 1e-12, else 1.
double default_gauge(const TimeFunction& omega_sq, double t0);

}  // namespace tdho
