#pragma once

// Semiclassical (Van Vleck) propagator from classical trajectories; exact for
// quadratic Hamiltonians.
//
//   K = (2 pi hbar)^{-n/2} |det dx''/dp'|^{-1/2} exp(-i n pi/4 - i mu pi/2) exp(i S_cl / hbar)
//
// where mu counts sign changes of det dx''/dp' along the path.  Crossings are
// assumed generic (the determinant changes sign at each focal point).

#include <complex>
#include <functional>
#include <vector>

#include <Eigen/Core>

#include "tdho/ode.hpp"
#include "tdho/quadratic_kernel.hpp"
#include "tdho/system.hpp"

namespace tdho {

/// H = sum_i p_i^2 / 2 m_i(t) + x^T V(t) x / 2 - g(t) . x
struct LinearHamiltonian {
  std::vector<TimeFunction> mass;
  std::vector<std::vector<TimeFunction>> potential;  // symmetric
  std::vector<TimeFunction> force;

  std::size_t dof() const { return mass.size(); }

  /// Lab-frame Hamiltonian of the coupled pair: V = [[m1 w1^2, lambda], [lambda, m2 w2^2]], g = m f.
  static LinearHamiltonian from_system(const SystemSpec& spec);
  /// One unit-mass mode: V = Omega^2, g = F.
  static LinearHamiltonian single_mode(const TimeFunction& omega_sq, const TimeFunction& force);
};

struct ClassicalTrajectory {
  double t_initial = 0.0, t_final = 0.0;
  Eigen::VectorXd x_initial, x_final, p_initial, p_final;
  double action = 0.0;
  Eigen::MatrixXd monodromy_xp;  // dx''/dp'
  double boundary_residual = 0.0;
};

inline constexpr double kVanVleckTolerance = 1e-12;

class VanVleckPropagator {
 public:
  VanVleckPropagator(LinearHamiltonian hamiltonian, double t_initial, double t_final, double hbar = 1.0);

  /// Shoots p' so that x(t'') = x_final; throws Caustic when dx''/dp' is singular.
  ClassicalTrajectory trajectory(const Eigen::VectorXd& x_final, const Eigen::VectorXd& x_initial) const;
  /// Phase-space point (x, p) at time t on the path starting from (x', p').
  Eigen::VectorXd phase_point(const Eigen::VectorXd& x_initial, const Eigen::VectorXd& p_initial, double t) const;
  /// Action of an arbitrary path x(t) with velocity v(t), by quadrature of the Lagrangian.
  double lagrangian_action(const std::function<Eigen::VectorXd(double)>& x,
                           const std::function<Eigen::VectorXd(double)>& v) const;

  std::complex<double> operator()(const Eigen::VectorXd& x_final, const Eigen::VectorXd& x_initial) const;
  std::complex<double> operator()(Point2 x_final, Point2 x_initial) const;
  std::complex<double> operator()(double q_final, double q_initial) const;

  /// Endpoint-independent part: modulus and branch.
  std::complex<double> amplitude() const;
  int maslov_index() const { return maslov_; }
  double monodromy_determinant() const { return det_; }
  const Eigen::MatrixXd& fundamental_matrix() const { return phi_final_; }
  /// Two degrees of freedom only.
  QuadraticKernel quadratic_form() const;

 private:
  void matrices(double t, Eigen::VectorXd& m, Eigen::MatrixXd& v, Eigen::VectorXd& g) const;

  LinearHamiltonian h_;
  double t_i_, t_f_, hbar_;
  std::size_t n_;
  DenseTrajectory traj_;
  Eigen::MatrixXd phi_final_;
  Eigen::VectorXd particular_final_;
  double det_ = 0.0;
  int maslov_ = 0;
};

std::complex<double> van_vleck_kernel(const SystemSpec& spec, Point2 x_final, Point2 x_initial);
std::complex<double> van_vleck_kernel(const TimeFunction& omega_sq, const TimeFunction& force, double q_final,
                                      double q_initial, Interval interval, double hbar = 1.0);

}  // namespace tdho
