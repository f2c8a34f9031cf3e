#pragma once

#include <complex>
#include <functional>

#include <Eigen/Core>

#include "tdho/system.hpp"

namespace tdho {

/// A propagator of the form  K(x'', x') = amplitude * exp(i q(z)),
/// q(z) = z^T H z / 2 + g^T z + c,  z = (x1'', x2'', x1', x2').
/// Every propagator of a quadratic Hamiltonian away from caustics has this form.
struct QuadraticKernel {
  std::complex<double> amplitude{0.0, 0.0};
  Eigen::Matrix4d hessian = Eigen::Matrix4d::Zero();
  Eigen::Vector4d gradient = Eigen::Vector4d::Zero();
  double offset = 0.0;

  double phase(Point2 x_final, Point2 x_initial) const;
  std::complex<double> operator()(Point2 x_final, Point2 x_initial) const;
};

/// Recovers the quadratic phase polynomial from 15 evaluations of an (unwrapped)
/// phase function: q(0), q(+-e_i) and q(e_i + e_j).
QuadraticKernel polarize(const std::function<double(const Eigen::Vector4d&)>& phase, std::complex<double> amplitude);

}  // namespace tdho
