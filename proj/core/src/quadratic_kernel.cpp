#include "tdho/quadratic_kernel.hpp"

#include <cmath>

namespace tdho {

double QuadraticKernel::phase(Point2 x_final, Point2 x_initial) const {
  const Eigen::Vector4d z(x_final.x1, x_final.x2, x_initial.x1, x_initial.x2);
  return 0.5 * z.dot(hessian * z) + gradient.dot(z) + offset;
}

std::complex<double> QuadraticKernel::operator()(Point2 x_final, Point2 x_initial) const {
  return amplitude * std::polar(1.0, phase(x_final, x_initial));
}

QuadraticKernel polarize(const std::function<double(const Eigen::Vector4d&)>& phase, std::complex<double> amplitude) {
  QuadraticKernel k;
  k.amplitude = amplitude;
  const double c = phase(Eigen::Vector4d::Zero());
  k.offset = c;
  std::array<double, 4> plus{}, minus{};
  for (int i = 0; i < 4; ++i) {
    const Eigen::Vector4d e = Eigen::Vector4d::Unit(i);
    plus[i] = phase(e);
    minus[i] = phase(-e);
    k.gradient(i) = 0.5 * (plus[i] - minus[i]);
    k.hessian(i, i) = plus[i] + minus[i] - 2 * c;
  }
  for (int i = 0; i < 4; ++i) {
    for (int j = i + 1; j < 4; ++j) {
      const double both = phase(Eigen::Vector4d::Unit(i) + Eigen::Vector4d::Unit(j));
      // q(e_i + e_j) = c + g_i + g_j + (H_ii + H_jj)/2 + H_ij
      const double hij = both - c - k.gradient(i) - k.gradient(j) - 0.5 * (k.hessian(i, i) + k.hessian(j, j));
      k.hessian(i, j) = k.hessian(j, i) = hij;
    }
  }
  return k;
}

}  // namespace tdho
