#pragma once

// Reference solutions of the time-dependent Schroedinger equation on a periodic grid.

#include <complex>
#include <cstddef>
#include <vector>

#include "tdho/kernel.hpp"
#include "tdho/quadratic_kernel.hpp"
#include "tdho/system.hpp"

namespace tdho {

/// Uniform periodic grid on [-L1, L1) x [-L2, L2); sizes are powers of two.
struct Grid2D {
  std::size_t n1 = 256, n2 = 256;
  double half_width1 = 12.0, half_width2 = 12.0;

  double dx1() const { return 2 * half_width1 / static_cast<double>(n1); }
  double dx2() const { return 2 * half_width2 / static_cast<double>(n2); }
  double x1(std::size_t i) const { return -half_width1 + static_cast<double>(i) * dx1(); }
  double x2(std::size_t i) const { return -half_width2 + static_cast<double>(i) * dx2(); }
  std::size_t size() const { return n1 * n2; }
  void validate() const;
  bool operator==(const Grid2D&) const = default;
};

struct Wavefunction2D {
  Grid2D grid;
  /// Row-major: index i1 * n2 + i2.
  std::vector<std::complex<double>> values;
  double time = 0.0;

  std::complex<double>& at(std::size_t i1, std::size_t i2) { return values[i1 * grid.n2 + i2]; }
  const std::complex<double>& at(std::size_t i1, std::size_t i2) const { return values[i1 * grid.n2 + i2]; }
  /// Discrete L2 norm, sqrt(sum |psi|^2 dx1 dx2).
  double norm() const;
};

struct GaussianParams {
  Point2 center{0.0, 0.0};
  Point2 width{1.0, 1.0};  // position standard deviation per axis
  Point2 momentum{0.0, 0.0};
};

/// Normalized product Gaussian  prod (2 pi s^2)^{-1/4} exp(-(x-c)^2/(4 s^2) + i p x / hbar).
Wavefunction2D gaussian(const Grid2D& grid, const GaussianParams& params, double hbar = 1.0, double time = 0.0);

/// Discrete L2 norm of a - b; grids must agree.
double l2_distance(const Wavefunction2D& a, const Wavefunction2D& b);
double linf_distance(const Wavefunction2D& a, const Wavefunction2D& b);
/// <a|b> on the grid.
std::complex<double> overlap(const Wavefunction2D& a, const Wavefunction2D& b);

struct SplitStepOptions {
  double dt = 1e-3;
  /// Population threshold near the position and momentum edges of the grid.
  double edge_population = 1e-6;
  std::size_t edge_cells = 3;
  /// Edge checks run every this many steps and at the end.
  std::size_t check_every = 100;
};

struct SplitStepReport {
  std::size_t steps = 0;
  double dt = 0.0;
  double max_norm_drift_per_step = 0.0;
  double norm_drift = 0.0;
};

/// Strang splitting for the lab-frame Hamiltonian, coefficients frozen at each step
/// midpoint: exp(-iV dt/2) exp(-iT dt) exp(-iV dt/2).  Throws GridTooCoarse when the
/// state reaches the grid edge in position or momentum.
Wavefunction2D split_step_evolve(const Wavefunction2D& psi, const SystemSpec& spec, double t_final,
                                 const SplitStepOptions& options = {}, SplitStepReport* report = nullptr);

/// psi(x'') = sum_{x'} K(x'', x') psi(x') dx1' dx2' on `target`, using the separable
/// structure of the quadratic phase (one complex matrix product per x1'' row).  psi is
/// interpolated onto a finer source grid when its spacing cannot resolve the kernel's
/// phase gradient; throws NumericalError if that grid would be unreasonably large.
Wavefunction2D propagate_with_kernel(const Wavefunction2D& psi, const QuadraticKernel& kernel, double t_final,
                                     const Grid2D& target);
Wavefunction2D propagate_with_kernel(const Wavefunction2D& psi, const QuadraticKernel& kernel, double t_final);

/// Same sum with tabulated kernel values; the grid's initial endpoints must equal the
/// coordinates of psi.  Throws InputError on an extent mismatch or a caustic point.
Wavefunction2D propagate_with_kernel(const Wavefunction2D& psi, const KernelGrid& kernel, double t_final);

}  // namespace tdho
