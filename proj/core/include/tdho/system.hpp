#pragma once

// The coupled, driven oscillator pair
//
//   H(t) = sum_j [ p_j^2 / 2m_j(t) + m_j(t) w_j(t)^2 x_j^2 / 2 - m_j(t) f_j(t) x_j ] + lambda(t) x1 x2
//
// and the mass-scaled constant rotation that maps it to normal modes
//
//   H(t) = sum_j [ P_j^2/2 + Omega_j(t)^2 Q_j^2/2 - F_j(t) Q_j ] + Gamma(t) Q1 Q2.

#include <array>
#include <vector>

#include "tdho/timefn.hpp"

namespace tdho {

struct Point2 {
  double x1 = 0.0;
  double x2 = 0.0;
};

struct OscillatorSpec {
  TimeFunction mass;
  TimeFunction frequency;
  TimeFunction drive;
};

struct SystemSpec {
  std::array<OscillatorSpec, 2> oscillators;
  TimeFunction coupling;
  double hbar = 1.0;
  Interval interval{0.0, 1.0};

  /// Checks t'' > t', hbar > 0, every function on the interval, and m_j > 0
  /// on 1024 samples.  Throws InputError or DomainError.
  void validate() const;
};

/// Normal-mode form of a SystemSpec for one constant rotation angle.
struct DecoupledSystem {
  double alpha = 0.0;
  std::array<TimeFunction, 2> omega_tilde_sq;
  std::array<TimeFunction, 2> omega_sq;
  std::array<TimeFunction, 2> force;
  /// sup over the Chebyshev sample grid of |Gamma(t)|.
  double gamma_residual = 0.0;
  /// max(1, sup_t |w~1^2| + |w~2^2| + |lambda|/sqrt(m1 m2)).
  double residual_scale = 1.0;
  bool accepted = false;
};

inline constexpr double kDefaultDecouplingTolerance = 1e-9;
inline constexpr std::size_t kGammaSamplePoints = 513;

/// w~_j^2(t) = w_j^2 + (mdot_j^2/m_j^2 - 2 mddot_j/m_j) / 4.
TimeFunction effective_frequency_sq(const SystemSpec& spec, int j);

/// lambda(t) / sqrt(m1(t) m2(t)).
TimeFunction scaled_coupling(const SystemSpec& spec);

/// beta_j(t) = -mdot_j / (2 sqrt(m_j)), the choice that removes every P Q cross term.
TimeFunction mass_gauge_beta(const SystemSpec& spec, int j);

/// Gamma(t; alpha) = (w~1^2 - w~2^2) sin(2 alpha) / 2 + lambda cos(2 alpha) / sqrt(m1 m2).
double gamma_coefficient(const SystemSpec& spec, double alpha, double t);

/// Chebyshev-Lobatto points on the interval.
std::vector<double> chebyshev_points(const Interval& interval, std::size_t n);

/// Normal-mode system for a given angle; gamma_residual is filled, acceptance
/// is judged against `tol`.
DecoupledSystem decouple_with_angle(const SystemSpec& spec, double alpha, double tol = kDefaultDecouplingTolerance);

/// Best constant angle in (-pi/4, pi/4] (coarse scan over 1024 angles, then
/// golden-section refinement) without throwing when the residual is too large.
DecoupledSystem analyze_decoupling(const SystemSpec& spec, double tol = kDefaultDecouplingTolerance);

/// As analyze_decoupling, but throws NotDecouplable unless the residual is
/// within tol * residual_scale.
DecoupledSystem find_decoupling_angle(const SystemSpec& spec, double tol = kDefaultDecouplingTolerance);

/// Q1 = sqrt(m1) x1 cos a - sqrt(m2) x2 sin a,  Q2 = sqrt(m1) x1 sin a + sqrt(m2) x2 cos a.
Point2 normal_mode_coordinates(const SystemSpec& spec, double alpha, Point2 x, double t);
Point2 lab_coordinates(const SystemSpec& spec, double alpha, Point2 q, double t);

/// Coefficients of the transformed Hamiltonian for a constant angle and
/// arbitrary beta_1, beta_2:
///   H = (P1^2+P2^2)/2 + A P1 Q1 + B P2 Q2 + C (P1 Q2 + P2 Q1)
///       + D1 Q1^2/2 + D2 Q2^2/2 + E Q1 Q2 - F1 Q1 - F2 Q2.
struct TransformCoefficients {
  double A = 0, B = 0, C = 0, D1 = 0, D2 = 0, E = 0, F1 = 0, F2 = 0, d1 = 0, d2 = 0;
};

TransformCoefficients transform_coefficients(const SystemSpec& spec, double alpha, const TimeFunction& beta1,
                                             const TimeFunction& beta2, double t);

}  // namespace tdho
