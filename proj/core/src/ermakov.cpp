#include "tdho/ermakov.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>

#include "quadrature.hpp"
#include "tdho/errors.hpp"

namespace tdho {

namespace {

constexpr double kRhoFloor = 1e-12;

}  // namespace

void ErmakovSolution::amplitude(double t, ErmakovState& s) const {
  std::array<double, 4> y{};
  traj_.state(t, y);
  s.u = y[0];
  s.du = y[1];
  s.v = y[2];
  s.dv = y[3];
  const double w2 = omega0_ * omega0_;
  s.rho = std::sqrt(s.u * s.u + w2 * s.v * s.v);
  if (!(s.rho > kRhoFloor)) throw NumericalError("Ermakov amplitude rho collapsed at t = " + std::to_string(t));
  s.drho = (s.u * s.du + w2 * s.v * s.dv) / s.rho;
}

ErmakovState ErmakovSolution::at(double t) const {
  ErmakovState s{};
  amplitude(t, s);
  s.phase = phase(t);
  return s;
}

double ErmakovSolution::rho(double t) const {
  ErmakovState s{};
  amplitude(t, s);
  return s.rho;
}

double ErmakovSolution::rho_dot(double t) const {
  ErmakovState s{};
  amplitude(t, s);
  return s.drho;
}

double ErmakovSolution::phase(double t) const {
  const auto& ts = traj_.node_times();
  const bool forward = ts.back() >= ts.front();
  std::size_t k;
  if (forward) {
    auto it = std::upper_bound(ts.begin(), ts.end(), t);
    k = it == ts.begin() ? 0 : static_cast<std::size_t>(it - ts.begin()) - 1;
  } else {
    auto it = std::upper_bound(ts.begin(), ts.end(), t, std::greater<>());
    k = it == ts.begin() ? 0 : static_cast<std::size_t>(it - ts.begin()) - 1;
  }
  k = std::min(k, ts.size() - 1);
  if (t == ts[k]) return node_phase_[k];
  if (!interval().contains(t)) throw DomainError("phase requested outside the Ermakov solution range");
  const double w2 = omega0_ * omega0_;
  auto integrand = [&](double s) {
    std::array<double, 4> y{};
    traj_.state(s, y);
    return omega0_ / (y[0] * y[0] + w2 * y[2] * y[2]);
  };
  return node_phase_[k] + detail::integrate_segment(integrand, ts[k], t, kPhaseQuadratureTolerance);
}

double ErmakovSolution::phase(double t_a, double t_b) const { return phase(t_b) - phase(t_a); }

double ErmakovSolution::residual(double t) const {
  ErmakovState s{};
  amplitude(t, s);
  const double w2 = omega0_ * omega0_;
  const double om2 = omega_sq_.eval(t);
  const double rho_ddot = (s.du * s.du + w2 * s.dv * s.dv - s.drho * s.drho) / s.rho - om2 * s.rho;
  return rho_ddot + om2 * s.rho - w2 / (s.rho * s.rho * s.rho);
}

double ErmakovSolution::max_residual(std::size_t points) const {
  const Interval iv = interval();
  double m = 0.0;
  for (std::size_t k = 0; k < points; ++k) {
    const double t = iv.begin + iv.length() * static_cast<double>(k) / static_cast<double>(points - 1);
    m = std::max(m, std::abs(residual(t)));
  }
  return m;
}

double ErmakovSolution::wronskian(double t) const {
  std::array<double, 4> y{};
  traj_.state(t, y);
  return y[0] * y[3] - y[1] * y[2];
}

ErmakovSolution solve_ermakov(const TimeFunction& omega_sq, double omega0, Interval interval, int mode,
                              const OdeOptions& options) {
  if (!(omega0 > 0.0) || !std::isfinite(omega0)) throw InputError("gauge frequency omega0 must be positive");
  ErmakovSolution sol;
  sol.omega_sq_ = omega_sq;
  sol.omega0_ = omega0;
  sol.mode_ = mode;
  const OdeRhs rhs = [&omega_sq](double t, std::span<const double> y, std::span<double> dy) {
    const double w = omega_sq.eval(t);
    dy[0] = y[1];
    dy[1] = -w * y[0];
    dy[2] = y[3];
    dy[3] = -w * y[2];
  };
  const std::array<double, 4> y0{1.0, 0.0, 0.0, 1.0};
  sol.traj_ = integrate(rhs, interval.begin, y0, interval.end, options);

  const auto& ts = sol.traj_.node_times();
  sol.node_phase_.assign(ts.size(), 0.0);
  const double w2 = omega0 * omega0;
  auto integrand = [&](double s) {
    std::array<double, 4> y{};
    sol.traj_.state(s, y);
    const double r2 = y[0] * y[0] + w2 * y[2] * y[2];
    if (!(r2 > kRhoFloor * kRhoFloor)) throw NumericalError("Ermakov amplitude rho collapsed");
    return omega0 / r2;
  };
  for (std::size_t k = 1; k < ts.size(); ++k)
    sol.node_phase_[k] = sol.node_phase_[k - 1] + detail::integrate_segment(integrand, ts[k - 1], ts[k], kPhaseQuadratureTolerance);
  return sol;
}

double default_gauge(const TimeFunction& omega_sq, double t0) {
  const double w2 = omega_sq.eval(t0);
  return w2 > 1e-12 ? std::sqrt(w2) : 1.0;
}

}  // namespace tdho
