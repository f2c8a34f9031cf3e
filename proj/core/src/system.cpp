#include "tdho/system.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <numbers>

#include "tdho/errors.hpp"

namespace tdho {

namespace {

constexpr double kPi = std::numbers::pi;

const OscillatorSpec& osc(const SystemSpec& spec, int j) {
  if (j < 0 || j > 1) throw InputError("mode index must be 0 or 1");
  return spec.oscillators[static_cast<std::size_t>(j)];
}

struct GammaSamples {
  std::vector<double> w1, w2, kappa;
  double scale = 1.0;

  double sup_gamma(double alpha) const {
    const double s = std::sin(2 * alpha), c = std::cos(2 * alpha);
    double m = 0.0;
    for (std::size_t k = 0; k < w1.size(); ++k) m = std::max(m, std::abs(0.5 * (w1[k] - w2[k]) * s + kappa[k] * c));
    return m;
  }
};

GammaSamples sample_gamma(const SystemSpec& spec) {
  const auto ts = chebyshev_points(spec.interval, kGammaSamplePoints);
  const TimeFunction w1 = effective_frequency_sq(spec, 0);
  const TimeFunction w2 = effective_frequency_sq(spec, 1);
  const TimeFunction kappa = scaled_coupling(spec);
  GammaSamples g;
  g.w1.reserve(ts.size());
  for (double t : ts) {
    g.w1.push_back(w1.eval(t));
    g.w2.push_back(w2.eval(t));
    g.kappa.push_back(kappa.eval(t));
    g.scale = std::max(g.scale, std::abs(g.w1.back()) + std::abs(g.w2.back()) + std::abs(g.kappa.back()));
  }
  return g;
}

double wrap_angle(double alpha) {
  // |Gamma| has period pi/2 in alpha; map into (-pi/4, pi/4].
  while (alpha <= -kPi / 4) alpha += kPi / 2;
  while (alpha > kPi / 4) alpha -= kPi / 2;
  return alpha;
}

}  // namespace

void SystemSpec::validate() const {
  if (!(interval.end > interval.begin)) throw InputError("interval must satisfy t_final > t_initial");
  if (!(hbar > 0.0) || !std::isfinite(hbar)) throw InputError("hbar must be positive");
  for (const auto& o : oscillators) {
    o.mass.validate(interval);
    o.frequency.validate(interval);
    o.drive.validate(interval);
    for (std::size_t k = 0; k < 1024; ++k) {
      const double t = interval.begin + interval.length() * static_cast<double>(k) / 1023.0;
      if (!(o.mass.eval(t) > 0.0)) throw DomainError("mass must stay positive; fails at t = " + std::to_string(t));
    }
  }
  coupling.validate(interval);
}

TimeFunction effective_frequency_sq(const SystemSpec& spec, int j) {
  const auto& o = osc(spec, j);
  const TimeFunction mdot = derivative(o.mass);
  const TimeFunction mddot = derivative(mdot);
  const TimeFunction rate = mdot / o.mass;
  return o.frequency * o.frequency + 0.25 * (rate * rate - 2.0 * (mddot / o.mass));
}

TimeFunction scaled_coupling(const SystemSpec& spec) {
  return spec.coupling / sqrt(spec.oscillators[0].mass * spec.oscillators[1].mass);
}

TimeFunction mass_gauge_beta(const SystemSpec& spec, int j) {
  const auto& o = osc(spec, j);
  return -0.5 * (derivative(o.mass) / sqrt(o.mass));
}

double gamma_coefficient(const SystemSpec& spec, double alpha, double t) {
  const double w1 = effective_frequency_sq(spec, 0).eval(t);
  const double w2 = effective_frequency_sq(spec, 1).eval(t);
  const double kappa = scaled_coupling(spec).eval(t);
  return 0.5 * (w1 - w2) * std::sin(2 * alpha) + kappa * std::cos(2 * alpha);
}

std::vector<double> chebyshev_points(const Interval& interval, std::size_t n) {
  std::vector<double> ts(n);
  const double mid = 0.5 * (interval.begin + interval.end), half = 0.5 * interval.length();
  for (std::size_t k = 0; k < n; ++k) {
    const double x = -std::cos(kPi * static_cast<double>(k) / static_cast<double>(n - 1));
    ts[k] = mid + half * x;
  }
  ts.front() = interval.begin;
  ts.back() = interval.end;
  return ts;
}

DecoupledSystem decouple_with_angle(const SystemSpec& spec, double alpha, double tol) {
  const GammaSamples g = sample_gamma(spec);
  DecoupledSystem d;
  d.alpha = alpha;
  d.omega_tilde_sq = {effective_frequency_sq(spec, 0), effective_frequency_sq(spec, 1)};
  const TimeFunction kappa = scaled_coupling(spec);
  const double c = std::cos(alpha), s = std::sin(alpha);
  const double s2a = std::sin(2 * alpha);
  d.omega_sq[0] = (c * c) * d.omega_tilde_sq[0] + (s * s) * d.omega_tilde_sq[1] - s2a * kappa;
  d.omega_sq[1] = (s * s) * d.omega_tilde_sq[0] + (c * c) * d.omega_tilde_sq[1] + s2a * kappa;
  const auto& o1 = spec.oscillators[0];
  const auto& o2 = spec.oscillators[1];
  const TimeFunction g1 = sqrt(o1.mass) * o1.drive;
  const TimeFunction g2 = sqrt(o2.mass) * o2.drive;
  d.force[0] = c * g1 - s * g2;
  d.force[1] = s * g1 + c * g2;
  d.gamma_residual = g.sup_gamma(alpha);
  d.residual_scale = g.scale;
  d.accepted = d.gamma_residual <= tol * d.residual_scale;
  return d;
}

DecoupledSystem analyze_decoupling(const SystemSpec& spec, double tol) {
  const GammaSamples g = sample_gamma(spec);
  const bool uncoupled = std::all_of(g.kappa.begin(), g.kappa.end(), [](double k) { return k == 0.0; });
  bool degenerate = true;
  for (std::size_t k = 0; k < g.w1.size(); ++k) degenerate = degenerate && std::abs(g.w2[k] - g.w1[k]) < 1e-12;

  double alpha;
  if (uncoupled) {
    alpha = 0.0;
  } else if (degenerate) {
    alpha = kPi / 4;
  } else {
    constexpr int kCoarse = 1024;
    const double h = (kPi / 2) / kCoarse;
    double best = std::numeric_limits<double>::infinity();
    double best_alpha = 0.0;
    for (int k = 0; k < kCoarse; ++k) {
      const double a = -kPi / 4 + (k + 1) * h;
      const double v = g.sup_gamma(a);
      if (v < best) {
        best = v;
        best_alpha = a;
      }
    }
    // Golden-section refinement inside the neighbouring coarse cells.
    const double invphi = (std::sqrt(5.0) - 1) / 2;
    double lo = best_alpha - h, hi = best_alpha + h;
    double x1 = hi - invphi * (hi - lo), x2 = lo + invphi * (hi - lo);
    double f1 = g.sup_gamma(x1), f2 = g.sup_gamma(x2);
    for (int it = 0; it < 200 && hi - lo > 1e-16; ++it) {
      if (f1 < f2) {
        hi = x2;
        x2 = x1;
        f2 = f1;
        x1 = hi - invphi * (hi - lo);
        f1 = g.sup_gamma(x1);
      } else {
        lo = x1;
        x1 = x2;
        f1 = f2;
        x2 = lo + invphi * (hi - lo);
        f2 = g.sup_gamma(x2);
      }
    }
    const double refined = f1 < f2 ? x1 : x2;
    alpha = std::min(f1, f2) <= best ? refined : best_alpha;
    alpha = wrap_angle(alpha);
  }
  return decouple_with_angle(spec, alpha, tol);
}

DecoupledSystem find_decoupling_angle(const SystemSpec& spec, double tol) {
  DecoupledSystem d = analyze_decoupling(spec, tol);
  if (!d.accepted) throw NotDecouplable(d.gamma_residual, tol * d.residual_scale, d.alpha);
  return d;
}

Point2 normal_mode_coordinates(const SystemSpec& spec, double alpha, Point2 x, double t) {
  const double q1 = std::sqrt(spec.oscillators[0].mass.eval(t)) * x.x1;
  const double q2 = std::sqrt(spec.oscillators[1].mass.eval(t)) * x.x2;
  const double c = std::cos(alpha), s = std::sin(alpha);
  return {c * q1 - s * q2, s * q1 + c * q2};
}

Point2 lab_coordinates(const SystemSpec& spec, double alpha, Point2 q, double t) {
  const double c = std::cos(alpha), s = std::sin(alpha);
  const double q1 = c * q.x1 + s * q.x2;
  const double q2 = -s * q.x1 + c * q.x2;
  return {q1 / std::sqrt(spec.oscillators[0].mass.eval(t)), q2 / std::sqrt(spec.oscillators[1].mass.eval(t))};
}

TransformCoefficients transform_coefficients(const SystemSpec& spec, double alpha, const TimeFunction& beta1,
                                             const TimeFunction& beta2, double t) {
  const std::array<const TimeFunction*, 2> beta{&beta1, &beta2};
  std::array<double, 2> k{}, d{}, sqm{};
  for (std::size_t j = 0; j < 2; ++j) {
    const auto& o = spec.oscillators[j];
    const Taylor m = o.mass.taylor(t, 1);
    const Taylor b = beta[j]->taylor(t, 1);
    const double mass = m.c[0], mdot = m.c[1];
    const double w = o.frequency.eval(t);
    sqm[j] = std::sqrt(mass);
    k[j] = b.c[0] / sqm[j] + mdot / (2 * mass);
    // d/dt (sqrt(m) beta) = mdot beta / (2 sqrt(m)) + sqrt(m) betadot
    const double d_sqm_beta = mdot * b.c[0] / (2 * sqm[j]) + sqm[j] * b.c[1];
    d[j] = w * w + b.c[0] * b.c[0] / mass + d_sqm_beta / mass;
  }
  const double lam = spec.coupling.eval(t) / (sqm[0] * sqm[1]);
  const double c = std::cos(alpha), s = std::sin(alpha);
  const double f1 = sqm[0] * spec.oscillators[0].drive.eval(t);
  const double f2 = sqm[1] * spec.oscillators[1].drive.eval(t);
  TransformCoefficients r;
  r.d1 = d[0];
  r.d2 = d[1];
  r.A = k[0] * c * c + k[1] * s * s;
  r.B = k[0] * s * s + k[1] * c * c;
  r.C = (k[0] - k[1]) * s * c;
  r.D1 = d[0] * c * c + d[1] * s * s - 2 * lam * s * c;
  r.D2 = d[0] * s * s + d[1] * c * c + 2 * lam * s * c;
  r.E = (d[0] - d[1]) * s * c + lam * (c * c - s * s);
  r.F1 = f1 * c - f2 * s;
  r.F2 = f1 * s + f2 * c;
  return r;
}

}  // namespace tdho
