#include <doctest.h>

#include <cmath>
#include <numbers>

#include <Eigen/Eigenvalues>

#include "tdho/errors.hpp"
#include "tdho/system.hpp"
#include "tdho/verify.hpp"

using namespace tdho;

namespace {

SystemSpec make(TimeFunction m1, TimeFunction w1, TimeFunction m2, TimeFunction w2, TimeFunction lambda,
                Interval iv = {0.0, 2.0}) {
  SystemSpec s;
  s.oscillators[0] = {std::move(m1), std::move(w1), 0.0};
  s.oscillators[1] = {std::move(m2), std::move(w2), 0.0};
  s.coupling = std::move(lambda);
  s.interval = iv;
  return s;
}

}  // namespace

TEST_CASE("effective frequency") {
  const SystemSpec constant = make(2.0, 1.5, 1.0, 1.0, 0.0);
  CHECK(effective_frequency_sq(constant, 0).eval(0.7) == doctest::Approx(2.25).epsilon(1e-15));

  const double g = 0.1;
  const SystemSpec expo = make(parse("3*exp(0.1*t)"), 2.0, 1.0, 1.0, 0.0);
  CHECK(effective_frequency_sq(expo, 0).eval(1.1) == doctest::Approx(4.0 - g * g / 4).epsilon(1e-14));

  const SystemSpec quad = make(parse("1 + 0.1*t^2"), 1.0, 1.0, 1.0, 0.0);
  CHECK(effective_frequency_sq(quad, 0).eval(0.0) == doctest::Approx(0.9).epsilon(1e-14));
}

TEST_CASE("uncoupled system needs no rotation") {
  SystemSpec s = make(parse("1 + 0.2*t"), 1.0, 2.0, 1.5, 0.0);
  s.oscillators[0].drive = parse("0.3*cos(t)");
  const DecoupledSystem d = find_decoupling_angle(s);
  CHECK(d.alpha == 0.0);
  CHECK(d.gamma_residual == 0.0);
  for (double t : {0.0, 0.8, 2.0}) {
    CHECK(d.omega_sq[0].eval(t) == doctest::Approx(effective_frequency_sq(s, 0).eval(t)).epsilon(1e-14));
    CHECK(d.force[0].eval(t) == doctest::Approx(std::sqrt(1 + 0.2 * t) * 0.3 * std::cos(t)).epsilon(1e-14));
  }
}

TEST_CASE("identical oscillators rotate by pi/4") {
  const SystemSpec s = make(1.0, 1.3, 1.0, 1.3, parse("0.2 + 0.1*sin(t)"));
  const DecoupledSystem d = find_decoupling_angle(s);
  CHECK(std::abs(d.alpha) == doctest::Approx(std::numbers::pi / 4).epsilon(1e-12));
  const double t = 0.6, lam = 0.2 + 0.1 * std::sin(t);
  const double lo = std::min(d.omega_sq[0].eval(t), d.omega_sq[1].eval(t));
  const double hi = std::max(d.omega_sq[0].eval(t), d.omega_sq[1].eval(t));
  CHECK(lo == doctest::Approx(1.69 - lam).epsilon(1e-12));
  CHECK(hi == doctest::Approx(1.69 + lam).epsilon(1e-12));
}

TEST_CASE("constant coupling matches a 2x2 eigendecomposition") {
  const SystemSpec s = make(1.0, 1.0, 1.0, 2.0, 1.5);
  const DecoupledSystem d = find_decoupling_angle(s);
  CHECK(d.alpha == doctest::Approx(std::numbers::pi / 8).epsilon(1e-10));
  Eigen::Matrix2d a;
  a << 1.0, 1.5, 1.5, 4.0;
  const Eigen::Vector2d ev = Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d>(a).eigenvalues();
  const double o1 = d.omega_sq[0].eval(1.0), o2 = d.omega_sq[1].eval(1.0);
  CHECK(std::min(o1, o2) == doctest::Approx(ev(0)).epsilon(1e-12));
  CHECK(std::max(o1, o2) == doctest::Approx(ev(1)).epsilon(1e-12));
  CHECK(std::min(o1, o2) == doctest::Approx(0.3787).epsilon(1e-4));
  CHECK(o1 + o2 == doctest::Approx(5.0).epsilon(1e-12));
  CHECK(o1 * o2 == doctest::Approx(1.75).epsilon(1e-12));
}

TEST_CASE("rotation preserves trace and determinant") {
  const SystemSpec s = reference::exponential_mass_system();
  const DecoupledSystem d = find_decoupling_angle(s);
  for (double t : chebyshev_points(s.interval, 17)) {
    const double w1 = effective_frequency_sq(s, 0).eval(t), w2 = effective_frequency_sq(s, 1).eval(t);
    const double k = scaled_coupling(s).eval(t);
    const double o1 = d.omega_sq[0].eval(t), o2 = d.omega_sq[1].eval(t);
    CHECK(o1 + o2 == doctest::Approx(w1 + w2).epsilon(1e-12));
    CHECK(o1 * o2 == doctest::Approx(w1 * w2 - k * k).epsilon(1e-10));
    const double f1 = d.force[0].eval(t), f2 = d.force[1].eval(t);
    const double lab = s.oscillators[0].mass.eval(t) * std::pow(s.oscillators[0].drive.eval(t), 2);
    CHECK(f1 * f1 + f2 * f2 == doctest::Approx(lab).epsilon(1e-12));
  }
  CHECK(d.gamma_residual <= kDefaultDecouplingTolerance * d.residual_scale);
}

TEST_CASE("decoupling angle is invariant under a common scale") {
  const SystemSpec a = make(1.0, 1.0, 1.0, 2.0, 1.5);
  const SystemSpec b = make(1.0, 3.0, 1.0, 6.0, 13.5);
  CHECK(find_decoupling_angle(a).alpha == doctest::Approx(find_decoupling_angle(b).alpha).epsilon(1e-9));
}

TEST_CASE("time-dependent ratio is not decouplable") {
  const SystemSpec s = reference::sinusoidal_coupling_system();
  CHECK_THROWS_AS(find_decoupling_angle(s), NotDecouplable);
  const DecoupledSystem d = analyze_decoupling(s);
  CHECK_FALSE(d.accepted);
  CHECK(d.gamma_residual > 1e-3);
}

TEST_CASE("normal-mode coordinates") {
  const SystemSpec unit = make(1.0, 1.0, 1.0, 1.0, 0.0);
  const Point2 q0 = normal_mode_coordinates(unit, 0.0, {0.3, -0.7}, 0.0);
  CHECK(q0.x1 == 0.3);
  CHECK(q0.x2 == -0.7);
  const Point2 q = normal_mode_coordinates(unit, std::numbers::pi / 2, {1.0, 0.0}, 0.0);
  CHECK(std::abs(q.x1) <= 1e-15);
  CHECK(q.x2 == doctest::Approx(1.0));
  const SystemSpec heavy = make(4.0, 1.0, 1.0, 1.0, 0.0);
  CHECK(normal_mode_coordinates(heavy, 0.0, {1.0, 0.0}, 0.0).x1 == doctest::Approx(2.0));

  const SystemSpec s = reference::exponential_mass_system();
  const Point2 x{0.4, -1.2};
  const Point2 back = lab_coordinates(s, 0.3, normal_mode_coordinates(s, 0.3, x, 1.1), 1.1);
  CHECK(back.x1 == doctest::Approx(x.x1).epsilon(1e-14));
  CHECK(back.x2 == doctest::Approx(x.x2).epsilon(1e-14));
}

TEST_CASE("transform coefficients") {
  const SystemSpec s = reference::exponential_mass_system();
  const TimeFunction b1 = mass_gauge_beta(s, 0), b2 = mass_gauge_beta(s, 1);
  const DecoupledSystem d = find_decoupling_angle(s);
  for (double t : {0.0, 0.5, 1.7}) {
    for (double alpha : {0.0, 0.2, d.alpha}) {
      const TransformCoefficients c = transform_coefficients(s, alpha, b1, b2, t);
      CHECK(std::abs(c.A) <= 1e-14);
      CHECK(std::abs(c.B) <= 1e-14);
      CHECK(std::abs(c.C) <= 1e-14);
      const double k = scaled_coupling(s).eval(t);
      CHECK(c.D1 + c.D2 == doctest::Approx(c.d1 + c.d2).epsilon(1e-12));
      CHECK(c.D1 * c.D2 - c.E * c.E == doctest::Approx(c.d1 * c.d2 - k * k).epsilon(1e-12));
      CHECK(c.E == doctest::Approx(gamma_coefficient(s, alpha, t)).epsilon(1e-12));
    }
    CHECK(std::abs(transform_coefficients(s, d.alpha, b1, b2, t).E) <= 1e-9);
  }

  const SystemSpec c = make(1.0, 1.2, 2.0, 0.7, 0.1);
  const TransformCoefficients z = transform_coefficients(c, 0.0, 0.0, 0.0, 0.4);
  CHECK(z.A == 0.0);
  CHECK(z.d1 == doctest::Approx(1.44));
  CHECK(z.d2 == doctest::Approx(0.49));
}

TEST_CASE("validation") {
  SystemSpec s = make(parse("1 - t"), 1.0, 1.0, 1.0, 0.0, {0.0, 2.0});
  CHECK_THROWS_AS(s.validate(), DomainError);
  s = make(1.0, 1.0, 1.0, 1.0, 0.0, {1.0, 1.0});
  CHECK_THROWS_AS(s.validate(), InputError);
  s = make(1.0, 1.0, 1.0, 1.0, 0.0);
  s.hbar = 0.0;
  CHECK_THROWS_AS(s.validate(), InputError);
}
