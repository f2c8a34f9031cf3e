#include <doctest.h>

#include <cmath>
#include <complex>
#include <numbers>

#include <Eigen/LU>

#include "tdho/errors.hpp"
#include "tdho/kernel.hpp"
#include "tdho/oracle.hpp"
#include "tdho/van_vleck.hpp"
#include "tdho/verify.hpp"

using namespace tdho;
using Cd = std::complex<double>;

namespace {

constexpr double kPi = std::numbers::pi;

SystemSpec free_pair(double T) {
  SystemSpec s = reference::oscillator_pair(0.0, 0.0, {0.0, T});
  return s;
}

// Freely spreading Gaussian with zero initial momentum, hbar = m = 1.
Cd free_gaussian(double x, double c, double s, double p, double t) {
  const Cd st = s * (1.0 + Cd(0.0, t / (2 * s * s)));
  const double xc = x - c - p * t;
  return std::pow(2 * kPi * st * st, -0.25) * std::exp(-xc * xc / (4.0 * s * st)) *
         std::exp(Cd(0.0, p * (x - c) - p * p * t / 2)) * std::exp(Cd(0.0, p * c));
}

}  // namespace

TEST_CASE("Gaussian is normalized") {
  const Wavefunction2D g = gaussian({128, 128, 10.0, 10.0}, {{0.5, -1.0}, {0.8, 1.2}, {0.3, 0.0}});
  CHECK(g.norm() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("split-step reproduces free spreading") {
  const Grid2D grid{256, 256, 16.0, 16.0};
  const GaussianParams p{{0.5, -0.3}, {0.8, 1.0}, {0.0, 0.0}};
  const Wavefunction2D psi0 = gaussian(grid, p);
  const Wavefunction2D out = split_step_evolve(psi0, free_pair(1.0), 1.0);
  Wavefunction2D exact = psi0;
  for (std::size_t i = 0; i < grid.n1; ++i)
    for (std::size_t j = 0; j < grid.n2; ++j)
      exact.at(i, j) = free_gaussian(grid.x1(i), 0.5, 0.8, 0.0, 1.0) * free_gaussian(grid.x2(j), -0.3, 1.0, 0.0, 1.0);
  const Cd phase = overlap(exact, out);
  CHECK(std::abs(std::arg(phase)) <= 1e-8);
  CHECK(l2_distance(out, exact) <= 1e-8);
}

TEST_CASE("coherent state revives after one period") {
  const Grid2D grid{128, 128, 10.0, 10.0};
  const SystemSpec sho = reference::oscillator_pair(1.0, 1.0, {0.0, 2 * kPi});
  const Wavefunction2D psi0 = gaussian(grid, {{1.5, -1.0}, {std::sqrt(0.5), std::sqrt(0.5)}, {0.0, 0.5}});
  SplitStepReport report;
  const Wavefunction2D out = split_step_evolve(psi0, sho, 2 * kPi, {}, &report);
  const Cd ov = overlap(psi0, out);
  CHECK(std::norm(ov) >= 1 - 1e-8);
  // ground-energy phase of two modes: exp(-i 2 * omega T / 2) = exp(-2 pi i)
  CHECK(std::abs(std::arg(ov)) <= 1e-4);
  CHECK(report.steps >= 6000);
  CHECK(std::abs(report.norm_drift) <= 1e-10);
  CHECK(std::abs(out.norm() - 1.0) <= 1e-10);
}

TEST_CASE("split-step converges at second order in dt") {
  const Grid2D grid{64, 64, 8.0, 8.0};
  SystemSpec s = reference::oscillator_pair(1.0, 1.4, {0.0, 1.0});
  s.coupling = parse("0.3*sin(t)");
  s.oscillators[0].mass = parse("1 + 0.2*t");
  s.oscillators[0].drive = parse("0.5*cos(t)");
  const Wavefunction2D psi0 = gaussian(grid, {{0.5, 0.0}, {0.7, 0.6}, {0.0, 0.2}});
  auto run = [&](double dt) {
    SplitStepOptions o;
    o.dt = dt;
    return split_step_evolve(psi0, s, 1.0, o);
  };
  const Wavefunction2D a = run(0.02), b = run(0.01), c = run(0.005);
  const double ratio = l2_distance(a, b) / l2_distance(b, c);
  CHECK(ratio >= 3.5);
  CHECK(ratio <= 4.5);
}

TEST_CASE("grid edge is detected") {
  const Grid2D grid{64, 64, 4.0, 4.0};
  const Wavefunction2D psi0 = gaussian(grid, {{0.0, 0.0}, {0.5, 0.5}, {6.0, 0.0}});
  CHECK_THROWS_AS(split_step_evolve(psi0, free_pair(2.0), 2.0), GridTooCoarse);
}

TEST_CASE("Van Vleck propagator") {
  SUBCASE("free particle") {
    const double T = 1.7;
    const VanVleckPropagator vv(LinearHamiltonian::single_mode(0.0, 0.0), 0.0, T);
    const Cd ref = std::sqrt(1.0 / Cd(0.0, 2 * kPi * T)) * std::polar(1.0, 0.09 / (2 * T));
    CHECK(std::abs(vv(0.4, 0.1) - ref) / std::abs(ref) <= 1e-10);
  }
  SUBCASE("oscillator equals Mehler") {
    const double T = 0.9;
    const VanVleckPropagator vv(LinearHamiltonian::single_mode(1.0, 0.0), 0.0, T);
    const double a = 0.6, b = -0.8;
    const Cd ref = std::sqrt(1.0 / (Cd(0.0, 2 * kPi) * std::sin(T))) *
                   std::polar(1.0, ((a * a + b * b) * std::cos(T) - 2 * a * b) / (2 * std::sin(T)));
    CHECK(std::abs(vv(a, b) - ref) / std::abs(ref) <= 1e-10);
  }
  SUBCASE("prefactor equals the monodromy determinant") {
    const SystemSpec spec = reference::exponential_mass_system();
    const VanVleckPropagator vv(LinearHamiltonian::from_system(spec), 0.0, 2.0);
    const ClassicalTrajectory c = vv.trajectory(Eigen::Vector2d(0.4, -0.2), Eigen::Vector2d(-0.1, 0.6));
    CHECK(c.boundary_residual <= 1e-10);
    const double expected = 1.0 / (2 * kPi * std::sqrt(std::abs(c.monodromy_xp.determinant())));
    CHECK(std::abs(vv.amplitude()) == doctest::Approx(expected).epsilon(1e-8));
    const DecoupledSystem dec = find_decoupling_angle(spec);
    const SystemKernel k(spec, dec, solve_modes(dec, spec.interval));
    CHECK(std::abs(k({0.4, -0.2}, {-0.1, 0.6}).value) == doctest::Approx(expected).epsilon(1e-8));
  }
  SUBCASE("classical action is stationary") {
    const SystemSpec spec = reference::exponential_mass_system();
    const VanVleckPropagator vv(LinearHamiltonian::from_system(spec), 0.0, 2.0);
    const Eigen::Vector2d xi(0.3, -0.5), xf(-0.2, 0.4);
    const ClassicalTrajectory c = vv.trajectory(xf, xi);
    auto path = [&](double eps) {
      auto x = [&, eps](double t) {
        const Eigen::VectorXd z = vv.phase_point(xi, c.p_initial, t);
        Eigen::VectorXd q = z.head(2);
        q(0) += eps * std::sin(kPi * t / 2);
        q(1) += eps * std::sin(kPi * t);
        return q;
      };
      auto v = [&, eps](double t) {
        const Eigen::VectorXd z = vv.phase_point(xi, c.p_initial, t);
        Eigen::VectorXd m(2);
        m << spec.oscillators[0].mass.eval(t), spec.oscillators[1].mass.eval(t);
        Eigen::VectorXd q = z.tail(2).cwiseQuotient(m);
        q(0) += eps * (kPi / 2) * std::cos(kPi * t / 2);
        q(1) += eps * kPi * std::cos(kPi * t);
        return q;
      };
      return vv.lagrangian_action(x, v);
    };
    const double s0 = path(0.0);
    CHECK(s0 == doctest::Approx(c.action).epsilon(1e-10));
    const double h = 1e-3;
    const double slope = (path(h) - path(-h)) / (2 * h);
    CHECK(std::abs(slope) <= 1e-6);
  }
}

TEST_CASE("kernel quadrature") {
  SUBCASE("short-time limit approaches the identity") {
    const Grid2D grid{32, 32, 2.0, 2.0};
    const Wavefunction2D psi0 = gaussian(grid, {{0.1, -0.1}, {0.25, 0.25}, {0.0, 0.0}});
    std::vector<double> dev;
    for (double T : {0.04, 0.02}) {
      const SystemSpec sho = reference::oscillator_pair(1.0, 1.0, {0.0, T});
      const DecoupledSystem dec = find_decoupling_angle(sho);
      const SystemKernel k(sho, dec, solve_modes(dec, sho.interval));
      const Wavefunction2D out = propagate_with_kernel(psi0, k.quadratic_form(), T);
      SplitStepOptions o;
      o.dt = T / 200;
      CHECK(l2_distance(out, split_step_evolve(psi0, sho, T, o)) <= 1e-6);
      dev.push_back(l2_distance(out, psi0));
    }
    CHECK(dev[0] / dev[1] == doctest::Approx(2.0).epsilon(0.05));
  }
  SUBCASE("an unresolvable kernel phase is refused") {
    const Grid2D grid{128, 128, 8.0, 8.0};
    const Wavefunction2D psi0 = gaussian(grid, {{0.5, -0.5}, {1.0, 1.0}, {0.0, 0.0}});
    const SystemSpec sho = reference::oscillator_pair(1.0, 1.0, {0.0, 1e-3});
    const DecoupledSystem dec = find_decoupling_angle(sho);
    const SystemKernel k(sho, dec, solve_modes(dec, sho.interval));
    CHECK_THROWS_AS(propagate_with_kernel(psi0, k.quadratic_form(), 1e-3), NumericalError);
  }
  SUBCASE("agrees with split-step on a driven coupled system") {
    SystemSpec s = reference::oscillator_pair(1.0, 1.4, {0.0, 1.5});
    s.coupling = 0.3;
    s.oscillators[0].drive = parse("0.5*cos(t)");
    const Grid2D grid{128, 128, 8.0, 8.0};
    const Wavefunction2D psi0 = gaussian(grid, {{0.5, 0.0}, {0.7, 0.6}, {0.0, 0.2}});
    const DecoupledSystem dec = find_decoupling_angle(s);
    const SystemKernel k(s, dec, solve_modes(dec, s.interval));
    const Wavefunction2D a = propagate_with_kernel(psi0, k.quadratic_form(), 1.5);
    const Wavefunction2D b = split_step_evolve(psi0, s, 1.5);
    CHECK(l2_distance(a, b) <= 1e-5);
    CHECK(a.norm() == doctest::Approx(1.0).epsilon(1e-6));
  }
  SUBCASE("tabulated and quadratic kernels agree") {
    const SystemSpec s = reference::oscillator_pair(1.0, 1.2, {0.0, 0.8});
    const Grid2D grid{16, 16, 4.0, 4.0};
    const Wavefunction2D psi0 = gaussian(grid, {{0.2, -0.1}, {0.8, 0.8}, {0.0, 0.0}});
    const DecoupledSystem dec = find_decoupling_angle(s);
    const auto sols = solve_modes(dec, s.interval);
    std::vector<double> ax;
    for (std::size_t i = 0; i < grid.n1; ++i) ax.push_back(grid.x1(i));
    const KernelGrid kg = kernel_grid(s, dec, sols, {ax, ax, ax, ax});
    const Wavefunction2D a = propagate_with_kernel(psi0, kg, 0.8);
    // Same trapezoid sum with the closed-form quadratic kernel on a coarse grid.
    const QuadraticKernel q = SystemKernel(s, dec, sols).quadratic_form();
    double worst = 0.0;
    for (std::size_t i = 0; i < grid.n1; ++i)
      for (std::size_t j = 0; j < grid.n2; ++j) {
        Cd sum = 0.0;
        for (std::size_t c = 0; c < grid.n1; ++c)
          for (std::size_t d = 0; d < grid.n2; ++d)
            sum += q({grid.x1(i), grid.x2(j)}, {grid.x1(c), grid.x2(d)}) * psi0.at(c, d);
        sum *= grid.dx1() * grid.dx2();
        worst = std::max(worst, std::abs(sum - a.at(i, j)));
      }
    CHECK(worst <= 1e-12);
  }
  SUBCASE("mismatched tabulated extent is rejected") {
    const SystemSpec s = reference::oscillator_pair(1.0, 1.2, {0.0, 0.8});
    const DecoupledSystem dec = find_decoupling_angle(s);
    const auto sols = solve_modes(dec, s.interval);
    const KernelGrid kg = kernel_grid(s, dec, sols, {{0.0}, {0.0}, {0.0, 1.0}, {0.0, 1.0}});
    const Wavefunction2D psi0 = gaussian({4, 4, 2.0, 2.0}, {});
    CHECK_THROWS_AS(propagate_with_kernel(psi0, kg, 0.8), InputError);
  }
}
