#include <doctest.h>

#include <cmath>
#include <complex>
#include <numbers>
#include <random>

#include "tdho/errors.hpp"
#include "tdho/kernel.hpp"
#include "tdho/van_vleck.hpp"
#include "tdho/verify.hpp"

using namespace tdho;
using Cd = std::complex<double>;

namespace {

constexpr double kPi = std::numbers::pi;

double rel(Cd a, Cd b) { return std::abs(a - b) / std::abs(b); }

// Brute-force 2-D trapezoid of sin(T - t) (int_0^t sin(tau) dtau) over 0 <= t <= T.
double trapezoid_i3(double T, int n) {
  const double h = T / n;
  double total = 0.0;
  for (int i = 0; i <= n; ++i) {
    const double t = i * h;
    double inner = 0.0;
    for (int j = 0; j <= i; ++j) inner += (j == 0 || j == i ? 0.5 : 1.0) * std::sin(j * h);
    inner *= h;
    total += (i == 0 || i == n ? 0.5 : 1.0) * std::sin(T - t) * inner;
  }
  return total * h;
}

}  // namespace

TEST_CASE("drive integrals") {
  const ErmakovSolution s = solve_ermakov(1.0, 1.0, {0.0, kPi});
  const DriveIntegrals zero = drive_integrals(s, 0.0);
  CHECK(zero.i1 == 0.0);
  CHECK(zero.i2 == 0.0);
  CHECK(zero.i3 == 0.0);
  const DriveIntegrals d = drive_integrals(s, 1.0);
  CHECK(d.i1 == doctest::Approx(2.0).epsilon(1e-10));
  CHECK(d.i2 == doctest::Approx(2.0).epsilon(1e-10));
  CHECK(d.i3 == doctest::Approx(2.0).epsilon(1e-10));
  CHECK(d.i3 == doctest::Approx(trapezoid_i3(kPi, 2000)).epsilon(1e-5));
}

TEST_CASE("Mehler values at T = pi/2") {
  const ErmakovSolution s = solve_ermakov(1.0, 1.0, {0.0, kPi / 2});
  const ModeKernel k(s, 0.0, 1.0);
  const Cd expected = std::polar(1.0 / std::sqrt(2 * kPi), -kPi / 4);
  CHECK(rel(k(0.0, 0.0).value, expected) <= 1e-12);
  CHECK(rel(k(1.0, 0.0).value, expected) <= 1e-12);
}

TEST_CASE("caustics are reported") {
  const ErmakovSolution s = solve_ermakov(1.0, 1.0, {0.0, kPi});
  const ModeKernel k(s, 0.0, 1.0);
  CHECK(k.caustic());
  CHECK_THROWS_AS(k(0.3, 0.1), Caustic);
}

TEST_CASE("Maslov index beyond the first focal point") {
  const ErmakovSolution s = solve_ermakov(1.0, 1.0, {0.0, 3.5});
  const ModeKernel k(s, 0.0, 1.0);
  CHECK(k.maslov_index() == 1);
  const VanVleckPropagator vv(LinearHamiltonian::single_mode(1.0, 0.0), 0.0, 3.5);
  CHECK(vv.maslov_index() == 1);
  CHECK(rel(k(0.4, -0.3).value, vv(0.4, -0.3)) <= 1e-9);
}

TEST_CASE("mode kernel is gauge invariant") {
  const TimeFunction w2 = parse("1 + 0.4*sin(t)"), f = parse("0.5*cos(2*t)");
  const Interval iv{0.0, 2.2};
  const ModeKernel a(solve_ermakov(w2, 1.0, iv), f, 1.0), b(solve_ermakov(w2, 0.37, iv), f, 1.0);
  for (auto [x, y] : {std::pair{0.1, 0.2}, {-1.3, 0.8}, {2.0, -2.0}}) CHECK(rel(b(x, y).value, a(x, y).value) <= 1e-9);
}

TEST_CASE("hbar scaling") {
  const ErmakovSolution s = solve_ermakov(1.0, 1.0, {0.0, 1.0});
  const ModeKernel k1(s, parse("sin(t)"), 1.0), k2(s, parse("sin(t)"), 0.5);
  CHECK(k2.magnitude() == doctest::Approx(k1.magnitude() * std::sqrt(2.0)).epsilon(1e-12));
  CHECK(k2.action_phase(0.3, 0.1) == doctest::Approx(2 * k1.action_phase(0.3, 0.1)).epsilon(1e-12));
}

TEST_CASE("uncoupled unit oscillators give a product of Mehler kernels") {
  const SystemSpec spec = reference::oscillator_pair(1.0, 1.0, {0.0, 1.2});
  const DecoupledSystem dec = find_decoupling_angle(spec);
  const auto sols = solve_modes(dec, spec.interval);
  const Point2 xf{0.3, -0.4}, xi{1.1, 0.2};
  const double T = 1.2;
  auto mehler = [&](double a, double b) {
    return std::sqrt(1.0 / (Cd(0.0, 2 * kPi) * std::sin(T))) *
           std::polar(1.0, ((a * a + b * b) * std::cos(T) - 2 * a * b) / (2 * std::sin(T)));
  };
  CHECK(rel(full_kernel(spec, dec, sols, xf, xi).value, mehler(xf.x1, xi.x1) * mehler(xf.x2, xi.x2)) <= 1e-10);
}

TEST_CASE("exponential-mass closed form") {
  const SystemSpec spec = reference::exponential_mass_system();
  const DecoupledSystem dec = find_decoupling_angle(spec);
  const auto sols = solve_modes(dec, spec.interval);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int i = 0; i < 20; ++i) {
    const Point2 xf{u(rng), u(rng)}, xi{u(rng), u(rng)};
    CHECK(rel(exponential_mass_kernel(spec, dec, sols, xf, xi).value, full_kernel(spec, dec, sols, xf, xi).value) <=
          1e-12);
  }
}

TEST_CASE("full kernel matches the two-dimensional Van Vleck propagator") {
  const SystemSpec spec = reference::exponential_mass_system();
  const DecoupledSystem dec = find_decoupling_angle(spec);
  const SystemKernel k(spec, dec, solve_modes(dec, spec.interval));
  const VanVleckPropagator vv(LinearHamiltonian::from_system(spec), 0.0, 2.0);
  for (auto [xf, xi] : {std::pair{Point2{0.5, -0.2}, Point2{1.0, 0.3}}, {Point2{-1.4, 0.9}, Point2{0.2, -0.7}}})
    CHECK(rel(k(xf, xi).value, vv(xf, xi)) <= 1e-8);
}

TEST_CASE("time reversal gives the conjugate kernel") {
  const SystemSpec spec = reference::exponential_mass_system();
  const DecoupledSystem dec = find_decoupling_angle(spec);
  const SystemKernel fwd(spec, dec, solve_modes(dec, {0.0, 2.0}));
  const SystemKernel bwd(spec, dec, solve_modes(dec, {2.0, 0.0}));
  const Point2 a{0.7, -0.3}, b{-0.2, 1.1};
  CHECK(rel(fwd(a, b).value, std::conj(bwd(b, a).value)) <= 1e-9);
}

TEST_CASE("quadratic form reproduces the kernel") {
  const SystemSpec spec = reference::exponential_mass_system();
  const DecoupledSystem dec = find_decoupling_angle(spec);
  const SystemKernel k(spec, dec, solve_modes(dec, spec.interval));
  const QuadraticKernel q = k.quadratic_form();
  const Point2 xf{1.3, -0.6}, xi{-0.4, 0.9};
  CHECK(rel(q(xf, xi), k(xf, xi).value) <= 1e-11);
  CHECK((q.hessian - q.hessian.transpose()).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("kernel grid") {
  const SystemSpec spec = reference::oscillator_pair(1.0, 1.7, {0.0, 1.0});
  const DecoupledSystem dec = find_decoupling_angle(spec);
  const auto sols = solve_modes(dec, spec.interval);
  EndpointGrid one{{0.2}, {-0.1}, {0.5}, {0.3}};
  const KernelGrid single = kernel_grid(spec, dec, sols, one);
  REQUIRE(single.values.size() == 1);
  CHECK(single.values[0].value == full_kernel(spec, dec, sols, {0.2, -0.1}, {0.5, 0.3}).value);

  const std::vector<double> axis{-1.0, -0.25, 0.5, 1.5};
  const EndpointGrid sym{axis, axis, axis, axis};
  const KernelGrid g = kernel_grid(spec, dec, sols, sym);
  const std::size_t n = axis.size();
  auto at = [&](std::size_t a, std::size_t b, std::size_t c, std::size_t d) {
    return g.values[((a * n + b) * n + c) * n + d].value;
  };
  double worst = 0.0;
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b)
      for (std::size_t c = 0; c < n; ++c)
        for (std::size_t d = 0; d < n; ++d) worst = std::max(worst, rel(at(a, b, c, d), at(c, d, a, b)));
  CHECK(worst <= 1e-12);
}
