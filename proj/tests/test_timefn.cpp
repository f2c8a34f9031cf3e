#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>

#include "tdho/errors.hpp"
#include "tdho/timefn.hpp"

using namespace tdho;

TEST_CASE("parse builds the expected nodes") {
  const TimeFunction one = parse("1.0");
  REQUIRE(std::holds_alternative<node::Constant>(one.node()));
  CHECK(std::get<node::Constant>(one.node()).value == 1.0);

  const TimeFunction m = parse("2*exp(0.1*t)");
  REQUIRE(std::holds_alternative<node::Scale>(m.node()));
  const auto& scale = std::get<node::Scale>(m.node());
  CHECK(scale.factor == 2.0);
  REQUIRE(std::holds_alternative<node::Exponential>(scale.arg->node()));
  CHECK(std::get<node::Exponential>(scale.arg->node()).amplitude == 1.0);
  CHECK(std::get<node::Exponential>(scale.arg->node()).rate == doctest::Approx(0.1));

  const TimeFunction w = parse("1 + 0.3*sin(2*t)");
  REQUIRE(std::holds_alternative<node::Sum>(w.node()));
  const auto& sum = std::get<node::Sum>(w.node());
  CHECK(std::holds_alternative<node::Constant>(sum.lhs->node()));
  const TimeFunction& rhs = *sum.rhs;
  const node::Sinusoid* s = std::get_if<node::Sinusoid>(&rhs.node());
  if (!s && std::holds_alternative<node::Scale>(rhs.node()))
    s = std::get_if<node::Sinusoid>(&std::get<node::Scale>(rhs.node()).arg->node());
  REQUIRE(s != nullptr);
  CHECK(s->angular_frequency == 2.0);
  CHECK(s->phase == 0.0);
  CHECK(w.eval(0.7) == doctest::Approx(1 + 0.3 * std::sin(1.4)).epsilon(1e-15));
}

TEST_CASE("parse rejects malformed input with a position") {
  CHECK_THROWS_AS(parse("exp("), ParseError);
  CHECK_THROWS_AS(parse("2*x"), ParseError);
  CHECK_THROWS_AS(parse("1 +"), ParseError);
  CHECK_THROWS_AS(parse(""), ParseError);
  try {
    parse("1 + y");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.position() == 4);
  }
}

TEST_CASE("analytic values and derivatives") {
  const TimeFunction e = node::Exponential{1.0, 0.1};
  CHECK(e.eval(0.0) == 1.0);
  const double m = 3.0, g = 0.1, t = 1.3;
  const TimeFunction me = node::Exponential{m, g};
  CHECK(me.deriv2(t) == doctest::Approx(g * g * m * std::exp(g * t)).epsilon(1e-14));

  const TimeFunction f = parse("(1 + t^2) / (2 + cos(t)) * exp(sin(t))");
  const double h = 1e-4;
  const double fd1 = (f.eval(t + h) - f.eval(t - h)) / (2 * h);
  const double fd2 = (f.eval(t + h) - 2 * f.eval(t) + f.eval(t - h)) / (h * h);
  CHECK(f.deriv1(t) == doctest::Approx(fd1).epsilon(1e-7));
  CHECK(f.deriv2(t) == doctest::Approx(fd2).epsilon(1e-5));
}

TEST_CASE("tabulated t^2 derivative") {
  std::vector<double> ts, vs;
  for (int k = 0; k <= 200; ++k) {
    ts.push_back(0.01 * k);
    vs.push_back(ts.back() * ts.back());
  }
  const TimeFunction f = tabulated(ts, vs);
  CHECK(std::abs(f.deriv1(1.0) - 2.0) <= 1e-3);
  CHECK(std::abs(f.deriv2(1.0) - 2.0) <= 1e-2);
  CHECK(f.eval(1.005) == doctest::Approx(1.005 * 1.005).epsilon(1e-4));
  CHECK_THROWS_AS(tabulated({0.0, 1.0, 1.0}, {0.0, 1.0, 2.0}), InputError);
  CHECK_THROWS_AS(f.validate({0.0, 3.0}), DomainError);
}

TEST_CASE("tabulated CSV round trip") {
  const auto path = std::filesystem::temp_directory_path() / "tdho_test_tab.csv";
  {
    std::ofstream out(path);
    out << "t,value\n";
    for (int k = 0; k <= 100; ++k) out << 0.02 * k << ',' << std::sin(0.02 * k) << '\n';
  }
  const TimeFunction f = read_tabulated_csv(path);
  CHECK(f.eval(1.0) == doctest::Approx(std::sin(1.0)).epsilon(1e-5));
  CHECK(f.deriv1(1.0) == doctest::Approx(std::cos(1.0)).epsilon(1e-5));
  std::filesystem::remove(path);
  CHECK_THROWS_AS(read_tabulated_csv(path), InputError);
}

TEST_CASE("central differences converge at second order for parametric nodes") {
  const std::vector<TimeFunction> fs = {parse("2*exp(0.3*t)"), parse("1 + 0.5*t - 0.2*t^3"),
                                        parse("0.7*sin(1.3*t + 0.2)"), parse("exp(0.1*t) * (1 + 0.3*cos(2*t))"),
                                        parse("pow(1 + t^2, 0.5)"), parse("1 / (2 + sin(t))")};
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (const auto& f : fs) {
    for (int k = 0; k < 5; ++k) {
      const double t = u(rng);
      const double h = 1e-2;
      auto err = [&](double step) {
        return std::abs((f.eval(t + step) - f.eval(t - step)) / (2 * step) - f.deriv1(t));
      };
      const double ratio = err(h) / err(h / 2);
      if (err(h) < 1e-12) continue;  // locally linear
      CHECK(ratio == doctest::Approx(4.0).epsilon(0.1));
    }
  }
}

TEST_CASE("sum, product and scale follow linearity and the product rule") {
  const TimeFunction a = parse("0.4*sin(3*t)"), b = parse("exp(-0.2*t)");
  const double t = 0.37;
  const TimeFunction s = a + b, p = a * b, c = 2.5 * a;
  CHECK(std::abs(s.deriv1(t) - (a.deriv1(t) + b.deriv1(t))) <= 1e-14);
  CHECK(std::abs(s.deriv2(t) - (a.deriv2(t) + b.deriv2(t))) <= 1e-14);
  CHECK(std::abs(p.deriv1(t) - (a.deriv1(t) * b.eval(t) + a.eval(t) * b.deriv1(t))) <= 1e-14);
  CHECK(std::abs(p.deriv2(t) - (a.deriv2(t) * b.eval(t) + 2 * a.deriv1(t) * b.deriv1(t) + a.eval(t) * b.deriv2(t))) <=
        1e-14);
  CHECK(std::abs(c.deriv2(t) - 2.5 * a.deriv2(t)) <= 1e-14);
}

TEST_CASE("division by a function that changes sign is rejected") {
  const TimeFunction f = parse("1 / sin(t)");
  CHECK_THROWS_AS(f.validate({0.5, 4.0}), DomainError);
  CHECK_NOTHROW(f.validate({0.5, 3.0}));
}

TEST_CASE("evaluation is deterministic") {
  const TimeFunction f = parse("2*exp(0.1*t) + 0.3*sin(2*t + 0.5) + t^2");
  CHECK(f.eval(0.123456789) == f.eval(0.123456789));
  CHECK(parse(f.print()).eval(0.9) == doctest::Approx(f.eval(0.9)).epsilon(1e-15));
}
