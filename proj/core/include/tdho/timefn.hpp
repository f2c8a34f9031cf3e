#pragma once

// Scalar functions of time used for the masses, frequencies, drives and the
// coupling of the oscillator pair.  A TimeFunction is an immutable expression
// tree; evaluation returns truncated Taylor coefficients so that first and
// second derivatives are exact for every parametric node.

#include <array>
#include <filesystem>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <type_traits>
#include <variant>
#include <vector>

namespace tdho {

struct Interval {
  double begin = 0.0;
  double end = 0.0;

  double length() const { return end - begin; }
  bool contains(double t) const;
};

/// Highest derivative order carried through a Taylor evaluation.
inline constexpr int kMaxTaylorOrder = 4;

/// Normalised Taylor coefficients c_k = f^(k)(t) / k!, k = 0..order.
struct Taylor {
  std::array<double, kMaxTaylorOrder + 1> c{};
  int order = 0;

  double derivative(int k) const;
};

class TimeFunction;

namespace node {

struct Constant {
  double value;
};

/// amplitude * exp(rate * t)
struct Exponential {
  double amplitude;
  double rate;
};

/// sum_k coefficients[k] * t^k
struct Polynomial {
  std::vector<double> coefficients;
};

/// amplitude * sin(angular_frequency * t + phase)
struct Sinusoid {
  double amplitude;
  double angular_frequency;
  double phase;
};

/// Samples (t_k, f_k) with strictly increasing t.  Node derivatives are
/// precomputed by finite differences (fourth-order centred where the
/// stencil fits, second-order one-sided at the ends).
struct Tabulated {
  std::vector<double> t;
  std::vector<double> value;
  std::vector<double> d1;
  std::vector<double> d2;
};

struct Sum {
  std::shared_ptr<const TimeFunction> lhs, rhs;
};

struct Product {
  std::shared_ptr<const TimeFunction> lhs, rhs;
};

struct Scale {
  double factor;
  std::shared_ptr<const TimeFunction> arg;
};

struct Quotient {
  std::shared_ptr<const TimeFunction> num, den;
};

struct Power {
  std::shared_ptr<const TimeFunction> base;
  double exponent;
};

enum class Func { exp, sin, cos };

/// exp/sin/cos of an argument that is not affine in t.
struct Apply {
  Func func;
  std::shared_ptr<const TimeFunction> arg;
};

/// d/dt of the argument.  Used for derived quantities such as mdot/m.
struct Derivative {
  std::shared_ptr<const TimeFunction> arg;
};

}  // namespace node

class TimeFunction {
 public:
  using Node = std::variant<node::Constant, node::Exponential, node::Polynomial, node::Sinusoid,
                            node::Tabulated, node::Sum, node::Product, node::Scale, node::Quotient,
                            node::Power, node::Apply, node::Derivative>;

  TimeFunction() : TimeFunction(node::Constant{0.0}) {}
  TimeFunction(Node n);  // NOLINT(google-explicit-constructor)
  template <class Alt>
    requires(!std::is_arithmetic_v<std::decay_t<Alt>> && !std::is_same_v<std::decay_t<Alt>, Node> &&
             !std::is_same_v<std::decay_t<Alt>, TimeFunction> && std::is_constructible_v<Node, Alt>)
  TimeFunction(Alt n) : TimeFunction(Node(std::move(n))) {}  // NOLINT(google-explicit-constructor)
  TimeFunction(double value) : TimeFunction(node::Constant{value}) {}  // NOLINT

  const Node& node() const { return *node_; }

  double eval(double t) const;
  double deriv1(double t) const;
  double deriv2(double t) const;
  double operator()(double t) const { return eval(t); }

  Taylor taylor(double t, int order) const;

  /// Expression text in the parser grammar.  Tabulated and Derivative nodes
  /// have no textual form and print as a bracketed placeholder.
  std::string print() const;

  /// Union of the sample ranges of any Tabulated nodes; the whole real line otherwise.
  Interval domain() const;

  /// Structural checks on [interval.begin, interval.end]: tabulated coverage,
  /// denominators that keep one sign, and positive bases of fractional powers
  /// (sign-sampled on 1024 points).  Throws DomainError.
  void validate(const Interval& interval) const;

  /// True when the tree contains no Tabulated node.
  bool is_parametric() const;

 private:
  std::shared_ptr<const Node> node_;
};

TimeFunction operator+(const TimeFunction& a, const TimeFunction& b);
TimeFunction operator-(const TimeFunction& a, const TimeFunction& b);
TimeFunction operator*(const TimeFunction& a, const TimeFunction& b);
TimeFunction operator/(const TimeFunction& a, const TimeFunction& b);
TimeFunction operator*(double factor, const TimeFunction& f);
TimeFunction operator-(const TimeFunction& f);
TimeFunction pow(const TimeFunction& base, double exponent);
TimeFunction sqrt(const TimeFunction& f);
TimeFunction derivative(const TimeFunction& f);

/// Parses the expression grammar
///   expr := term (('+'|'-') term)* ; term := factor (('*'|'/') factor)* ;
///   factor := ['-'] atom ['^' number] ;
///   atom := number | 't' | func '(' expr ')' | 'pow' '(' expr ',' number ')' | '(' expr ')' ;
///   func := 'exp' | 'sin' | 'cos'.
/// Affine arguments of exp/sin/cos fold into Exponential and Sinusoid nodes.
TimeFunction parse(std::string_view source);

TimeFunction tabulated(std::vector<double> t, std::vector<double> value);

/// Two-column CSV (t,value), optional header line.
TimeFunction read_tabulated_csv(const std::filesystem::path& path);

}  // namespace tdho
