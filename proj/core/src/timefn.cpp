#include "tdho/timefn.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <sstream>

#include "tdho/errors.hpp"

namespace tdho {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

using TaylorArray = std::array<double, kMaxTaylorOrder + 1>;

Taylor constant_taylor(double value, int order) {
  Taylor r;
  r.order = order;
  r.c[0] = value;
  return r;
}

Taylor add(const Taylor& a, const Taylor& b) {
  Taylor r;
  r.order = a.order;
  for (int k = 0; k <= r.order; ++k) r.c[k] = a.c[k] + b.c[k];
  return r;
}

Taylor scale(double f, const Taylor& a) {
  Taylor r;
  r.order = a.order;
  for (int k = 0; k <= r.order; ++k) r.c[k] = f * a.c[k];
  return r;
}

Taylor mul(const Taylor& a, const Taylor& b) {
  Taylor r;
  r.order = a.order;
  for (int k = 0; k <= r.order; ++k) {
    double s = 0.0;
    for (int i = 0; i <= k; ++i) s += a.c[i] * b.c[k - i];
    r.c[k] = s;
  }
  return r;
}

Taylor div(const Taylor& a, const Taylor& b) {
  if (b.c[0] == 0.0) throw DomainError("division by a time function that vanishes");
  Taylor r;
  r.order = a.order;
  for (int k = 0; k <= r.order; ++k) {
    double s = a.c[k];
    for (int i = 1; i <= k; ++i) s -= b.c[i] * r.c[k - i];
    r.c[k] = s / b.c[0];
  }
  return r;
}

Taylor exp_of(const Taylor& a) {
  Taylor r;
  r.order = a.order;
  r.c[0] = std::exp(a.c[0]);
  for (int k = 1; k <= r.order; ++k) {
    double s = 0.0;
    for (int i = 1; i <= k; ++i) s += i * a.c[i] * r.c[k - i];
    r.c[k] = s / k;
  }
  return r;
}

std::pair<Taylor, Taylor> sin_cos_of(const Taylor& a) {
  Taylor s, c;
  s.order = c.order = a.order;
  s.c[0] = std::sin(a.c[0]);
  c.c[0] = std::cos(a.c[0]);
  for (int k = 1; k <= a.order; ++k) {
    double ss = 0.0, cc = 0.0;
    for (int i = 1; i <= k; ++i) {
      ss += i * a.c[i] * c.c[k - i];
      cc -= i * a.c[i] * s.c[k - i];
    }
    s.c[k] = ss / k;
    c.c[k] = cc / k;
  }
  return {s, c};
}

Taylor pow_of(const Taylor& a, double e) {
  const double rounded = std::round(e);
  if (rounded == e && std::abs(e) <= 64.0) {
    auto n = static_cast<long>(std::abs(e));
    Taylor result = constant_taylor(1.0, a.order);
    Taylor base = a;
    while (n > 0) {
      if (n & 1) result = mul(result, base);
      base = mul(base, base);
      n >>= 1;
    }
    if (e < 0) result = div(constant_taylor(1.0, a.order), result);
    return result;
  }
  if (a.c[0] <= 0.0) throw DomainError("fractional power of a non-positive time function");
  Taylor r;
  r.order = a.order;
  r.c[0] = std::pow(a.c[0], e);
  for (int k = 1; k <= r.order; ++k) {
    double s = 0.0;
    for (int i = 1; i <= k; ++i) s += (e * i - (k - i)) * a.c[i] * r.c[k - i];
    r.c[k] = s / (k * a.c[0]);
  }
  return r;
}

double factorial(int k) {
  double f = 1.0;
  for (int i = 2; i <= k; ++i) f *= i;
  return f;
}

// Finite-difference weights (Fornberg) for derivatives 0..2 at x0 on nodes xs.
std::array<std::vector<double>, 3> fd_weights(double x0, std::span<const double> xs) {
  const std::size_t n = xs.size();
  const int m = 2;
  std::vector<std::vector<std::vector<double>>> delta(
      m + 1, std::vector<std::vector<double>>(n, std::vector<double>(n, 0.0)));
  delta[0][0][0] = 1.0;
  double c1 = 1.0;
  for (std::size_t i = 1; i < n; ++i) {
    double c2 = 1.0;
    for (std::size_t v = 0; v < i; ++v) {
      const double c3 = xs[i] - xs[v];
      c2 *= c3;
      for (int k = 0; k <= std::min<int>(static_cast<int>(i), m); ++k) {
        const double prev = k > 0 ? delta[k - 1][i - 1][v] : 0.0;
        delta[k][i][v] = ((xs[i] - x0) * delta[k][i - 1][v] - k * prev) / c3;
      }
    }
    for (int k = 0; k <= std::min<int>(static_cast<int>(i), m); ++k) {
      const double prev = k > 0 ? delta[k - 1][i - 1][i - 1] : 0.0;
      delta[k][i][i] = c1 / c2 * (k * prev - (xs[i - 1] - x0) * delta[k][i - 1][i - 1]);
    }
    c1 = c2;
  }
  std::array<std::vector<double>, 3> w;
  for (int k = 0; k <= m; ++k) w[k] = delta[k][n - 1];
  return w;
}

void fill_tabulated_derivatives(node::Tabulated& tab) {
  const std::size_t n = tab.t.size();
  tab.d1.assign(n, 0.0);
  tab.d2.assign(n, 0.0);
  if (n == 2) {
    const double slope = (tab.value[1] - tab.value[0]) / (tab.t[1] - tab.t[0]);
    tab.d1 = {slope, slope};
    return;
  }
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t lo, hi;  // inclusive stencil
    if (i >= 2 && i + 2 < n) {
      lo = i - 2;
      hi = i + 2;
    } else if (i == 0) {
      lo = 0;
      hi = std::min<std::size_t>(3, n - 1);
    } else if (i + 1 == n) {
      lo = n >= 4 ? n - 4 : 0;
      hi = n - 1;
    } else {
      lo = i - 1;
      hi = i + 1;
    }
    std::span<const double> xs(tab.t.data() + lo, hi - lo + 1);
    auto w = fd_weights(tab.t[i], xs);
    double s1 = 0.0, s2 = 0.0;
    for (std::size_t k = 0; k < xs.size(); ++k) {
      s1 += w[1][k] * tab.value[lo + k];
      s2 += w[2][k] * tab.value[lo + k];
    }
    // First derivatives at the ends use the three nearest points (second order).
    if (i == 0 || i + 1 == n) {
      const std::size_t l3 = i == 0 ? 0 : n - 3;
      std::span<const double> x3(tab.t.data() + l3, 3);
      auto w3 = fd_weights(tab.t[i], x3);
      s1 = 0.0;
      for (std::size_t k = 0; k < 3; ++k) s1 += w3[1][k] * tab.value[l3 + k];
    }
    tab.d1[i] = s1;
    tab.d2[i] = s2;
  }
}

Taylor eval_tabulated(const node::Tabulated& tab, double t, int order) {
  if (order > 2) throw DomainError("tabulated functions provide derivatives up to second order");
  const double t0 = tab.t.front(), tn = tab.t.back();
  const double slack = 1e-12 * std::max({1.0, std::abs(t0), std::abs(tn)});
  if (t < t0 - slack || t > tn + slack)
    throw DomainError("t = " + std::to_string(t) + " outside tabulated range [" + std::to_string(t0) +
                      ", " + std::to_string(tn) + "]");
  t = std::clamp(t, t0, tn);
  auto it = std::upper_bound(tab.t.begin(), tab.t.end(), t);
  std::size_t k = it == tab.t.begin() ? 0 : static_cast<std::size_t>(it - tab.t.begin()) - 1;
  if (k + 1 >= tab.t.size()) k = tab.t.size() - 2;
  const double h = tab.t[k + 1] - tab.t[k];
  const double s = (t - tab.t[k]) / h;
  const double h00 = (1 + 2 * s) * (1 - s) * (1 - s);
  const double h10 = s * (1 - s) * (1 - s);
  const double h01 = s * s * (3 - 2 * s);
  const double h11 = s * s * (s - 1);
  Taylor r;
  r.order = order;
  r.c[0] = h00 * tab.value[k] + h10 * h * tab.d1[k] + h01 * tab.value[k + 1] + h11 * h * tab.d1[k + 1];
  if (order >= 1) r.c[1] = (1 - s) * tab.d1[k] + s * tab.d1[k + 1];
  if (order >= 2) r.c[2] = 0.5 * ((1 - s) * tab.d2[k] + s * tab.d2[k + 1]);
  return r;
}

Taylor eval_polynomial(const std::vector<double>& a, double t, int order) {
  // Repeated synthetic division by (x - t) yields the shifted coefficients.
  std::vector<double> b = a;
  Taylor r;
  r.order = order;
  const int n = static_cast<int>(b.size());
  for (int k = 0; k <= order; ++k) {
    if (k >= n) break;
    double acc = 0.0;
    for (int j = n - 1; j >= k; --j) {
      acc = acc * t + b[j];
      b[j] = acc;
    }
    r.c[k] = b[k];
  }
  return r;
}

Taylor eval_node(const TimeFunction& f, double t, int order);

Taylor eval_node(const TimeFunction::Node& n, double t, int order) {
  return std::visit(
      Overloaded{
          [&](const node::Constant& c) { return constant_taylor(c.value, order); },
          [&](const node::Exponential& e) {
            Taylor r;
            r.order = order;
            const double v = e.amplitude * std::exp(e.rate * t);
            double rk = 1.0;
            for (int k = 0; k <= order; ++k) {
              r.c[k] = v * rk / factorial(k);
              rk *= e.rate;
            }
            return r;
          },
          [&](const node::Polynomial& p) { return eval_polynomial(p.coefficients, t, order); },
          [&](const node::Sinusoid& s) {
            Taylor r;
            r.order = order;
            const double arg = s.angular_frequency * t + s.phase;
            const double sv = std::sin(arg), cv = std::cos(arg);
            const std::array<double, 4> cycle{sv, cv, -sv, -cv};
            double wk = 1.0;
            for (int k = 0; k <= order; ++k) {
              r.c[k] = s.amplitude * wk * cycle[k % 4] / factorial(k);
              wk *= s.angular_frequency;
            }
            return r;
          },
          [&](const node::Tabulated& tab) { return eval_tabulated(tab, t, order); },
          [&](const node::Sum& s) { return add(eval_node(*s.lhs, t, order), eval_node(*s.rhs, t, order)); },
          [&](const node::Product& p) { return mul(eval_node(*p.lhs, t, order), eval_node(*p.rhs, t, order)); },
          [&](const node::Scale& s) { return scale(s.factor, eval_node(*s.arg, t, order)); },
          [&](const node::Quotient& q) { return div(eval_node(*q.num, t, order), eval_node(*q.den, t, order)); },
          [&](const node::Power& p) { return pow_of(eval_node(*p.base, t, order), p.exponent); },
          [&](const node::Apply& a) {
            const Taylor arg = eval_node(*a.arg, t, order);
            switch (a.func) {
              case node::Func::exp:
                return exp_of(arg);
              case node::Func::sin:
                return sin_cos_of(arg).first;
              case node::Func::cos:
                break;
            }
            return sin_cos_of(arg).second;
          },
          [&](const node::Derivative& d) {
            if (order + 1 > kMaxTaylorOrder) throw DomainError("derivative order exceeds Taylor capacity");
            const Taylor inner = eval_node(*d.arg, t, order + 1);
            Taylor r;
            r.order = order;
            for (int k = 0; k <= order; ++k) r.c[k] = (k + 1) * inner.c[k + 1];
            return r;
          },
      },
      n);
}

Taylor eval_node(const TimeFunction& f, double t, int order) { return eval_node(f.node(), t, order); }

std::string number(double v) {
  std::array<char, 64> buf{};
  auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  std::string s(buf.data(), end);
  if (v < 0) return "(" + s + ")";
  return s;
}

std::shared_ptr<const TimeFunction> share(TimeFunction f) { return std::make_shared<const TimeFunction>(std::move(f)); }

template <class T>
const T* as(const TimeFunction& f) {
  return std::get_if<T>(&f.node());
}

// Builders with light algebraic folding; used by the parser and the operators.

std::vector<double> poly_of(const TimeFunction& f, bool& ok) {
  ok = true;
  if (auto c = as<node::Constant>(f)) return {c->value};
  if (auto p = as<node::Polynomial>(f)) return p->coefficients;
  ok = false;
  return {};
}

TimeFunction make_polynomial(std::vector<double> c) {
  while (c.size() > 1 && c.back() == 0.0) c.pop_back();
  if (c.size() == 1) return node::Constant{c[0]};
  return node::Polynomial{std::move(c)};
}

TimeFunction make_scale(double factor, const TimeFunction& f) {
  if (factor == 0.0) return node::Constant{0.0};
  if (auto c = as<node::Constant>(f)) return node::Constant{factor * c->value};
  if (auto p = as<node::Polynomial>(f)) {
    auto coeffs = p->coefficients;
    for (auto& x : coeffs) x *= factor;
    return make_polynomial(std::move(coeffs));
  }
  if (auto s = as<node::Sinusoid>(f)) return node::Sinusoid{factor * s->amplitude, s->angular_frequency, s->phase};
  if (auto s = as<node::Scale>(f)) return node::Scale{factor * s->factor, s->arg};
  if (factor == 1.0) return f;
  return node::Scale{factor, share(f)};
}

TimeFunction make_sum(const TimeFunction& a, const TimeFunction& b) {
  if (auto c = as<node::Constant>(a); c && c->value == 0.0) return b;
  if (auto c = as<node::Constant>(b); c && c->value == 0.0) return a;
  bool oka, okb;
  auto pa = poly_of(a, oka);
  auto pb = poly_of(b, okb);
  if (oka && okb) {
    std::vector<double> c(std::max(pa.size(), pb.size()), 0.0);
    for (std::size_t i = 0; i < pa.size(); ++i) c[i] += pa[i];
    for (std::size_t i = 0; i < pb.size(); ++i) c[i] += pb[i];
    return make_polynomial(std::move(c));
  }
  return node::Sum{share(a), share(b)};
}

TimeFunction make_product(const TimeFunction& a, const TimeFunction& b) {
  if (auto c = as<node::Constant>(a)) return make_scale(c->value, b);
  if (auto c = as<node::Constant>(b)) return make_scale(c->value, a);
  bool oka, okb;
  auto pa = poly_of(a, oka);
  auto pb = poly_of(b, okb);
  if (oka && okb) {
    std::vector<double> c(pa.size() + pb.size() - 1, 0.0);
    for (std::size_t i = 0; i < pa.size(); ++i)
      for (std::size_t j = 0; j < pb.size(); ++j) c[i + j] += pa[i] * pb[j];
    return make_polynomial(std::move(c));
  }
  return node::Product{share(a), share(b)};
}

TimeFunction make_quotient(const TimeFunction& a, const TimeFunction& b) {
  if (auto c = as<node::Constant>(b)) {
    if (c->value == 0.0) throw DomainError("division by the constant zero");
    return make_scale(1.0 / c->value, a);
  }
  if (auto c = as<node::Constant>(a); c && c->value == 0.0) return node::Constant{0.0};
  return node::Quotient{share(a), share(b)};
}

TimeFunction make_power(const TimeFunction& base, double e) {
  if (e == 1.0) return base;
  if (auto c = as<node::Constant>(base)) {
    if (c->value <= 0.0 && std::round(e) != e) throw DomainError("fractional power of a non-positive constant");
    return node::Constant{std::pow(c->value, e)};
  }
  if (auto p = as<node::Polynomial>(base); p && e >= 0 && std::round(e) == e && e <= 16) {
    TimeFunction r = node::Constant{1.0};
    for (int i = 0; i < static_cast<int>(e); ++i) r = make_product(r, base);
    return r;
  }
  return node::Power{share(base), e};
}

TimeFunction make_apply(node::Func func, const TimeFunction& arg) {
  bool ok;
  auto p = poly_of(arg, ok);
  if (ok && p.size() <= 2) {
    const double a0 = p[0];
    const double a1 = p.size() == 2 ? p[1] : 0.0;
    switch (func) {
      case node::Func::exp:
        if (a1 == 0.0) return node::Constant{std::exp(a0)};
        return node::Exponential{std::exp(a0), a1};
      case node::Func::sin:
        if (a1 == 0.0) return node::Constant{std::sin(a0)};
        return node::Sinusoid{1.0, a1, a0};
      case node::Func::cos:
        if (a1 == 0.0) return node::Constant{std::cos(a0)};
        return node::Sinusoid{1.0, a1, a0 + 0.5 * std::numbers::pi};
    }
  }
  return node::Apply{func, share(arg)};
}

// Recursive-descent parser over the expression grammar.
class Parser {
 public:
  explicit Parser(std::string_view src) : src_(src) {}

  TimeFunction run() {
    skip();
    if (pos_ >= src_.size()) throw ParseError("empty expression", pos_);
    TimeFunction e = expr();
    skip();
    if (pos_ != src_.size()) throw ParseError(std::string("unexpected character '") + src_[pos_] + "'", pos_);
    return e;
  }

 private:
  void skip() {
    while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip();
    if (pos_ < src_.size() && src_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char c) {
    if (!accept(c)) {
      if (pos_ >= src_.size()) throw ParseError(std::string("expected '") + c + "' but input ended", pos_);
      throw ParseError(std::string("expected '") + c + "'", pos_);
    }
  }

  TimeFunction expr() {
    TimeFunction lhs = term();
    for (;;) {
      if (accept('+'))
        lhs = make_sum(lhs, term());
      else if (accept('-'))
        lhs = make_sum(lhs, make_scale(-1.0, term()));
      else
        return lhs;
    }
  }

  TimeFunction term() {
    TimeFunction lhs = factor();
    for (;;) {
      if (accept('*'))
        lhs = make_product(lhs, factor());
      else if (accept('/'))
        lhs = make_quotient(lhs, factor());
      else
        return lhs;
    }
  }

  TimeFunction factor() {
    const bool negate = accept('-');
    TimeFunction a = atom();
    if (accept('^')) a = make_power(a, signed_number());
    return negate ? make_scale(-1.0, a) : a;
  }

  double signed_number() {
    const bool neg = accept('-');
    skip();
    const double v = number_literal();
    return neg ? -v : v;
  }

  double number_literal() {
    const std::size_t start = pos_;
    std::size_t i = pos_;
    auto digits = [&] {
      const std::size_t s = i;
      while (i < src_.size() && std::isdigit(static_cast<unsigned char>(src_[i]))) ++i;
      return i - s;
    };
    std::size_t nd = digits();
    if (i < src_.size() && src_[i] == '.') {
      ++i;
      nd += digits();
    }
    if (nd == 0) throw ParseError("expected a number", start);
    if (i < src_.size() && (src_[i] == 'e' || src_[i] == 'E')) {
      std::size_t j = i + 1;
      if (j < src_.size() && (src_[j] == '+' || src_[j] == '-')) ++j;
      if (j < src_.size() && std::isdigit(static_cast<unsigned char>(src_[j]))) {
        i = j;
        digits();
      }
    }
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(src_.data() + start, src_.data() + i, v);
    if (ec != std::errc() || ptr != src_.data() + i) throw ParseError("malformed number", start);
    pos_ = i;
    return v;
  }

  TimeFunction atom() {
    skip();
    if (pos_ >= src_.size()) throw ParseError("unexpected end of expression", pos_);
    const char c = src_[pos_];
    if (c == '(') {
      ++pos_;
      TimeFunction e = expr();
      expect(')');
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return node::Constant{number_literal()};
    if (std::isalpha(static_cast<unsigned char>(c))) {
      const std::size_t start = pos_;
      while (pos_ < src_.size() && (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_')) ++pos_;
      const std::string_view id = src_.substr(start, pos_ - start);
      if (id == "t") return node::Polynomial{{0.0, 1.0}};
      if (id == "pow") {
        expect('(');
        TimeFunction base = expr();
        expect(',');
        const double e = signed_number();
        expect(')');
        return make_power(base, e);
      }
      node::Func f;
      if (id == "exp")
        f = node::Func::exp;
      else if (id == "sin")
        f = node::Func::sin;
      else if (id == "cos")
        f = node::Func::cos;
      else
        throw ParseError("unknown identifier '" + std::string(id) + "'", start);
      expect('(');
      TimeFunction arg = expr();
      expect(')');
      return make_apply(f, arg);
    }
    throw ParseError(std::string("unexpected character '") + c + "'", pos_);
  }

  std::string_view src_;
  std::size_t pos_ = 0;
};

std::string print_node(const TimeFunction& f) {
  return std::visit(
      Overloaded{
          [](const node::Constant& c) { return number(c.value); },
          [](const node::Exponential& e) { return "(" + number(e.amplitude) + "*exp(" + number(e.rate) + "*t))"; },
          [](const node::Polynomial& p) {
            std::string s = "(" + number(p.coefficients[0]);
            for (std::size_t k = 1; k < p.coefficients.size(); ++k) {
              s += " + " + number(p.coefficients[k]) + "*t";
              if (k > 1) s += "^" + std::to_string(k);
            }
            return s + ")";
          },
          [](const node::Sinusoid& s) {
            return "(" + number(s.amplitude) + "*sin(" + number(s.angular_frequency) + "*t + " + number(s.phase) +
                   "))";
          },
          [](const node::Tabulated& t) { return "tabulated[" + std::to_string(t.t.size()) + " samples]"; },
          [](const node::Sum& s) { return "(" + print_node(*s.lhs) + " + " + print_node(*s.rhs) + ")"; },
          [](const node::Product& p) { return "(" + print_node(*p.lhs) + "*" + print_node(*p.rhs) + ")"; },
          [](const node::Scale& s) { return "(" + number(s.factor) + "*" + print_node(*s.arg) + ")"; },
          [](const node::Quotient& q) { return "(" + print_node(*q.num) + "/" + print_node(*q.den) + ")"; },
          [](const node::Power& p) { return "pow(" + print_node(*p.base) + ", " + number(p.exponent) + ")"; },
          [](const node::Apply& a) {
            const char* name = a.func == node::Func::exp ? "exp" : a.func == node::Func::sin ? "sin" : "cos";
            return std::string(name) + "(" + print_node(*a.arg) + ")";
          },
          [](const node::Derivative& d) { return "d/dt[" + print_node(*d.arg) + "]"; },
      },
      f.node());
}

template <class Fn>
void for_each_child(const TimeFunction& f, Fn&& fn) {
  std::visit(Overloaded{
                 [&](const node::Sum& s) { fn(*s.lhs), fn(*s.rhs); },
                 [&](const node::Product& p) { fn(*p.lhs), fn(*p.rhs); },
                 [&](const node::Scale& s) { fn(*s.arg); },
                 [&](const node::Quotient& q) { fn(*q.num), fn(*q.den); },
                 [&](const node::Power& p) { fn(*p.base); },
                 [&](const node::Apply& a) { fn(*a.arg); },
                 [&](const node::Derivative& d) { fn(*d.arg); },
                 [](const auto&) {},
             },
             f.node());
}

std::vector<double> sample_grid(const Interval& iv, std::size_t n) {
  std::vector<double> ts(n);
  for (std::size_t k = 0; k < n; ++k) ts[k] = iv.begin + iv.length() * static_cast<double>(k) / static_cast<double>(n - 1);
  return ts;
}

}  // namespace

bool Interval::contains(double t) const {
  const double lo = std::min(begin, end), hi = std::max(begin, end);
  const double slack = 1e-12 * std::max({1.0, std::abs(lo), std::abs(hi)});
  return t >= lo - slack && t <= hi + slack;
}

double Taylor::derivative(int k) const { return c[k] * factorial(k); }

TimeFunction::TimeFunction(Node n) : node_(std::make_shared<const Node>(std::move(n))) {}

double TimeFunction::eval(double t) const { return eval_node(*this, t, 0).c[0]; }
double TimeFunction::deriv1(double t) const { return eval_node(*this, t, 1).c[1]; }
double TimeFunction::deriv2(double t) const { return 2.0 * eval_node(*this, t, 2).c[2]; }

Taylor TimeFunction::taylor(double t, int order) const {
  if (order < 0 || order > kMaxTaylorOrder) throw DomainError("unsupported Taylor order");
  return eval_node(*this, t, order);
}

std::string TimeFunction::print() const { return print_node(*this); }

Interval TimeFunction::domain() const {
  Interval d{-std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()};
  auto visit = [&](auto&& self, const TimeFunction& f) -> void {
    if (auto tab = std::get_if<node::Tabulated>(&f.node())) {
      d.begin = std::max(d.begin, tab->t.front());
      d.end = std::min(d.end, tab->t.back());
    }
    for_each_child(f, [&](const TimeFunction& c) { self(self, c); });
  };
  visit(visit, *this);
  return d;
}

bool TimeFunction::is_parametric() const {
  bool parametric = true;
  auto visit = [&](auto&& self, const TimeFunction& f) -> void {
    if (std::holds_alternative<node::Tabulated>(f.node())) parametric = false;
    for_each_child(f, [&](const TimeFunction& c) { self(self, c); });
  };
  visit(visit, *this);
  return parametric;
}

void TimeFunction::validate(const Interval& interval) const {
  const Interval d = domain();
  if (!d.contains(interval.begin) || !d.contains(interval.end))
    throw DomainError("interval [" + std::to_string(interval.begin) + ", " + std::to_string(interval.end) +
                      "] not covered by tabulated samples");
  const auto ts = sample_grid(interval, 1024);
  auto one_sign = [&](const TimeFunction& f, bool strictly_positive, const char* what) {
    double first = 0.0;
    for (double t : ts) {
      const double v = f.eval(t);
      if (v == 0.0 || (strictly_positive && v < 0.0) || (first != 0.0 && (v > 0) != (first > 0)))
        throw DomainError(std::string(what) + " changes sign or vanishes near t = " + std::to_string(t));
      if (first == 0.0) first = v;
    }
  };
  auto visit = [&](auto&& self, const TimeFunction& f) -> void {
    if (auto q = std::get_if<node::Quotient>(&f.node())) one_sign(*q->den, false, "denominator");
    if (auto p = std::get_if<node::Power>(&f.node()); p && std::round(p->exponent) != p->exponent)
      one_sign(*p->base, true, "base of fractional power");
    for_each_child(f, [&](const TimeFunction& c) { self(self, c); });
  };
  visit(visit, *this);
}

TimeFunction operator+(const TimeFunction& a, const TimeFunction& b) { return make_sum(a, b); }
TimeFunction operator-(const TimeFunction& a, const TimeFunction& b) { return make_sum(a, make_scale(-1.0, b)); }
TimeFunction operator*(const TimeFunction& a, const TimeFunction& b) { return make_product(a, b); }
TimeFunction operator/(const TimeFunction& a, const TimeFunction& b) { return make_quotient(a, b); }
TimeFunction operator*(double factor, const TimeFunction& f) { return make_scale(factor, f); }
TimeFunction operator-(const TimeFunction& f) { return make_scale(-1.0, f); }
TimeFunction pow(const TimeFunction& base, double exponent) { return make_power(base, exponent); }
TimeFunction sqrt(const TimeFunction& f) { return make_power(f, 0.5); }

TimeFunction derivative(const TimeFunction& f) {
  if (std::holds_alternative<node::Constant>(f.node())) return node::Constant{0.0};
  return node::Derivative{share(f)};
}

TimeFunction parse(std::string_view source) { return Parser(source).run(); }

TimeFunction tabulated(std::vector<double> t, std::vector<double> value) {
  if (t.size() != value.size()) throw InputError("tabulated function: column lengths differ");
  if (t.size() < 2) throw InputError("tabulated function needs at least 2 samples");
  for (std::size_t i = 1; i < t.size(); ++i)
    if (!(t[i] > t[i - 1])) throw InputError("tabulated samples must strictly increase in t");
  node::Tabulated tab{std::move(t), std::move(value), {}, {}};
  fill_tabulated_derivatives(tab);
  return tab;
}

TimeFunction read_tabulated_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open CSV file " + path.string());
  std::vector<double> t, v;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) throw InputError(path.string() + ":" + std::to_string(line_no) + ": expected two columns");
    auto field = [](std::string s) {
      const auto b = s.find_first_not_of(" \t");
      const auto e = s.find_last_not_of(" \t");
      return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    const std::string a = field(line.substr(0, comma)), b = field(line.substr(comma + 1));
    double x = 0.0, y = 0.0;
    auto ra = std::from_chars(a.data(), a.data() + a.size(), x);
    auto rb = std::from_chars(b.data(), b.data() + b.size(), y);
    const bool ok = ra.ec == std::errc() && ra.ptr == a.data() + a.size() && rb.ec == std::errc() &&
                    rb.ptr == b.data() + b.size();
    if (!ok) {
      if (t.empty() && line_no == 1) continue;  // header
      throw InputError(path.string() + ":" + std::to_string(line_no) + ": malformed number");
    }
    t.push_back(x);
    v.push_back(y);
  }
  return tabulated(std::move(t), std::move(v));
}

}  // namespace tdho
