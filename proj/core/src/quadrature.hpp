#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <cstdio>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "tdho/errors.hpp"

namespace tdho::detail {

/// Adaptive Gauss-Kronrod 15 over [a, b] (either order); throws QuadratureFailure
/// when the error estimate misses tol relative to the L1 norm of the integrand.
template <class F>
double integrate_segment(F&& f, double a, double b, double tol) {
  if (a == b) return 0.0;
  const double lo = std::min(a, b), hi = std::max(a, b), h = hi - lo;
  // Boost's error estimate has a floor of a few ulps of |f|, independent of the
  // interval length, so integrate over the unit interval and scale afterwards.
  auto unit = [&](double s) { return f(lo + s * h); };
  double err = 0.0, l1 = 0.0;
  const double v = boost::math::quadrature::gauss_kronrod<double, 15>::integrate(unit, 0.0, 1.0, 10, tol, &err, &l1);
  if (!std::isfinite(v) || err > 100 * tol * l1 + 16 * std::numeric_limits<double>::epsilon() * l1) {
    char msg[160];
    std::snprintf(msg, sizeof msg, "adaptive quadrature on [%.6g, %.6g] missed tolerance: error estimate %.3e, L1 %.3e",
                  lo, hi, err * h, l1 * h);
    throw QuadratureFailure(msg);
  }
  return a < b ? v * h : -v * h;
}

/// Fixed 20-point Gauss-Legendre over [a, b]; used for sub-step ranges where the
/// integrand is a smooth function of the step's interpolant.
template <class F>
double integrate_fixed(F&& f, double a, double b) {
  if (a == b) return 0.0;
  return boost::math::quadrature::gauss<double, 20>::integrate(f, a, b);
}

}  // namespace tdho::detail
