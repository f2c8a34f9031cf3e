#include "tdho/ode.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "tdho/errors.hpp"

namespace tdho {

namespace {

// Dormand-Prince 5(4) tableau and Hairer's dense-output coefficients.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192, a75 = -2187.0 / 6784, a76 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;
constexpr double d1 = -12715105075.0 / 11282082432.0, d3 = 87487479700.0 / 32700410799.0,
                 d4 = -10690763975.0 / 1880347072.0, d5 = 701980252875.0 / 199316789632.0,
                 d6 = -1453857185.0 / 822651844.0, d7 = 69997945.0 / 29380423.0;

double error_norm(std::span<const double> y, std::span<const double> y_new, std::span<const double> err,
                  const OdeOptions& o) {
  double s = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    const double sc = o.atol + o.rtol * std::max(std::abs(y[i]), std::abs(y_new[i]));
    s += (err[i] / sc) * (err[i] / sc);
  }
  return std::sqrt(s / static_cast<double>(y.size()));
}

}  // namespace

std::span<const double> DenseTrajectory::node_state(std::size_t k) const {
  if (k + 1 == times_.size()) return final_state_;
  return {coeffs_.data() + 5 * dim_ * k, dim_};
}

void DenseTrajectory::state(double t, std::span<double> out) const {
  const double lo = std::min(t_begin(), t_end()), hi = std::max(t_begin(), t_end());
  const double slack = 1e-12 * std::max({1.0, std::abs(lo), std::abs(hi)});
  if (t < lo - slack || t > hi + slack)
    throw DomainError("dense output requested at t = " + std::to_string(t) + " outside [" + std::to_string(lo) +
                      ", " + std::to_string(hi) + "]");
  const bool forward = t_end() >= t_begin();
  const std::size_t steps = times_.size() - 1;
  std::size_t k;
  if (forward) {
    auto it = std::upper_bound(times_.begin(), times_.end(), t);
    k = it == times_.begin() ? 0 : static_cast<std::size_t>(it - times_.begin()) - 1;
  } else {
    auto it = std::upper_bound(times_.begin(), times_.end(), t, std::greater<>());
    k = it == times_.begin() ? 0 : static_cast<std::size_t>(it - times_.begin()) - 1;
  }
  if (k >= steps) {
    std::copy(final_state_.begin(), final_state_.end(), out.begin());
    return;
  }
  const double h = times_[k + 1] - times_[k];
  const double theta = (t - times_[k]) / h;
  const double theta1 = 1.0 - theta;
  const double* r = coeffs_.data() + 5 * dim_ * k;
  for (std::size_t i = 0; i < dim_; ++i) {
    const double r1 = r[i], r2 = r[dim_ + i], r3 = r[2 * dim_ + i], r4 = r[3 * dim_ + i], r5 = r[4 * dim_ + i];
    out[i] = r1 + theta * (r2 + theta1 * (r3 + theta * (r4 + theta1 * r5)));
  }
}

std::vector<double> DenseTrajectory::state(double t) const {
  std::vector<double> y(dim_);
  state(t, y);
  return y;
}

DenseTrajectory integrate(const OdeRhs& rhs, double t0, std::span<const double> y0, double t1,
                          const OdeOptions& o) {
  const std::size_t n = y0.size();
  DenseTrajectory out;
  out.dim_ = n;
  out.times_.push_back(t0);
  std::vector<double> y(y0.begin(), y0.end());
  if (t1 == t0) {
    out.final_state_ = y;
    return out;
  }
  const double dir = t1 > t0 ? 1.0 : -1.0;
  const double span = std::abs(t1 - t0);

  std::vector<double> k1(n), k2(n), k3(n), k4(n), k5(n), k6(n), k7(n), ytmp(n), ynew(n), err(n);
  auto f = [&](double t, const std::vector<double>& yy, std::vector<double>& dy) {
    rhs(t, yy, dy);
    ++out.stats_.evaluations;
  };

  f(t0, y, k1);
  double h = o.initial_step;
  if (h <= 0.0) {
    double dn0 = 0.0, dn1 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double sc = o.atol + o.rtol * std::abs(y[i]);
      dn0 += (y[i] / sc) * (y[i] / sc);
      dn1 += (k1[i] / sc) * (k1[i] / sc);
    }
    dn0 = std::sqrt(dn0 / n);
    dn1 = std::sqrt(dn1 / n);
    h = (dn0 < 1e-5 || dn1 < 1e-5) ? 1e-6 : 0.01 * dn0 / dn1;
    h = std::min(h, 0.1 * span);
  }
  h = std::min(h, span);

  double t = t0;
  const double h_floor = 1e-14 * std::max(1.0, std::abs(t0) + span);
  bool last_rejected = false;
  while (dir * (t1 - t) > 0.0) {
    if (out.stats_.accepted + out.stats_.rejected >= o.max_steps)
      throw IntegratorFailure("maximum number of steps exceeded");
    if (h < h_floor) throw IntegratorFailure("step size underflow at t = " + std::to_string(t));
    bool final_step = false;
    if (h >= std::abs(t1 - t)) {
      h = std::abs(t1 - t);
      final_step = true;
    }
    const double hs = dir * h;

    for (std::size_t i = 0; i < n; ++i) ytmp[i] = y[i] + hs * a21 * k1[i];
    f(t + c2 * hs, ytmp, k2);
    for (std::size_t i = 0; i < n; ++i) ytmp[i] = y[i] + hs * (a31 * k1[i] + a32 * k2[i]);
    f(t + c3 * hs, ytmp, k3);
    for (std::size_t i = 0; i < n; ++i) ytmp[i] = y[i] + hs * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
    f(t + c4 * hs, ytmp, k4);
    for (std::size_t i = 0; i < n; ++i)
      ytmp[i] = y[i] + hs * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
    f(t + c5 * hs, ytmp, k5);
    for (std::size_t i = 0; i < n; ++i)
      ytmp[i] = y[i] + hs * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] + a65 * k5[i]);
    const double t_new = final_step ? t1 : t + hs;
    f(t + hs, ytmp, k6);
    for (std::size_t i = 0; i < n; ++i)
      ynew[i] = y[i] + hs * (a71 * k1[i] + a73 * k3[i] + a74 * k4[i] + a75 * k5[i] + a76 * k6[i]);
    f(t_new, ynew, k7);
    for (std::size_t i = 0; i < n; ++i)
      err[i] = hs * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);

    const double en = error_norm(y, ynew, err, o);
    if (!std::isfinite(en)) throw IntegratorFailure("non-finite state at t = " + std::to_string(t));
    if (en <= 1.0) {
      const std::size_t base = out.coeffs_.size();
      out.coeffs_.resize(base + 5 * n);
      double* r = out.coeffs_.data() + base;
      for (std::size_t i = 0; i < n; ++i) {
        const double dy = ynew[i] - y[i];
        const double bspl = hs * k1[i] - dy;
        r[i] = y[i];
        r[n + i] = dy;
        r[2 * n + i] = bspl;
        r[3 * n + i] = dy - hs * k7[i] - bspl;
        r[4 * n + i] = hs * (d1 * k1[i] + d3 * k3[i] + d4 * k4[i] + d5 * k5[i] + d6 * k6[i] + d7 * k7[i]);
      }
      out.stats_.min_step = out.stats_.accepted == 0 ? h : std::min(out.stats_.min_step, h);
      out.stats_.max_step = std::max(out.stats_.max_step, h);
      ++out.stats_.accepted;
      t = t_new;
      out.times_.push_back(t);
      y.swap(ynew);
      k1.swap(k7);
      double fac = 0.9 * std::pow(std::max(en, 1e-10), -0.2);
      fac = std::clamp(fac, 0.2, last_rejected ? 1.0 : 10.0);
      last_rejected = false;
      if (!final_step) h *= fac;
    } else {
      ++out.stats_.rejected;
      last_rejected = true;
      h *= std::max(0.2, 0.9 * std::pow(en, -0.2));
    }
  }
  out.final_state_ = y;
  return out;
}

}  // namespace tdho
