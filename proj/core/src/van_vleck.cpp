#include "tdho/van_vleck.hpp"

#include <cmath>
#include <numbers>

#include <Eigen/LU>

#include "quadrature.hpp"
#include "tdho/errors.hpp"

namespace tdho {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr int kSignSamplesPerStep = 8;

}  // namespace

LinearHamiltonian LinearHamiltonian::from_system(const SystemSpec& spec) {
  LinearHamiltonian h;
  const auto& o1 = spec.oscillators[0];
  const auto& o2 = spec.oscillators[1];
  h.mass = {o1.mass, o2.mass};
  h.potential = {{o1.mass * o1.frequency * o1.frequency, spec.coupling},
                 {spec.coupling, o2.mass * o2.frequency * o2.frequency}};
  h.force = {o1.mass * o1.drive, o2.mass * o2.drive};
  return h;
}

LinearHamiltonian LinearHamiltonian::single_mode(const TimeFunction& omega_sq, const TimeFunction& force) {
  LinearHamiltonian h;
  h.mass = {TimeFunction(1.0)};
  h.potential = {{omega_sq}};
  h.force = {force};
  return h;
}

void VanVleckPropagator::matrices(double t, Eigen::VectorXd& m, Eigen::MatrixXd& v, Eigen::VectorXd& g) const {
  m.resize(static_cast<Eigen::Index>(n_));
  v.resize(static_cast<Eigen::Index>(n_), static_cast<Eigen::Index>(n_));
  g.resize(static_cast<Eigen::Index>(n_));
  for (std::size_t i = 0; i < n_; ++i) {
    const auto ei = static_cast<Eigen::Index>(i);
    m(ei) = h_.mass[i].eval(t);
    g(ei) = h_.force[i].eval(t);
    for (std::size_t j = 0; j < n_; ++j) v(ei, static_cast<Eigen::Index>(j)) = h_.potential[i][j].eval(t);
  }
}

VanVleckPropagator::VanVleckPropagator(LinearHamiltonian hamiltonian, double t_initial, double t_final, double hbar)
    : h_(std::move(hamiltonian)), t_i_(t_initial), t_f_(t_final), hbar_(hbar), n_(h_.dof()) {
  if (n_ == 0 || h_.potential.size() != n_ || h_.force.size() != n_) throw InputError("inconsistent Hamiltonian size");
  for (const auto& row : h_.potential)
    if (row.size() != n_) throw InputError("potential matrix must be square");
  if (!(hbar > 0.0)) throw InputError("hbar must be positive");
  if (t_final == t_initial) throw InputError("propagation interval is empty");

  // State: fundamental matrix (2n x 2n, column-major) followed by the particular solution.
  const std::size_t d = 2 * n_;
  const std::size_t dim = d * d + d;
  const OdeRhs rhs = [this, d](double t, std::span<const double> y, std::span<double> dy) {
    Eigen::VectorXd m, g;
    Eigen::MatrixXd v;
    matrices(t, m, v, g);
    for (std::size_t col = 0; col <= d; ++col) {
      const double* z = y.data() + col * d;
      double* dz = dy.data() + col * d;
      for (std::size_t i = 0; i < n_; ++i) {
        dz[i] = z[n_ + i] / m(static_cast<Eigen::Index>(i));
        double f = col == d ? g(static_cast<Eigen::Index>(i)) : 0.0;
        for (std::size_t j = 0; j < n_; ++j) f -= v(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) * z[j];
        dz[n_ + i] = f;
      }
    }
  };
  std::vector<double> y0(dim, 0.0);
  for (std::size_t i = 0; i < d; ++i) y0[i * d + i] = 1.0;
  OdeOptions opts;
  opts.rtol = kVanVleckTolerance;
  opts.atol = kVanVleckTolerance;
  traj_ = integrate(rhs, t_i_, y0, t_f_, opts);

  const std::vector<double> yf = traj_.state(t_f_);
  phi_final_ = Eigen::Map<const Eigen::MatrixXd>(yf.data(), static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
  particular_final_ = Eigen::Map<const Eigen::VectorXd>(yf.data() + d * d, static_cast<Eigen::Index>(d));
  const auto nn = static_cast<Eigen::Index>(n_);
  det_ = phi_final_.topRightCorner(nn, nn).determinant();

  // Sign changes of det dx/dp' along the path, sampled inside every step.
  const auto& ts = traj_.node_times();
  int last_sign = 0;
  std::vector<double> y(dim);
  for (std::size_t k = 0; k + 1 < ts.size(); ++k) {
    for (int s = 1; s <= kSignSamplesPerStep; ++s) {
      const double t = ts[k] + (ts[k + 1] - ts[k]) * s / kSignSamplesPerStep;
      traj_.state(t, y);
      const Eigen::Map<const Eigen::MatrixXd> phi(y.data(), static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
      const double det = phi.topRightCorner(nn, nn).determinant();
      const int sign = det > 0 ? 1 : (det < 0 ? -1 : 0);
      if (sign == 0) continue;
      if (last_sign != 0 && sign != last_sign) ++maslov_;
      last_sign = sign;
    }
  }
}

Eigen::VectorXd VanVleckPropagator::phase_point(const Eigen::VectorXd& x_initial, const Eigen::VectorXd& p_initial,
                                                double t) const {
  const std::size_t d = 2 * n_;
  const std::vector<double> y = traj_.state(t);
  const Eigen::Map<const Eigen::MatrixXd> phi(y.data(), static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
  const Eigen::Map<const Eigen::VectorXd> zp(y.data() + d * d, static_cast<Eigen::Index>(d));
  Eigen::VectorXd z0(static_cast<Eigen::Index>(d));
  z0 << x_initial, p_initial;
  return phi * z0 + zp;
}

ClassicalTrajectory VanVleckPropagator::trajectory(const Eigen::VectorXd& x_final,
                                                   const Eigen::VectorXd& x_initial) const {
  const auto nn = static_cast<Eigen::Index>(n_);
  if (x_final.size() != nn || x_initial.size() != nn) throw InputError("endpoint dimension does not match the Hamiltonian");
  const Eigen::MatrixXd bxx = phi_final_.topLeftCorner(nn, nn);
  const Eigen::MatrixXd bxp = phi_final_.topRightCorner(nn, nn);
  const double scale = std::max(1.0, bxp.cwiseAbs().maxCoeff());
  if (std::abs(det_) <= 1e-10 * std::pow(scale, static_cast<double>(n_))) throw Caustic(0.0);

  ClassicalTrajectory c;
  c.t_initial = t_i_;
  c.t_final = t_f_;
  c.x_initial = x_initial;
  c.x_final = x_final;
  c.monodromy_xp = bxp;
  c.p_initial = bxp.partialPivLu().solve(x_final - bxx * x_initial - particular_final_.head(nn));
  const Eigen::VectorXd zf = phase_point(x_initial, c.p_initial, t_f_);
  c.p_final = zf.tail(nn);
  c.boundary_residual = (zf.head(nn) - x_final).cwiseAbs().maxCoeff();

  auto lagrangian = [&](double t) {
    const Eigen::VectorXd z = phase_point(x_initial, c.p_initial, t);
    Eigen::VectorXd m, g;
    Eigen::MatrixXd v;
    matrices(t, m, v, g);
    const Eigen::VectorXd x = z.head(nn), p = z.tail(nn);
    return 0.5 * (p.array().square() / m.array()).sum() - 0.5 * x.dot(v * x) + g.dot(x);
  };
  const auto& ts = traj_.node_times();
  for (std::size_t k = 0; k + 1 < ts.size(); ++k)
    c.action += detail::integrate_segment(lagrangian, ts[k], ts[k + 1], kVanVleckTolerance);
  return c;
}

double VanVleckPropagator::lagrangian_action(const std::function<Eigen::VectorXd(double)>& x,
                                             const std::function<Eigen::VectorXd(double)>& v) const {
  auto lagrangian = [&](double t) {
    Eigen::VectorXd m, g;
    Eigen::MatrixXd pot;
    matrices(t, m, pot, g);
    const Eigen::VectorXd xt = x(t), vt = v(t);
    return 0.5 * (m.array() * vt.array().square()).sum() - 0.5 * xt.dot(pot * xt) + g.dot(xt);
  };
  const auto& ts = traj_.node_times();
  double s = 0.0;
  for (std::size_t k = 0; k + 1 < ts.size(); ++k)
    s += detail::integrate_segment(lagrangian, ts[k], ts[k + 1], kVanVleckTolerance);
  return s;
}

std::complex<double> VanVleckPropagator::amplitude() const {
  const double n = static_cast<double>(n_);
  const double direction = t_f_ > t_i_ ? 1.0 : -1.0;
  const double modulus = std::pow(2 * kPi * hbar_, -n / 2) / std::sqrt(std::abs(det_));
  return std::polar(modulus, -direction * (n * kPi / 4 + maslov_ * kPi / 2));
}

std::complex<double> VanVleckPropagator::operator()(const Eigen::VectorXd& x_final,
                                                    const Eigen::VectorXd& x_initial) const {
  const ClassicalTrajectory c = trajectory(x_final, x_initial);
  return amplitude() * std::polar(1.0, c.action / hbar_);
}

std::complex<double> VanVleckPropagator::operator()(Point2 x_final, Point2 x_initial) const {
  return (*this)(Eigen::Vector2d(x_final.x1, x_final.x2), Eigen::Vector2d(x_initial.x1, x_initial.x2));
}

std::complex<double> VanVleckPropagator::operator()(double q_final, double q_initial) const {
  return (*this)(Eigen::VectorXd::Constant(1, q_final), Eigen::VectorXd::Constant(1, q_initial));
}

QuadraticKernel VanVleckPropagator::quadratic_form() const {
  if (n_ != 2) throw InputError("quadratic form needs two degrees of freedom");
  return polarize(
      [this](const Eigen::Vector4d& z) {
        return trajectory(Eigen::Vector2d(z(0), z(1)), Eigen::Vector2d(z(2), z(3))).action / hbar_;
      },
      amplitude());
}

std::complex<double> van_vleck_kernel(const SystemSpec& spec, Point2 x_final, Point2 x_initial) {
  const VanVleckPropagator vv(LinearHamiltonian::from_system(spec), spec.interval.begin, spec.interval.end, spec.hbar);
  return vv(x_final, x_initial);
}

std::complex<double> van_vleck_kernel(const TimeFunction& omega_sq, const TimeFunction& force, double q_final,
                                      double q_initial, Interval interval, double hbar) {
  const VanVleckPropagator vv(LinearHamiltonian::single_mode(omega_sq, force), interval.begin, interval.end, hbar);
  return vv(q_final, q_initial);
}

}  // namespace tdho
