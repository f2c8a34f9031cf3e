#include "tdho/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numbers>
#include <string>

#include <fftw3.h>
#include <Eigen/Core>

#include "tdho/errors.hpp"

namespace tdho {

namespace {

constexpr double kPi = std::numbers::pi;

bool power_of_two(std::size_t n) { return n >= 2 && (n & (n - 1)) == 0; }

// FFTW planning is not thread-safe.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

// In-place 2-D transform pair on a fixed buffer; FFTW_ESTIMATE keeps the plan
// (and therefore the rounding) identical from run to run.
class FftPair {
 public:
  FftPair(std::vector<std::complex<double>>& buffer, std::size_t n1, std::size_t n2) {
    auto* data = reinterpret_cast<fftw_complex*>(buffer.data());
    std::lock_guard lock(planner_mutex());
    forward_ = fftw_plan_dft_2d(static_cast<int>(n1), static_cast<int>(n2), data, data, FFTW_FORWARD, FFTW_ESTIMATE);
    backward_ = fftw_plan_dft_2d(static_cast<int>(n1), static_cast<int>(n2), data, data, FFTW_BACKWARD, FFTW_ESTIMATE);
    if (!forward_ || !backward_) throw NumericalError("FFTW could not create a plan");
  }
  FftPair(const FftPair&) = delete;
  FftPair& operator=(const FftPair&) = delete;
  ~FftPair() {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(forward_);
    fftw_destroy_plan(backward_);
  }

  void forward() const { fftw_execute(forward_); }
  void backward() const { fftw_execute(backward_); }

 private:
  fftw_plan forward_ = nullptr;
  fftw_plan backward_ = nullptr;
};

std::vector<double> wavenumbers(std::size_t n, double half_width) {
  std::vector<double> k(n);
  const double dk = kPi / half_width;
  for (std::size_t j = 0; j < n; ++j) {
    const auto sj = static_cast<double>(j);
    k[j] = (j < n / 2 ? sj : sj - static_cast<double>(n)) * dk;
  }
  return k;
}

void require_same_grid(const Wavefunction2D& a, const Wavefunction2D& b) {
  if (!(a.grid == b.grid) || a.values.size() != b.values.size()) throw InputError("wavefunctions live on different grids");
}

bool in_band(std::size_t i, std::size_t lo_count, std::size_t hi_start) { return i < lo_count || i >= hi_start; }

// Population in the outer `cells` rows/columns of the position grid.
double edge_population_position(const Wavefunction2D& psi, std::size_t cells) {
  const Grid2D& g = psi.grid;
  double p = 0.0;
  for (std::size_t i = 0; i < g.n1; ++i)
    for (std::size_t j = 0; j < g.n2; ++j)
      if (in_band(i, cells, g.n1 - cells) || in_band(j, cells, g.n2 - cells)) p += std::norm(psi.at(i, j));
  return p * g.dx1() * g.dx2();
}

// Fraction of the spectrum within `cells` bins of the Nyquist wavenumber.
double edge_population_momentum(const std::vector<std::complex<double>>& spec, const Grid2D& g, std::size_t cells) {
  double edge = 0.0, total = 0.0;
  auto near_nyquist = [cells](std::size_t i, std::size_t n) {
    const std::size_t d = i > n / 2 ? i - n / 2 : n / 2 - i;
    return d < cells;
  };
  for (std::size_t i = 0; i < g.n1; ++i)
    for (std::size_t j = 0; j < g.n2; ++j) {
      const double a = std::norm(spec[i * g.n2 + j]);
      total += a;
      if (near_nyquist(i, g.n1) || near_nyquist(j, g.n2)) edge += a;
    }
  return total > 0.0 ? edge / total : 0.0;
}

}  // namespace

void Grid2D::validate() const {
  if (!power_of_two(n1) || !power_of_two(n2)) throw InputError("grid sizes must be powers of two");
  if (!(half_width1 > 0.0) || !(half_width2 > 0.0)) throw InputError("grid extents must be positive");
}

double Wavefunction2D::norm() const {
  double s = 0.0;
  for (const auto& v : values) s += std::norm(v);
  return std::sqrt(s * grid.dx1() * grid.dx2());
}

Wavefunction2D gaussian(const Grid2D& grid, const GaussianParams& params, double hbar, double time) {
  grid.validate();
  if (!(params.width.x1 > 0.0) || !(params.width.x2 > 0.0)) throw InputError("Gaussian widths must be positive");
  Wavefunction2D psi;
  psi.grid = grid;
  psi.time = time;
  psi.values.resize(grid.size());
  auto axis = [hbar](double x, double c, double s, double p) {
    const double n = std::pow(2 * kPi * s * s, -0.25);
    return n * std::exp(std::complex<double>(-(x - c) * (x - c) / (4 * s * s), p * x / hbar));
  };
  std::vector<std::complex<double>> a(grid.n1), b(grid.n2);
  for (std::size_t i = 0; i < grid.n1; ++i) a[i] = axis(grid.x1(i), params.center.x1, params.width.x1, params.momentum.x1);
  for (std::size_t j = 0; j < grid.n2; ++j) b[j] = axis(grid.x2(j), params.center.x2, params.width.x2, params.momentum.x2);
  for (std::size_t i = 0; i < grid.n1; ++i)
    for (std::size_t j = 0; j < grid.n2; ++j) psi.at(i, j) = a[i] * b[j];
  return psi;
}

double l2_distance(const Wavefunction2D& a, const Wavefunction2D& b) {
  require_same_grid(a, b);
  double s = 0.0;
  for (std::size_t k = 0; k < a.values.size(); ++k) s += std::norm(a.values[k] - b.values[k]);
  return std::sqrt(s * a.grid.dx1() * a.grid.dx2());
}

double linf_distance(const Wavefunction2D& a, const Wavefunction2D& b) {
  require_same_grid(a, b);
  double m = 0.0;
  for (std::size_t k = 0; k < a.values.size(); ++k) m = std::max(m, std::abs(a.values[k] - b.values[k]));
  return m;
}

std::complex<double> overlap(const Wavefunction2D& a, const Wavefunction2D& b) {
  require_same_grid(a, b);
  std::complex<double> s = 0.0;
  for (std::size_t k = 0; k < a.values.size(); ++k) s += std::conj(a.values[k]) * b.values[k];
  return s * (a.grid.dx1() * a.grid.dx2());
}

Wavefunction2D split_step_evolve(const Wavefunction2D& psi, const SystemSpec& spec, double t_final,
                                 const SplitStepOptions& options, SplitStepReport* report) {
  const Grid2D& g = psi.grid;
  g.validate();
  if (psi.values.size() != g.size()) throw InputError("wavefunction size does not match its grid");
  if (!(options.dt > 0.0)) throw InputError("time step must be positive");
  const double span = t_final - psi.time;
  if (span < 0.0) throw InputError("split-step evolution runs forward in time only");
  const auto steps = static_cast<std::size_t>(std::ceil(span / options.dt - 1e-9));
  const double dt = steps ? span / static_cast<double>(steps) : 0.0;
  const double hbar = spec.hbar;

  Wavefunction2D out = psi;
  FftPair fft(out.values, g.n1, g.n2);
  const std::vector<double> k1 = wavenumbers(g.n1, g.half_width1), k2 = wavenumbers(g.n2, g.half_width2);
  std::vector<double> x1(g.n1), x2(g.n2);
  for (std::size_t i = 0; i < g.n1; ++i) x1[i] = g.x1(i);
  for (std::size_t j = 0; j < g.n2; ++j) x2[j] = g.x2(j);
  std::vector<std::complex<double>> kin1(g.n1), kin2(g.n2), pot1(g.n1), pot2(g.n2);
  const double inv_n = 1.0 / static_cast<double>(g.size());

  auto position_check = [&] {
    const double p = edge_population_position(out, options.edge_cells);
    if (p > options.edge_population)
      throw GridTooCoarse("wavefunction reaches the position-grid edge (population " + std::to_string(p) + ")");
  };
  auto momentum_check = [&] {
    const double q = edge_population_momentum(out.values, g, options.edge_cells);
    if (q > options.edge_population)
      throw GridTooCoarse("wavefunction reaches the momentum-grid edge (population " + std::to_string(q) + ")");
  };

  SplitStepReport rep;
  rep.steps = steps;
  rep.dt = dt;
  const double norm0 = psi.norm();
  double prev_norm = norm0;
  for (std::size_t n = 0; n < steps; ++n) {
    const double tm = psi.time + (static_cast<double>(n) + 0.5) * dt;
    double a[2], b[2];
    for (std::size_t j = 0; j < 2; ++j) {
      const auto& o = spec.oscillators[j];
      const double m = o.mass.eval(tm), w = o.frequency.eval(tm);
      a[j] = 0.5 * m * w * w;
      b[j] = -m * o.drive.eval(tm);
      const auto& k = j == 0 ? k1 : k2;
      auto& kin = j == 0 ? kin1 : kin2;
      for (std::size_t i = 0; i < k.size(); ++i) kin[i] = std::polar(1.0, -dt * hbar * k[i] * k[i] / (2 * m));
    }
    const double lam = spec.coupling.eval(tm);
    const double half = dt / (2 * hbar);
    for (std::size_t i = 0; i < g.n1; ++i) pot1[i] = std::polar(1.0, -half * (a[0] * x1[i] * x1[i] + b[0] * x1[i]));
    for (std::size_t j = 0; j < g.n2; ++j) pot2[j] = std::polar(1.0, -half * (a[1] * x2[j] * x2[j] + b[1] * x2[j]));

    auto potential = [&] {
      for (std::size_t i = 0; i < g.n1; ++i) {
        const double c = -half * lam * x1[i];
        for (std::size_t j = 0; j < g.n2; ++j) out.at(i, j) *= pot1[i] * pot2[j] * std::polar(1.0, c * x2[j]);
      }
    };
    potential();
    fft.forward();
    for (std::size_t i = 0; i < g.n1; ++i)
      for (std::size_t j = 0; j < g.n2; ++j) out.values[i * g.n2 + j] *= kin1[i] * kin2[j] * inv_n;
    const bool check = (n + 1) % options.check_every == 0 || n + 1 == steps;
    if (check) momentum_check();
    fft.backward();
    potential();
    if (check) position_check();

    const double nn = out.norm();
    rep.max_norm_drift_per_step = std::max(rep.max_norm_drift_per_step, std::abs(nn - prev_norm));
    prev_norm = nn;
  }
  out.time = t_final;
  rep.norm_drift = std::abs(out.norm() - norm0);
  if (report) *report = rep;
  return out;
}

namespace {

using Cd = std::complex<double>;

constexpr double kSupportCutoff = 1e-10;   // relative |psi| and |psi^| below which samples are dropped
constexpr double kNyquistMargin = 1.25;
constexpr std::size_t kMaxRefinedSize = std::size_t{1} << 24;

// Index range [lo, hi] of samples with |v| above the cutoff along each axis.
struct Box {
  std::size_t lo1, hi1, lo2, hi2;
};

Box support(const std::vector<Cd>& v, std::size_t n1, std::size_t n2) {
  double peak = 0.0;
  for (const Cd& z : v) peak = std::max(peak, std::abs(z));
  Box b{n1, 0, n2, 0};
  for (std::size_t i = 0; i < n1; ++i)
    for (std::size_t j = 0; j < n2; ++j)
      if (std::abs(v[i * n2 + j]) > kSupportCutoff * peak) {
        b.lo1 = std::min(b.lo1, i);
        b.hi1 = std::max(b.hi1, i);
        b.lo2 = std::min(b.lo2, j);
        b.hi2 = std::max(b.hi2, j);
      }
  if (b.lo1 > b.hi1) b = {0, 0, 0, 0};
  return b;
}

std::size_t spectral_index(std::size_t j, std::size_t n, std::size_t m) { return j < n / 2 ? j : j + (m - n); }

// Sum over the source points (ys1 x ys2, row-major values w already weighted) of
// exp(i q(x'', x')) on the target grid.
Wavefunction2D kernel_sum(const std::vector<double>& ys1, const std::vector<double>& ys2, const std::vector<Cd>& values,
                          const QuadraticKernel& kernel, double cell, double t_final, const Grid2D& target) {
  using Mat = Eigen::Matrix<Cd, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  const Eigen::Matrix4d& h = kernel.hessian;
  const Eigen::Vector4d& gr = kernel.gradient;
  const std::size_t n1 = ys1.size(), n2 = ys2.size(), m1 = target.n1, m2 = target.n2;
  auto idx = [](std::size_t i) { return static_cast<Eigen::Index>(i); };

  // q = q_out(x1'', x2'') + q_in(x1', x2') + x1''(h13 x1' + h14 x2') + x2''(h23 x1' + h24 x2')
  Mat w(n1, n2);
  for (std::size_t c = 0; c < n1; ++c)
    for (std::size_t d = 0; d < n2; ++d) {
      const double y1 = ys1[c], y2 = ys2[d];
      const double q_in = 0.5 * (h(2, 2) * y1 * y1 + 2 * h(2, 3) * y1 * y2 + h(3, 3) * y2 * y2) + gr(2) * y1 + gr(3) * y2;
      w(idx(c), idx(d)) = values[c * n2 + d] * std::polar(1.0, q_in);
    }
  // e(b, c) = exp(i x2''_b h23 x1'_c), f(b, d) = exp(i x2''_b h24 x2'_d)
  Mat e(m2, n1), f(m2, n2);
  for (std::size_t b = 0; b < m2; ++b) {
    const double z2 = target.x2(b);
    for (std::size_t c = 0; c < n1; ++c) e(idx(b), idx(c)) = std::polar(1.0, z2 * h(1, 2) * ys1[c]);
    for (std::size_t d = 0; d < n2; ++d) f(idx(b), idx(d)) = std::polar(1.0, z2 * h(1, 3) * ys2[d]);
  }
  const Cd weight = kernel.amplitude * std::polar(1.0, kernel.offset) * cell;

  Wavefunction2D out;
  out.grid = target;
  out.time = t_final;
  out.values.assign(target.size(), Cd(0.0));
#pragma omp parallel
  {
    Mat wa(n1, n2), prod(m2, n1);
    std::vector<Cd> rd(n2);
#pragma omp for schedule(static)
    for (std::ptrdiff_t ia = 0; ia < static_cast<std::ptrdiff_t>(m1); ++ia) {
      const auto a = static_cast<std::size_t>(ia);
      const double z1 = target.x1(a);
      for (std::size_t d = 0; d < n2; ++d) rd[d] = std::polar(1.0, z1 * h(0, 3) * ys2[d]);
      for (std::size_t c = 0; c < n1; ++c) {
        const Cd rc = std::polar(1.0, z1 * h(0, 2) * ys1[c]);
        for (std::size_t d = 0; d < n2; ++d) wa(idx(c), idx(d)) = w(idx(c), idx(d)) * rc * rd[d];
      }
      // prod(b, c) = sum_d f(b, d) wa(c, d)
      prod.noalias() = f * wa.transpose();
      for (std::size_t b = 0; b < m2; ++b) {
        const Cd s = (e.row(idx(b)).array() * prod.row(idx(b)).array()).sum();
        const double z2 = target.x2(b);
        const double q_out = 0.5 * (h(0, 0) * z1 * z1 + 2 * h(0, 1) * z1 * z2 + h(1, 1) * z2 * z2) + gr(0) * z1 + gr(1) * z2;
        out.values[a * m2 + b] = weight * std::polar(1.0, q_out) * s;
      }
    }
  }
  return out;
}

}  // namespace

Wavefunction2D propagate_with_kernel(const Wavefunction2D& psi, const QuadraticKernel& kernel, double t_final,
                                     const Grid2D& target) {
  const Grid2D& g = psi.grid;
  g.validate();
  target.validate();
  if (psi.values.size() != g.size()) throw InputError("wavefunction size does not match its grid");
  const Eigen::Matrix4d& h = kernel.hessian;
  const Eigen::Vector4d& gr = kernel.gradient;
  const std::size_t n1 = g.n1, n2 = g.n2;

  // The integrand oscillates with d q / d x' on top of the bandwidth of psi.  Its
  // trapezoidal sum aliases unless the source spacing resolves both, so psi is
  // interpolated trigonometrically onto a refined source grid when needed.
  std::vector<Cd> spec = psi.values;
  {
    FftPair fft(spec, n1, n2);
    fft.forward();
  }
  double peak_k = 0.0;
  for (const Cd& z : spec) peak_k = std::max(peak_k, std::abs(z));
  const std::vector<double> k1 = wavenumbers(n1, g.half_width1), k2 = wavenumbers(n2, g.half_width2);
  double band1 = 0.0, band2 = 0.0;
  for (std::size_t i = 0; i < n1; ++i)
    for (std::size_t j = 0; j < n2; ++j)
      if (std::abs(spec[i * n2 + j]) > kSupportCutoff * peak_k) {
        band1 = std::max(band1, std::abs(k1[i]));
        band2 = std::max(band2, std::abs(k2[j]));
      }

  const Box box = support(psi.values, n1, n2);
  const double z1max = std::max(std::abs(target.x1(0)), std::abs(target.x1(target.n1 - 1)));
  const double z2max = std::max(std::abs(target.x2(0)), std::abs(target.x2(target.n2 - 1)));
  const double y1max = std::max(std::abs(g.x1(box.lo1)), std::abs(g.x1(box.hi1)));
  const double y2max = std::max(std::abs(g.x2(box.lo2)), std::abs(g.x2(box.hi2)));
  auto gradient_bound = [&](int row) {
    return std::abs(gr(row)) + std::abs(h(row, 0)) * z1max + std::abs(h(row, 1)) * z2max + std::abs(h(row, 2)) * y1max +
           std::abs(h(row, 3)) * y2max;
  };
  auto factor = [](double needed, double dx) {
    std::size_t r = 1;
    while (kPi * static_cast<double>(r) / dx < kNyquistMargin * needed) r *= 2;
    return r;
  };
  const std::size_t r1 = factor(gradient_bound(2) + band1, g.dx1());
  const std::size_t r2 = factor(gradient_bound(3) + band2, g.dx2());
  const std::size_t f1 = n1 * r1, f2 = n2 * r2;
  if (f1 > kMaxRefinedSize / f2)
    throw NumericalError("kernel quadrature needs a " + std::to_string(f1) + " x " + std::to_string(f2) +
                         " source grid to resolve the kernel phase");

  Grid2D fine{f1, f2, g.half_width1, g.half_width2};
  std::vector<Cd> refined;
  if (r1 == 1 && r2 == 1) {
    refined = psi.values;
  } else {
    refined.assign(fine.size(), Cd(0.0));
    const double norm = 1.0 / static_cast<double>(n1 * n2);
    for (std::size_t i = 0; i < n1; ++i)
      for (std::size_t j = 0; j < n2; ++j)
        refined[spectral_index(i, n1, f1) * f2 + spectral_index(j, n2, f2)] = spec[i * n2 + j] * norm;
    FftPair fft(refined, f1, f2);
    fft.backward();
  }

  // Crop to the support of psi, widened by one coarse cell.
  const std::size_t lo1 = box.lo1 > 0 ? (box.lo1 - 1) * r1 : 0, hi1 = std::min(f1, (box.hi1 + 2) * r1);
  const std::size_t lo2 = box.lo2 > 0 ? (box.lo2 - 1) * r2 : 0, hi2 = std::min(f2, (box.hi2 + 2) * r2);
  std::vector<double> ys1, ys2;
  for (std::size_t i = lo1; i < hi1; ++i) ys1.push_back(fine.x1(i));
  for (std::size_t j = lo2; j < hi2; ++j) ys2.push_back(fine.x2(j));
  std::vector<Cd> values;
  values.reserve(ys1.size() * ys2.size());
  for (std::size_t i = lo1; i < hi1; ++i)
    for (std::size_t j = lo2; j < hi2; ++j) values.push_back(refined[i * f2 + j]);
  return kernel_sum(ys1, ys2, values, kernel, fine.dx1() * fine.dx2(), t_final, target);
}

Wavefunction2D propagate_with_kernel(const Wavefunction2D& psi, const QuadraticKernel& kernel, double t_final) {
  return propagate_with_kernel(psi, kernel, t_final, psi.grid);
}

Wavefunction2D propagate_with_kernel(const Wavefunction2D& psi, const KernelGrid& kernel, double t_final) {
  const Grid2D& g = psi.grid;
  const EndpointGrid& e = kernel.endpoints;
  auto matches = [](const std::vector<double>& xs, std::size_t n, auto coord) {
    if (xs.size() != n) return false;
    for (std::size_t i = 0; i < n; ++i)
      if (std::abs(xs[i] - coord(i)) > 1e-12 * std::max(1.0, std::abs(xs[i]))) return false;
    return true;
  };
  if (!matches(e.x1_initial, g.n1, [&](std::size_t i) { return g.x1(i); }) ||
      !matches(e.x2_initial, g.n2, [&](std::size_t i) { return g.x2(i); }))
    throw InputError("kernel grid extent does not match the wavefunction grid");
  if (std::any_of(kernel.caustic.begin(), kernel.caustic.end(), [](std::uint8_t c) { return c != 0; }))
    throw InputError("kernel grid contains caustic points");
  if (e.x1_final.size() < 2 || e.x2_final.size() < 2) throw InputError("kernel grid needs at least two final points per axis");

  Wavefunction2D out;
  out.grid.n1 = e.x1_final.size();
  out.grid.n2 = e.x2_final.size();
  out.grid.half_width1 = -e.x1_final.front();
  out.grid.half_width2 = -e.x2_final.front();
  out.time = t_final;
  out.values.assign(out.grid.size(), 0.0);
  const std::size_t in = g.size();
  const double w = g.dx1() * g.dx2();
  for (std::size_t r = 0; r < out.values.size(); ++r) {
    std::complex<double> s = 0.0;
    for (std::size_t k = 0; k < in; ++k) s += kernel.values[r * in + k].value * psi.values[k];
    out.values[r] = s * w;
  }
  return out;
}

}  // namespace tdho
