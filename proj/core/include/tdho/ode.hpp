#pragma once

// Adaptive Dormand-Prince 5(4) integrator with continuous (dense) output.

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace tdho {

struct OdeOptions {
  double rtol = 1e-10;
  double atol = 1e-12;
  double initial_step = 0.0;  // 0 selects a step automatically
  std::size_t max_steps = 2'000'000;
};

struct StepStats {
  std::size_t accepted = 0;
  std::size_t rejected = 0;
  std::size_t evaluations = 0;
  double min_step = 0.0;
  double max_step = 0.0;
};

using OdeRhs = std::function<void(double t, std::span<const double> y, std::span<double> dydt)>;

/// Solution of an initial value problem with fourth-order dense output between
/// accepted steps.  The integration may run backwards (t_end < t_begin).
class DenseTrajectory {
 public:
  std::size_t dimension() const { return dim_; }
  double t_begin() const { return times_.front(); }
  double t_end() const { return times_.back(); }

  void state(double t, std::span<double> out) const;
  std::vector<double> state(double t) const;

  /// Accepted step boundaries, t_begin first.
  const std::vector<double>& node_times() const { return times_; }
  std::span<const double> node_state(std::size_t k) const;

  const StepStats& stats() const { return stats_; }

 private:
  friend DenseTrajectory integrate(const OdeRhs&, double, std::span<const double>, double, const OdeOptions&);

  std::size_t dim_ = 0;
  std::vector<double> times_;
  std::vector<double> coeffs_;  // 5 * dim_ per step
  std::vector<double> final_state_;
  StepStats stats_;
};

DenseTrajectory integrate(const OdeRhs& rhs, double t0, std::span<const double> y0, double t1,
                          const OdeOptions& options = {});

}  // namespace tdho
