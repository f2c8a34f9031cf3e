#pragma once

// Acceptance checks: each criterion compares the propagator against a closed form,
// an independent oracle, or one of its own exact properties.

#include <cstdint>
#include <string>
#include <vector>

#include "tdho/oracle.hpp"
#include "tdho/system.hpp"

namespace tdho {

namespace reference {

/// m_j = m_j e^{0.1 t} (m1=1, m2=2), w1=1, w2=2, lambda = 0.3 m1 m2 e^{0.1 t}, f1 = 0.2 sin t, f2 = 0, on [0, 2].
SystemSpec exponential_mass_system(double hbar = 1.0);
/// Unit masses, constant frequencies, no coupling or drive.
SystemSpec oscillator_pair(double w1, double w2, Interval interval, double hbar = 1.0);
/// Unit masses, w1=1, w2=2, lambda = sin t on [0, 2]; no constant rotation decouples it.
SystemSpec sinusoidal_coupling_system(double hbar = 1.0);
/// lambda = 0 with different time-dependent masses, frequencies and drives.
SystemSpec uncoupled_system(double hbar = 1.0);

}  // namespace reference

struct CriterionResult {
  int id = 0;
  std::string name;
  bool passed = false;
  double value = 0.0;      // measured error or residual
  double threshold = 0.0;  // pass iff value <= threshold (criterion 10: see detail)
  std::string detail;
  double seconds = 0.0;
};

struct VerifyOptions {
  Grid2D grid{256, 256, 12.0, 12.0};
  double dt = 1e-3;
  Grid2D semigroup_grid{128, 128, 8.0, 8.0};
  std::size_t random_points = 100;
  std::uint64_t seed = 20240601;
  double hbar = 1.0;
};

inline constexpr int kUnitarityCriterion = 11;

std::vector<int> all_criteria();
std::string criterion_name(int id);
CriterionResult run_criterion(int id, const VerifyOptions& options = {});
std::vector<CriterionResult> run_criteria(const std::vector<int>& ids, const VerifyOptions& options = {});

}  // namespace tdho
