#include <benchmark/benchmark.h>

#include "tdho/ermakov.hpp"
#include "tdho/kernel.hpp"
#include "tdho/oracle.hpp"
#include "tdho/system.hpp"
#include "tdho/timefn.hpp"
#include "tdho/van_vleck.hpp"
#include "tdho/verify.hpp"

namespace {

void BM_ParseAndEvaluate(benchmark::State& state) {
  const tdho::TimeFunction f = tdho::parse("2*exp(0.1*t) + 0.3*sin(2*t + 0.5) + t^2");
  double t = 0.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(f.eval(t));
    t += 1e-3;
  }
}
BENCHMARK(BM_ParseAndEvaluate);

void BM_Decoupling(benchmark::State& state) {
  const tdho::SystemSpec spec = tdho::reference::exponential_mass_system();
  for (auto _ : state) benchmark::DoNotOptimize(tdho::find_decoupling_angle(spec).alpha);
}
BENCHMARK(BM_Decoupling)->Unit(benchmark::kMillisecond);

void BM_ErmakovSolve(benchmark::State& state) {
  const tdho::TimeFunction omega_sq = tdho::parse("1 + 0.5*sin(t)");
  const double T = static_cast<double>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(tdho::solve_ermakov(omega_sq, 1.0, {0.0, T}).total_phase());
}
BENCHMARK(BM_ErmakovSolve)->Arg(1)->Arg(4)->Arg(16)->Unit(benchmark::kMicrosecond);

void BM_ModeKernelSetup(benchmark::State& state) {
  const tdho::ErmakovSolution sol = tdho::solve_ermakov(1.0, 1.0, {0.0, 2.0});
  const tdho::TimeFunction force = tdho::parse("sin(t)");
  for (auto _ : state) benchmark::DoNotOptimize(tdho::ModeKernel(sol, force, 1.0).magnitude());
}
BENCHMARK(BM_ModeKernelSetup)->Unit(benchmark::kMillisecond);

void BM_FullKernelPoint(benchmark::State& state) {
  const tdho::SystemSpec spec = tdho::reference::exponential_mass_system();
  const tdho::DecoupledSystem dec = tdho::find_decoupling_angle(spec);
  const tdho::SystemKernel k(spec, dec, tdho::solve_modes(dec, spec.interval));
  double x = 0.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(k({x, 0.3}, {-0.2, 0.7}).value);
    x += 1e-6;
  }
}
BENCHMARK(BM_FullKernelPoint);

void BM_VanVleckPoint(benchmark::State& state) {
  const tdho::SystemSpec spec = tdho::reference::exponential_mass_system();
  const tdho::VanVleckPropagator vv(tdho::LinearHamiltonian::from_system(spec), 0.0, 2.0);
  for (auto _ : state) benchmark::DoNotOptimize(vv(tdho::Point2{0.4, 0.3}, tdho::Point2{-0.2, 0.7}));
}
BENCHMARK(BM_VanVleckPoint)->Unit(benchmark::kMicrosecond);

void BM_SplitStep(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const tdho::SystemSpec spec = tdho::reference::exponential_mass_system();
  const tdho::Grid2D g{n, n, 12.0, 12.0};
  const tdho::Wavefunction2D psi = tdho::gaussian(g, {{1.0, -0.5}, {0.7, 0.35}, {0.5, 0.0}});
  tdho::SplitStepOptions opts;
  for (auto _ : state) benchmark::DoNotOptimize(tdho::split_step_evolve(psi, spec, 0.1, opts).values.data());
  state.SetItemsProcessed(state.iterations() * 100);
}
BENCHMARK(BM_SplitStep)->Arg(128)->Arg(256)->Unit(benchmark::kMillisecond);

void BM_KernelQuadrature(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const tdho::SystemSpec spec = tdho::reference::exponential_mass_system();
  const tdho::DecoupledSystem dec = tdho::find_decoupling_angle(spec);
  const tdho::QuadraticKernel q = tdho::SystemKernel(spec, dec, tdho::solve_modes(dec, spec.interval)).quadratic_form();
  const tdho::Grid2D g{n, n, 8.0, 8.0};
  const tdho::Wavefunction2D psi = tdho::gaussian(g, {{1.0, -0.5}, {0.7, 0.35}, {0.5, 0.0}});
  for (auto _ : state) benchmark::DoNotOptimize(tdho::propagate_with_kernel(psi, q, 2.0).values.data());
}
BENCHMARK(BM_KernelQuadrature)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
