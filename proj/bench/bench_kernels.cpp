// Serial reference kernels against the OpenMP versions.
#include <benchmark/benchmark.h>

#include <cmath>
#include <numbers>

#include "esf/cascade.hpp"
#include "esf/operators.hpp"
#include "esf/properties.hpp"
#include "esf/spectral.hpp"

using namespace esf;

namespace {

struct Setup {
  SpectralProfile p;
  RefinementCoefficients c;
  LatticeGrid coarse;  // level 4, input to one refine step
  LatticeGrid fine;    // level 5, input to the stencil
  DifferenceStencil st;
};

// A4 = 2I at m = 2: the largest of the fixture grids
const Setup& setup() {
  static const Setup s = [] {
    Setup x;
    SpectralOptions o;
    o.estimate_B = false;
    x.p = make_profile(IntMatrix{{2, 0}, {0, 2}}, 2, o);
    x.c = order_m_coefficients(x.p.A, x.p.m0, 2);
    x.coarse = run_cascade(x.p.A, x.c, 4).grid;
    x.fine = refine(x.p.A, x.c, x.coarse);
    x.st = build_stencil(x.p.Q2);
    return x;
  }();
  return s;
}

void BM_refine_parallel(benchmark::State& state) {
  const auto& s = setup();
  for (auto _ : state) benchmark::DoNotOptimize(refine(s.p.A, s.c, s.coarse));
  state.counters["points"] = static_cast<double>(s.fine.values.size());
}

void BM_refine_reference(benchmark::State& state) {
  const auto& s = setup();
  for (auto _ : state) benchmark::DoNotOptimize(reference::refine(s.p.A, s.c, s.coarse));
  state.counters["points"] = static_cast<double>(s.fine.values.size());
}

void BM_stencil_parallel(benchmark::State& state) {
  const auto& s = setup();
  for (auto _ : state) benchmark::DoNotOptimize(apply_stencil(s.st, s.fine, 2));
}

void BM_stencil_reference(benchmark::State& state) {
  const auto& s = setup();
  for (auto _ : state) benchmark::DoNotOptimize(reference::apply_stencil(s.st, s.fine, 2));
}

void BM_phi_hat_grid_parallel(benchmark::State& state) {
  const auto& s = setup();
  const auto n = static_cast<int>(state.range(0));
  for (auto _ : state)
    benchmark::DoNotOptimize(sample_grid(2, n, -6 * std::numbers::pi, 6 * std::numbers::pi,
                                         [&](std::span<const double> xi) { return phi_hat(s.p, xi, 1e-9); }));
}

void BM_phi_hat_grid_reference(benchmark::State& state) {
  const auto& s = setup();
  const auto n = static_cast<int>(state.range(0));
  for (auto _ : state)
    benchmark::DoNotOptimize(reference::sample_grid(2, n, -6 * std::numbers::pi, 6 * std::numbers::pi,
                                                    [&](std::span<const double> xi) { return phi_hat(s.p, xi, 1e-9); }));
}

// lattice convolution over seeded target points (parallel over points)
void BM_convolution(benchmark::State& state) {
  const auto& s = setup();
  for (auto _ : state) benchmark::DoNotOptimize(check_convolution(s.p, 1, 1, 5, static_cast<int>(state.range(0)), 1));
}

}  // namespace

BENCHMARK(BM_refine_parallel)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_refine_reference)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_stencil_parallel)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_stencil_reference)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_phi_hat_grid_parallel)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_phi_hat_grid_reference)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_convolution)->Arg(128)->Arg(512)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
