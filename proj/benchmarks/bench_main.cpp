#include <benchmark/benchmark.h>

#include "fracsko/chaos_solver.hpp"
#include "fracsko/fractional_operators.hpp"
#include "fracsko/gaussian_fields.hpp"
#include "fracsko/special_functions.hpp"

using namespace fracsko;

static void BM_FactorCovariance(benchmark::State& st) {
  const TimeGrid g(static_cast<int>(st.range(0)), 1.0);
  for (auto _ : st) benchmark::DoNotOptimize(factor_covariance(0.3, g));
}
BENCHMARK(BM_FactorCovariance)->Arg(64)->Arg(256);

static void BM_SampleFbm(benchmark::State& st) {
  const CovarianceFactor f = factor_covariance(0.3, TimeGrid(static_cast<int>(st.range(0)), 1.0));
  std::uint64_t r = 0;
  for (auto _ : st) benchmark::DoNotOptimize(sample_fbm(f, {1, r++}));
}
BENCHMARK(BM_SampleFbm)->Arg(64)->Arg(256);

static void BM_SampleSheet(benchmark::State& st) {
  const SheetFactor f = factor_sheet(0.7, 0.4, Grid2D(16, 16, 3.0));
  std::uint64_t r = 0;
  for (auto _ : st) benchmark::DoNotOptimize(sample_sheet(f, {1, r++}));
}
BENCHMARK(BM_SampleSheet);

static void BM_VolterraKernel(benchmark::State& st) {
  const VolterraKernelSpec spec = make_kernel_spec(0.3);
  double s = 0.01;
  for (auto _ : st) {
    benchmark::DoNotOptimize(volterra_kernel(spec, 1.0, s));
    s = s > 0.98 ? 0.01 : s + 0.013;
  }
}
BENCHMARK(BM_VolterraKernel);

static void BM_H0(benchmark::State& st) {
  double x = -10.0;
  for (auto _ : st) {
    benchmark::DoNotOptimize(h0(x));
    x = x > 10.0 ? -10.0 : x + 0.37;
  }
}
BENCHMARK(BM_H0);

static void BM_KStarInner(benchmark::State& st) {
  const TimeGrid g(10, 1.0);
  KStarOptions opt;
  opt.interp = Interpolation::step;
  for (auto _ : st) benchmark::DoNotOptimize(kstar_l2_norm_sq(indicator(g, 0.5), 0.25, opt));
}
BENCHMARK(BM_KStarInner)->Unit(benchmark::kMillisecond);

static void BM_SheetChaosSolve(benchmark::State& st) {
  ModelParams p;
  p.hurst.alpha = 0.7;
  p.hurst.beta = 0.4;
  p.a = 0.05;
  p.b = -1.0;
  p.T = 3.0;
  const Grid2D g(16, 16, 3.0);
  const SheetChaosSolver solver(p, g, static_cast<int>(st.range(0)));
  const SheetFactor f = factor_sheet(0.7, 0.4, g);
  std::uint64_t r = 0;
  for (auto _ : st) benchmark::DoNotOptimize(solver.solve(sample_sheet(f, {2, r++})));
}
BENCHMARK(BM_SheetChaosSolve)->Arg(2)->Arg(3)->Unit(benchmark::kMillisecond);

static void BM_Picard(benchmark::State& st) {
  const Grid2D g(64, 64, 2.0);
  for (auto _ : st) benchmark::DoNotOptimize(picard_sheet(1.0, g));
}
BENCHMARK(BM_Picard)->Unit(benchmark::kMillisecond);
