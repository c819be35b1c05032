#include <benchmark/benchmark.h>

#include "nlgeom/curvature.hpp"
#include "nlgeom/density.hpp"
#include "nlgeom/perimeter.hpp"
#include "nlgeom/sets.hpp"

using namespace nlgeom;

namespace {

Exec execOf(const benchmark::State& state) { return state.range(0) == 0 ? Exec::Serial : Exec::Parallel; }

QuadConfig wide(Exec e) {
  QuadConfig c;
  c.outerRadius = 1e12;
  c.kMax = 40;
  c.exec = e;
  return c;
}

RegionSet dust() {
  SparseDustParams p;
  p.dim = 2;
  p.target = 0.07;
  p.scale = 1.0 / 256.0;
  p.seed = 3;
  return sparseDust(p);
}

}  // namespace

static void BM_CurvaturePV(benchmark::State& state) {
  const RegionSet b = ball(Point{1.0, 0.0}, 1.0);
  const KernelSpec k = fractionalKernel(2, 0.5);
  const QuadConfig cfg = wide(execOf(state));
  for (auto _ : state) benchmark::DoNotOptimize(curvaturePV(b, k, Point(2), cfg).value);
}
BENCHMARK(BM_CurvaturePV)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

static void BM_TouchingBallSlab(benchmark::State& state) {
  const RegionSet e = periodicSlab(2, 0.1);
  const KernelSpec k = fractionalKernel(2, 0.5);
  const TouchingBall tb{Point{-0.05, 0.0}, 0.05, Point(2)};
  const QuadConfig cfg = wide(execOf(state));
  for (auto _ : state) benchmark::DoNotOptimize(curvatureViaTouchingBall(e, k, tb, cfg).value);
}
BENCHMARK(BM_TouchingBallSlab)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

static void BM_PerimeterK(benchmark::State& state) {
  const RegionSet e = ball(Point{0.2, 0.0}, 0.5);
  const KernelSpec k = fractionalKernel(2, 0.5);
  QuadConfig cfg;
  cfg.exec = execOf(state);
  for (auto _ : state) benchmark::DoNotOptimize(perimeterK(e, BallRegion{Point(2), 1.0}, k, cfg).value);
}
BENCHMARK(BM_PerimeterK)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

static void BM_VolumeFractionDust(benchmark::State& state) {
  const RegionSet e = dust();
  QuadConfig cfg;
  cfg.exec = execOf(state);
  for (auto _ : state) benchmark::DoNotOptimize(densityAt(e, e.anchor(), 0.25, cfg).value);
}
BENCHMARK(BM_VolumeFractionDust)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

// Grid scan for D_alpha: serial and parallel task kernel against the naive reference loop.
static void BM_SparsePointMeasure(benchmark::State& state) {
  const RegionSet e = ball(Point{0.3, 0.1}, 0.05);
  QuadConfig cfg;
  cfg.exec = execOf(state);
  for (auto _ : state) benchmark::DoNotOptimize(sparsePointMeasure(e, 4.0, 0.01, 4.0 / 512.0, cfg).sparsePoints);
}
BENCHMARK(BM_SparsePointMeasure)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

static void BM_SparsePointMeasureReference(benchmark::State& state) {
  const RegionSet e = ball(Point{0.3, 0.1}, 0.05);
  QuadConfig cfg;
  for (auto _ : state) {
    benchmark::DoNotOptimize(sparsePointMeasureReference(e, 4.0, 0.01, 4.0 / 512.0, cfg).sparsePoints);
  }
}
BENCHMARK(BM_SparsePointMeasureReference)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
