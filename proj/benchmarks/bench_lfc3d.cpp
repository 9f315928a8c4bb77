#include <cmath>

#include <benchmark/benchmark.h>

#include "lfc3d/cycle.hpp"
#include "lfc3d/lfc.hpp"
#include "lfc3d/ode.hpp"
#include "lfc3d/quad.hpp"
#include "lfc3d/spline.hpp"

using namespace lfc3d;

namespace {

PointSet unit_grid(int n) {
  PointSet pts;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) pts.emplace_back(double(i) / n, double(j) / n, 0.25);
  return pts;
}

PointGrid sample(int n) {
  PointGrid g(n, n);
  for (int i = 0; i <= n; ++i)
    for (int j = 0; j <= n; ++j) {
      const double u = double(i) / n, v = double(j) / n;
      g.at(i, j) = Vec3(std::sin(3 * u) * std::cos(2 * v), u + 0.1 * v * v, v + 0.2 * u * v);
    }
  return g;
}

}  // namespace

static void BM_FlowMap(benchmark::State& state) {
  const PresetCase c = make_preset("leveque-static");
  const PointSet pts = unit_grid(32);
  const int order = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(flow_map(c.velocity, pts, 0.0, 1.5, order, 1.5 / 64));
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(pts.size()));
}
BENCHMARK(BM_FlowMap)->Arg(2)->Arg(4)->Arg(6)->Unit(benchmark::kMillisecond);

static void BM_SplineFit(benchmark::State& state) {
  const PointGrid g = sample(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(fit_tensor_spline(g, 6));
}
BENCHMARK(BM_SplineFit)->Arg(32)->Arg(128)->Unit(benchmark::kMillisecond);

static void BM_SplineEval(benchmark::State& state) {
  const TensorSpline s = fit_tensor_spline(sample(64), static_cast<int>(state.range(0)));
  double u = 0.0;
  for (auto _ : state) {
    u += 0.618033988749895;
    if (u >= 1.0) u -= 1.0;
    benchmark::DoNotOptimize(s.eval(u, 1.0 - u));
  }
}
BENCHMARK(BM_SplineEval)->Arg(2)->Arg(4)->Arg(6);

static void BM_SurfaceQuadrature(benchmark::State& state) {
  const int kappa = static_cast<int>(state.range(0));
  const TensorSpline s = fit_tensor_spline(sample(64), kappa);
  const PresetCase c = make_preset("leveque-static");
  FluxCubatureSpec spec = FluxCubatureSpec::minimal(kappa, kappa);
  spec.analytic_inner = true;
  for (auto _ : state) benchmark::DoNotOptimize(surface_flux_quadrature(s, c.scalar, 0.0, spec));
}
BENCHMARK(BM_SurfaceQuadrature)->Arg(2)->Arg(4)->Arg(6)->Unit(benchmark::kMillisecond);

static void BM_LfcFlux(benchmark::State& state) {
  const PresetCase c = make_preset("leveque-static");
  const int n = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(lfc3d_flux(c, n, n, 6).value);
}
BENCHMARK(BM_LfcFlux)->Arg(16)->Arg(32)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
