#include "lfc3d/cycle.hpp"

#include <cmath>
#include <string>
#include <vector>

#include "lfc3d/error.hpp"
#include "lfc3d/ode.hpp"
#include "lfc3d/parallel.hpp"

namespace lfc3d {

namespace {

int interval_count(double length, double step, const char* what) {
  if (!(step > 0.0) || !std::isfinite(step)) {
    throw ArgumentError(std::string(what) + " must be positive and finite");
  }
  const double ratio = length / step;
  if (ratio > 1e6) throw ArgumentError(std::string(what) + " is too small");
  return std::max(1, static_cast<int>(std::ceil(ratio * (1.0 - 1e-9))));
}

}  // namespace

GeneratingCycleMesh build_generating_cycle(const VelocityField& u, const MovingSurface& surface,
                                           double t0, double te, double h, double dt, int kappa) {
  if (kappa != 2 && kappa != 4 && kappa != 6) {
    throw ArgumentError("kappa must be 2, 4 or 6 (got " + std::to_string(kappa) + ")");
  }
  if (!(te > t0)) throw ArgumentError("generating cycle needs te > t0");
  if (!(dt > 0.0)) throw ArgumentError("generating cycle needs (te - t0) * dt > 0");
  const int n = interval_count(1.0, h, "spatial spacing h");
  const int m = interval_count(te - t0, dt, "time step dt");
  const double step = (te - t0) / m;
  const Integrator& scheme = Integrator::of_order(kappa);

  GeneratingCycleMesh mesh;
  mesh.meta = {t0, te, 1.0 / n, step, kappa, n, m};
  auto param = [n](int i) { return static_cast<double>(i) / n; };
  auto seed_time = [&](int j) { return j == m ? te : t0 + j * step; };

  PointGrid p1(n, n), p2(n, n);
  for (int i = 0; i <= n; ++i) {
    for (int j = 0; j <= n; ++j) {
      p1.at(i, j) = surface(param(i), param(j), t0);
      p2.at(i, j) = surface(param(i), param(j), te);
    }
  }
  parallel_for(static_cast<std::ptrdiff_t>(p2.points.size()), [&](std::ptrdiff_t k) {
    p2.points[k] = flow_point(u, p2.points[k], te, t0, scheme, m);
  });

  // Streak seeds: edge e, spatial index i, temporal index j.
  std::array<PointGrid, 4> streak;
  for (auto& g : streak) g = PointGrid(n, m);
  for (int j = 0; j <= m; ++j) {
    const double t = seed_time(j);
    for (int i = 0; i <= n; ++i) {
      streak[0].at(i, j) = surface(0.0, param(i), t);
      streak[1].at(i, j) = surface(param(i), 1.0, t);
      streak[2].at(i, j) = surface(1.0, param(n - i), t);
      streak[3].at(i, j) = surface(param(n - i), 0.0, t);
    }
  }
  const std::ptrdiff_t per_edge = static_cast<std::ptrdiff_t>(n + 1) * (m + 1);
  parallel_for(4 * per_edge, [&](std::ptrdiff_t k) {
    const int e = static_cast<int>(k / per_edge);
    const std::ptrdiff_t r = k % per_edge;
    const int j = static_cast<int>(r % (m + 1));
    if (j == 0) return;
    Vec3& p = streak[e].points[r];
    p = flow_point(u, p, seed_time(j), t0, scheme, j);
  });

  mesh.knots = {std::move(p1), std::move(p2), std::move(streak[0]), std::move(streak[1]),
                std::move(streak[2]), std::move(streak[3])};
  parallel_for(6, [&](std::ptrdiff_t i) {
    mesh.patches[i] = fit_tensor_spline(mesh.knots[i], kappa);
  });
  return mesh;
}

Vec3 composite_map(const VelocityField& u, const MovingSurface& surface, double t0, double te,
                   double z1, double z2, double tau, int kappa, int steps) {
  const double t = t0 + tau * (te - t0);
  const Vec3 x = surface(z1, z2, t);
  if (t == t0) return x;
  return flow_point(u, x, t, t0, Integrator::of_order(kappa), steps);
}

Vec3 patch_normal(const GeneratingCycleMesh& mesh, int index, double a, double b) {
  if (index < 0 || index >= 6) throw ArgumentError("patch index must be in [0, 6)");
  Vec3 x, su, sv;
  mesh.patches[index].eval_with_partials(a, b, x, su, sv);
  return mesh.signs[index] * surface_normal(su, sv);
}

}  // namespace lfc3d
