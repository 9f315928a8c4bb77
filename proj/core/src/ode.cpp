#include "lfc3d/ode.hpp"

#include <array>
#include <cmath>
#include <sstream>

#include "lfc3d/error.hpp"
#include "lfc3d/parallel.hpp"

#if defined(_OPENMP)
#include <omp.h>
#endif

namespace lfc3d {

namespace {

constexpr int kMaxStages = 8;

Integrator midpoint() {
  Integrator s;
  s.order = 2;
  s.c = {0.0, 0.5};
  s.a = {{}, {0.5}};
  s.b = {0.0, 1.0};
  return s;
}

Integrator classic_rk4() {
  Integrator s;
  s.order = 4;
  s.c = {0.0, 0.5, 0.5, 1.0};
  s.a = {{}, {0.5}, {0.0, 0.5}, {0.0, 0.0, 1.0}};
  s.b = {1.0 / 6, 1.0 / 3, 1.0 / 3, 1.0 / 6};
  return s;
}

// Verner (1978) 5(6) pair, 6th-order solution.
Integrator verner6() {
  Integrator s;
  s.order = 6;
  s.c = {0.0, 1.0 / 6, 4.0 / 15, 2.0 / 3, 5.0 / 6, 1.0, 1.0 / 15, 1.0};
  s.a = {
      {},
      {1.0 / 6},
      {4.0 / 75, 16.0 / 75},
      {5.0 / 6, -8.0 / 3, 5.0 / 2},
      {-165.0 / 64, 55.0 / 6, -425.0 / 64, 85.0 / 96},
      {12.0 / 5, -8.0, 4015.0 / 612, -11.0 / 36, 88.0 / 255},
      {-8263.0 / 15000, 124.0 / 75, -643.0 / 680, -81.0 / 250, 2484.0 / 10625, 0.0},
      {3501.0 / 1720, -300.0 / 43, 297275.0 / 52632, -319.0 / 2322, 24068.0 / 84065, 0.0,
       3850.0 / 26703},
  };
  s.b = {3.0 / 40, 0.0, 875.0 / 2244, 23.0 / 72, 264.0 / 1955, 0.0, 125.0 / 11592, 43.0 / 616};
  return s;
}

Vec3 checked_velocity(const VelocityField& u, const Vec3& x, double t) {
  Vec3 vel = u(x, t);
  if (!vel.allFinite()) {
    std::ostringstream os;
    os << "non-finite velocity at (" << x[0] << ", " << x[1] << ", " << x[2] << "), t = " << t;
    throw EvaluationError(os.str(), x, t);
  }
  return vel;
}

}  // namespace

const Integrator& Integrator::of_order(int order) {
  static const Integrator second = midpoint();
  static const Integrator fourth = classic_rk4();
  static const Integrator sixth = verner6();
  switch (order) {
    case 2: return second;
    case 4: return fourth;
    case 6: return sixth;
    default:
      throw ArgumentError("integrator order must be 2, 4 or 6 (got " + std::to_string(order) + ")");
  }
}

int step_count(double interval, double dt) {
  const double ratio = std::abs(interval) / std::abs(dt);
  return std::max(1, static_cast<int>(std::ceil(ratio * (1.0 - 1e-9))));
}

Vec3 rk_step(const Integrator& scheme, const VelocityField& u, const Vec3& x, double t, double dt) {
  std::array<Vec3, kMaxStages> k;
  const int stages = scheme.stages();
  for (int i = 0; i < stages; ++i) {
    Vec3 y = x;
    const auto& row = scheme.a[i];
    for (int j = 0; j < i; ++j) {
      if (row[j] != 0.0) y += (dt * row[j]) * k[j];
    }
    k[i] = checked_velocity(u, y, t + scheme.c[i] * dt);
  }
  Vec3 out = x;
  for (int i = 0; i < stages; ++i) {
    if (scheme.b[i] != 0.0) out += (dt * scheme.b[i]) * k[i];
  }
  return out;
}

PointSet rk_step(const Integrator& scheme, const VelocityField& u, const PointSet& pts, double t,
                 double dt) {
  PointSet out(pts.size());
  parallel_for(static_cast<std::ptrdiff_t>(pts.size()),
               [&](std::ptrdiff_t i) { out[i] = rk_step(scheme, u, pts[i], t, dt); });
  return out;
}

Vec3 flow_point(const VelocityField& u, const Vec3& x, double t0, double te,
                const Integrator& scheme, int steps) {
  if (steps <= 0) throw ArgumentError("flow_point: step count must be positive");
  const double dt = (te - t0) / steps;
  Vec3 q = x;
  for (int j = 0; j < steps; ++j) q = rk_step(scheme, u, q, t0 + j * dt, dt);
  return q;
}

Mat3 flow_jacobian(const VelocityField& u, const Vec3& x, double t0, double te,
                   const Integrator& scheme, int steps) {
  Mat3 jac;
  for (int j = 0; j < 3; ++j) {
    const double h = fd_step(x[j]);
    Vec3 xp = x, xm = x;
    xp[j] += h;
    xm[j] -= h;
    jac.col(j) = (flow_point(u, xp, t0, te, scheme, steps) -
                  flow_point(u, xm, t0, te, scheme, steps)) /
                 (2.0 * h);
  }
  return jac;
}

PointSet flow_map(const VelocityField& u, const PointSet& pts, double t0, double te, int order,
                  double dt_tentative) {
  const Integrator& scheme = Integrator::of_order(order);
  if (dt_tentative == 0.0 || !std::isfinite(dt_tentative)) {
    throw ArgumentError("flow_map: time step must be finite and nonzero");
  }
  if (te == t0) return pts;
  if ((te - t0) * dt_tentative < 0.0) {
    throw ArgumentError("flow_map: time step sign must match the direction of integration");
  }
  const int steps = step_count(te - t0, dt_tentative);
  PointSet out(pts.size());
  parallel_for(static_cast<std::ptrdiff_t>(pts.size()),
               [&](std::ptrdiff_t i) { out[i] = flow_point(u, pts[i], t0, te, scheme, steps); });
  return out;
}

// ---------------------------------------------------------------------------
// parallel.hpp

void set_thread_count(int threads) {
#if defined(_OPENMP)
  if (threads > 0) omp_set_num_threads(threads);
#else
  (void)threads;
#endif
}

int thread_count() {
#if defined(_OPENMP)
  return omp_get_max_threads();
#else
  return 1;
#endif
}

double pairwise_sum(std::span<const double> values) {
  if (values.size() <= 8) {
    double s = 0.0;
    for (double v : values) s += v;
    return s;
  }
  const std::size_t half = values.size() / 2;
  return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

}  // namespace lfc3d
