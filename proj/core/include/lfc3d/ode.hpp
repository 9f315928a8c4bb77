#pragma once

#include <vector>

#include "lfc3d/fields.hpp"
#include "lfc3d/types.hpp"

namespace lfc3d {

/// Explicit Runge-Kutta scheme given by its Butcher tableau.
///
/// Order 2 is the explicit midpoint rule, order 4 the classic RK4 and
/// order 6 the 8-stage Verner (1978) scheme, using only its 6th-order weights.
struct Integrator {
  int order = 0;
  std::vector<double> c;
  std::vector<std::vector<double>> a;  ///< strictly lower triangular, a[i].size() == i
  std::vector<double> b;

  int stages() const { return static_cast<int>(b.size()); }

  /// Throws ArgumentError unless order is 2, 4 or 6.
  static const Integrator& of_order(int order);
};

/// Number of fixed steps covering `interval` with steps no longer than |dt|.
/// A relative slack of 1e-9 keeps exact multiples from rounding up.
int step_count(double interval, double dt);

/// One explicit RK step; a negative dt integrates backward. Throws
/// EvaluationError if the velocity is non-finite at any stage.
Vec3 rk_step(const Integrator& scheme, const VelocityField& u, const Vec3& x, double t, double dt);
PointSet rk_step(const Integrator& scheme, const VelocityField& u, const PointSet& pts, double t,
                 double dt);

/// Advances `x` from t0 to te with exactly `steps` equal steps.
Vec3 flow_point(const VelocityField& u, const Vec3& x, double t0, double te,
                const Integrator& scheme, int steps);

/// Jacobian of x -> flow_point(u, x, t0, te, scheme, steps) by central
/// differences with step fd_step(x_i).
Mat3 flow_jacobian(const VelocityField& u, const Vec3& x, double t0, double te,
                   const Integrator& scheme, int steps);

/// Flow map phi_{t0}^{te-t0} applied to every point with a kappa-th order
/// scheme. The step is (te-t0)/m with m = ceil(|te-t0|/|dt_tentative|).
/// Requires (te-t0)*dt_tentative > 0; te == t0 returns the input.
PointSet flow_map(const VelocityField& u, const PointSet& pts, double t0, double te, int order,
                  double dt_tentative);

}  // namespace lfc3d
