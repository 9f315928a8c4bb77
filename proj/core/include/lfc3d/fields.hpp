#pragma once

#include <cmath>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "lfc3d/types.hpp"

namespace lfc3d {

/// Finite-difference step used by every derivative fallback: 1e-5 (1 + |coordinate|).
inline double fd_step(double coordinate) { return 1e-5 * (1.0 + std::abs(coordinate)); }

/// Time-dependent velocity u(x, t) with optional analytic divergence and Jacobian.
struct VelocityField {
  std::function<Vec3(const Vec3&, double)> eval;
  std::function<double(const Vec3&, double)> divergence;
  std::function<Mat3(const Vec3&, double)> jacobian;

  Vec3 operator()(const Vec3& x, double t) const { return eval(x, t); }

  /// Analytic divergence when present, 4th-order central differences otherwise.
  double div(const Vec3& x, double t) const;
  double fd_divergence(const Vec3& x, double t) const;

  /// Row i holds the gradient of component i.
  Mat3 grad(const Vec3& x, double t) const;
  Mat3 fd_jacobian(const Vec3& x, double t) const;
};

/// Conserved scalar f(x, t).
///
/// `antiderivative` implements F(x,y,z) = int_xi^x f(s,y,z,t) ds. When it is
/// empty, antiderivative_x falls back to adaptive Gauss-Kronrod quadrature.
struct ScalarField {
  std::function<double(const Vec3&, double)> eval;
  std::function<double(const Vec3&, double, double)> antiderivative;

  double operator()(const Vec3& x, double t) const { return eval(x, t); }
  double antiderivative_x(const Vec3& x, double t, double xi) const;
};

/// Moving parametrized surface S(u, v, t), (u, v) in [0,1]^2.
///
/// Each partial is analytic when the corresponding callback is set and a
/// 4th-order central difference of `eval` otherwise.
struct MovingSurface {
  std::function<Vec3(double, double, double)> eval;
  std::function<Vec3(double, double, double)> du;
  std::function<Vec3(double, double, double)> dv;
  std::function<Vec3(double, double, double)> dt;

  Vec3 operator()(double u, double v, double t) const { return eval(u, v, t); }

  Vec3 partial_u(double u, double v, double t) const;
  Vec3 partial_v(double u, double v, double t) const;
  Vec3 partial_t(double u, double v, double t) const;

  Vec3 fd_partial_u(double u, double v, double t) const;
  Vec3 fd_partial_v(double u, double v, double t) const;
  Vec3 fd_partial_t(double u, double v, double t) const;
};

/// Unit normal with n . S_u = n . S_v = 0 and det[S_u, S_v, n] < 0,
/// i.e. n = -(S_u x S_v) / |S_u x S_v|. Throws SingularPointError on a
/// rank-deficient tangent plane.
Vec3 surface_normal(const MovingSurface& surface, double u, double v, double t);
Vec3 surface_normal(const Vec3& su, const Vec3& sv);

/// Optional knobs applied on top of a preset's defaults.
struct PresetOverrides {
  std::optional<double> period;     ///< T in the LeVeque field
  std::optional<double> t0;
  std::optional<double> te;
  std::optional<double> amplitude;  ///< factor on the in-plane motion of moving surfaces
};

struct PresetCase {
  std::string name;
  std::string description;
  VelocityField velocity;
  ScalarField scalar;
  MovingSurface surface;
  double t0 = 0.0;
  double te = 1.0;
};

/// Stable names accepted by make_preset, in listing order.
const std::vector<std::string>& preset_names();

/// Throws ArgumentError (listing valid names) for an unknown preset.
PresetCase make_preset(std::string_view name, const PresetOverrides& overrides = {});

/// d_t f + div(u f), by 4th-order central differences.
double conservation_residual(const PresetCase& preset, const Vec3& x, double t);

}  // namespace lfc3d
