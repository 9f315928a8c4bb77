#include "lfc3d/fields.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <sstream>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "lfc3d/error.hpp"

namespace lfc3d {

namespace {

constexpr double kPi = std::numbers::pi;

// 4th-order central difference of a scalar or vector function of one variable.
template <class Fn>
auto central4(const Fn& fn, double x, double h) {
  return (-fn(x + 2 * h) + 8.0 * fn(x + h) - 8.0 * fn(x - h) + fn(x - 2 * h)) / (12.0 * h);
}

}  // namespace

// ---------------------------------------------------------------------------
// VelocityField

double VelocityField::fd_divergence(const Vec3& x, double t) const {
  double div = 0.0;
  for (int i = 0; i < 3; ++i) {
    auto component = [&](double s) {
      Vec3 y = x;
      y[i] = s;
      return eval(y, t)[i];
    };
    div += central4(component, x[i], fd_step(x[i]));
  }
  return div;
}

double VelocityField::div(const Vec3& x, double t) const {
  return divergence ? divergence(x, t) : fd_divergence(x, t);
}

Mat3 VelocityField::fd_jacobian(const Vec3& x, double t) const {
  Mat3 jac;
  for (int j = 0; j < 3; ++j) {
    auto along = [&](double s) -> Vec3 {
      Vec3 y = x;
      y[j] = s;
      return eval(y, t);
    };
    jac.col(j) = central4(along, x[j], fd_step(x[j]));
  }
  return jac;
}

Mat3 VelocityField::grad(const Vec3& x, double t) const {
  return jacobian ? jacobian(x, t) : fd_jacobian(x, t);
}

// ---------------------------------------------------------------------------
// ScalarField

double ScalarField::antiderivative_x(const Vec3& x, double t, double xi) const {
  if (antiderivative) return antiderivative(x, t, xi);
  if (x[0] == xi) return 0.0;
  auto slice = [&](double s) { return eval(Vec3(s, x[1], x[2]), t); };
  return boost::math::quadrature::gauss_kronrod<double, 15>::integrate(slice, xi, x[0], 15, 1e-13);
}

// ---------------------------------------------------------------------------
// MovingSurface

Vec3 MovingSurface::fd_partial_u(double u, double v, double t) const {
  return central4([&](double s) { return eval(s, v, t); }, u, fd_step(u));
}

Vec3 MovingSurface::fd_partial_v(double u, double v, double t) const {
  return central4([&](double s) { return eval(u, s, t); }, v, fd_step(v));
}

Vec3 MovingSurface::fd_partial_t(double u, double v, double t) const {
  return central4([&](double s) { return eval(u, v, s); }, t, fd_step(t));
}

Vec3 MovingSurface::partial_u(double u, double v, double t) const {
  return du ? du(u, v, t) : fd_partial_u(u, v, t);
}

Vec3 MovingSurface::partial_v(double u, double v, double t) const {
  return dv ? dv(u, v, t) : fd_partial_v(u, v, t);
}

Vec3 MovingSurface::partial_t(double u, double v, double t) const {
  return dt ? dt(u, v, t) : fd_partial_t(u, v, t);
}

Vec3 surface_normal(const Vec3& su, const Vec3& sv) {
  const Vec3 cross = su.cross(sv);
  const double scale = su.norm() * sv.norm();
  const double norm = cross.norm();
  if (!(norm > 1e-12 * scale) || scale == 0.0) {
    throw SingularPointError("surface_normal: rank-deficient tangent plane");
  }
  return -cross / norm;
}

Vec3 surface_normal(const MovingSurface& surface, double u, double v, double t) {
  return surface_normal(surface.partial_u(u, v, t), surface.partial_v(u, v, t));
}

// ---------------------------------------------------------------------------
// Presets

namespace {

VelocityField leveque_velocity(double period) {
  VelocityField field;
  field.eval = [period](const Vec3& x, double t) {
    const double sx = std::sin(kPi * x[0]), sy = std::sin(kPi * x[1]), sz = std::sin(kPi * x[2]);
    const double s2x = std::sin(2 * kPi * x[0]), s2y = std::sin(2 * kPi * x[1]),
                 s2z = std::sin(2 * kPi * x[2]);
    const double g = std::cos(kPi * t / period);
    return Vec3(2.0 * g * sx * sx * s2y * s2z, -g * s2x * sy * sy * s2z, -g * s2x * s2y * sz * sz);
  };
  field.divergence = [](const Vec3&, double) { return 0.0; };
  return field;
}

ScalarField leveque_scalar() {
  ScalarField f;
  f.eval = [](const Vec3& x, double) {
    return std::sin(kPi * x[0]) * std::sin(kPi * x[1]) * std::sin(kPi * x[2]);
  };
  f.antiderivative = [](const Vec3& x, double, double xi) {
    return (std::cos(kPi * xi) - std::cos(kPi * x[0])) / kPi * std::sin(kPi * x[1]) *
           std::sin(kPi * x[2]);
  };
  return f;
}

// Rotation plus uniform expansion, div u = 3.
VelocityField rotation_strain_velocity() {
  const double w = 2 * kPi;
  Mat3 a;
  a << 1, w, w,
      -w, 1, -w,
      -w, w, 1;
  VelocityField field;
  field.eval = [a](const Vec3& x, double) -> Vec3 { return a * x; };
  field.divergence = [](const Vec3&, double) { return 3.0; };
  field.jacobian = [a](const Vec3&, double) -> Mat3 { return a; };
  return field;
}

ScalarField rotation_strain_scalar() {
  ScalarField f;
  f.eval = [](const Vec3& x, double t) { return x.squaredNorm() * std::exp(-5.0 * t); };
  f.antiderivative = [](const Vec3& x, double t, double xi) {
    const double yz = x[1] * x[1] + x[2] * x[2];
    return std::exp(-5.0 * t) * ((x[0] * x[0] * x[0] - xi * xi * xi) / 3.0 + yz * (x[0] - xi));
  };
  return f;
}

ScalarField unit_scalar() {
  ScalarField f;
  f.eval = [](const Vec3&, double) { return 1.0; };
  f.antiderivative = [](const Vec3& x, double, double xi) { return x[0] - xi; };
  return f;
}

VelocityField constant_velocity(const Vec3& c) {
  VelocityField field;
  field.eval = [c](const Vec3&, double) { return c; };
  field.divergence = [](const Vec3&, double) { return 0.0; };
  field.jacobian = [](const Vec3&, double) -> Mat3 { return Mat3::Zero(); };
  return field;
}

// Static planar patch origin + u*eu + v*ev.
MovingSurface static_plane(const Vec3& origin, const Vec3& eu, const Vec3& ev) {
  MovingSurface s;
  s.eval = [=](double u, double v, double) -> Vec3 { return origin + u * eu + v * ev; };
  s.du = [=](double, double, double) { return eu; };
  s.dv = [=](double, double, double) { return ev; };
  s.dt = [](double, double, double) -> Vec3 { return Vec3::Zero(); };
  return s;
}

// Opening paraboloid (a p sin(pi t/2), a q sin(pi t/2), t^2/72 (9p^2 + 4q^2)) with
// p = scale*u + shift, q = scale*v + shift.
MovingSurface opening_paraboloid(double scale, double shift, double amplitude) {
  MovingSurface s;
  s.eval = [=](double u, double v, double t) {
    const double p = scale * u + shift, q = scale * v + shift;
    const double g = amplitude * std::sin(kPi * t / 2);
    return Vec3(p * g, q * g, t * t / 72.0 * (9 * p * p + 4 * q * q));
  };
  s.du = [=](double u, double, double t) {
    const double p = scale * u + shift;
    const double g = amplitude * std::sin(kPi * t / 2);
    return Vec3(scale * g, 0.0, t * t / 72.0 * 18.0 * p * scale);
  };
  s.dv = [=](double, double v, double t) {
    const double q = scale * v + shift;
    const double g = amplitude * std::sin(kPi * t / 2);
    return Vec3(0.0, scale * g, t * t / 72.0 * 8.0 * q * scale);
  };
  s.dt = [=](double u, double v, double t) {
    const double p = scale * u + shift, q = scale * v + shift;
    const double gdot = amplitude * kPi / 2 * std::cos(kPi * t / 2);
    return Vec3(p * gdot, q * gdot, t / 36.0 * (9 * p * p + 4 * q * q));
  };
  return s;
}

struct PresetInfo {
  const char* name;
  const char* description;
};

constexpr std::array<PresetInfo, 7> kPresets{{
    {"leveque-static", "LeVeque incompressible flow (T=3), static square z=1/4, [0, 3/2]"},
    {"leveque-moving", "LeVeque incompressible flow (T=3), opening paraboloid, [0, 1]"},
    {"compressible-static", "rotation-strain flow (div u = 3), static square z=1/4, [0, 1]"},
    {"compressible-moving-1", "rotation-strain flow, opening paraboloid on (0,1)^2, [0, 1]"},
    {"compressible-moving-2", "rotation-strain flow, opening paraboloid on (0,1)^2, [0, 2]"},
    {"translate-demo", "u = (0,0,-1), square translating as (z1 - t, z2, 0), [0, 1]"},
    {"zero-flow", "u = 0, static unit square, f = 1, [0, 1]"},
}};

std::string preset_list() {
  std::ostringstream os;
  for (std::size_t i = 0; i < kPresets.size(); ++i) os << (i ? ", " : "") << kPresets[i].name;
  return os.str();
}

}  // namespace

const std::vector<std::string>& preset_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> out;
    for (const auto& p : kPresets) out.emplace_back(p.name);
    return out;
  }();
  return names;
}

PresetCase make_preset(std::string_view name, const PresetOverrides& overrides) {
  PresetCase c;
  c.name = std::string(name);
  bool known = false;
  for (const auto& p : kPresets) {
    if (name == p.name) {
      c.description = p.description;
      known = true;
    }
  }
  if (!known) {
    throw ArgumentError("unknown preset '" + std::string(name) + "'; valid presets: " + preset_list());
  }

  const bool leveque = name.starts_with("leveque");
  const bool moving_paraboloid = name == "leveque-moving" || name.starts_with("compressible-moving");
  if (overrides.period && !leveque) {
    throw ArgumentError("preset '" + c.name + "' has no period parameter");
  }
  if (overrides.amplitude && !moving_paraboloid) {
    throw ArgumentError("preset '" + c.name + "' has no amplitude parameter");
  }
  const double period = overrides.period.value_or(3.0);
  const double amplitude = overrides.amplitude.value_or(1.0);
  if (period <= 0.0) throw ArgumentError("period T must be positive");

  if (name == "leveque-static") {
    c.velocity = leveque_velocity(period);
    c.scalar = leveque_scalar();
    c.surface = static_plane(Vec3(0, 0, 0.25), Vec3(0.5, 0, 0), Vec3(0, 0.5, 0));
    c.t0 = 0.0;
    c.te = 1.5;
  } else if (name == "leveque-moving") {
    c.velocity = leveque_velocity(period);
    c.scalar = leveque_scalar();
    // (-1,1)^2 mapped onto (0,1)^2 by (2u-1, 2v-1).
    c.surface = opening_paraboloid(2.0, -1.0, amplitude);
    c.t0 = 0.0;
    c.te = 1.0;
  } else if (name == "compressible-static") {
    c.velocity = rotation_strain_velocity();
    c.scalar = rotation_strain_scalar();
    c.surface = static_plane(Vec3(-1, -1, 0.25), Vec3(2, 0, 0), Vec3(0, 2, 0));
    c.t0 = 0.0;
    c.te = 1.0;
  } else if (name == "compressible-moving-1" || name == "compressible-moving-2") {
    c.velocity = rotation_strain_velocity();
    c.scalar = rotation_strain_scalar();
    c.surface = opening_paraboloid(1.0, 0.0, amplitude);
    c.t0 = 0.0;
    c.te = name.ends_with("1") ? 1.0 : 2.0;
  } else if (name == "translate-demo") {
    c.velocity = constant_velocity(Vec3(0, 0, -1));
    c.scalar = unit_scalar();
    MovingSurface s;
    s.eval = [](double u, double v, double t) { return Vec3(u - t, v, 0.0); };
    s.du = [](double, double, double) { return Vec3(1, 0, 0); };
    s.dv = [](double, double, double) { return Vec3(0, 1, 0); };
    s.dt = [](double, double, double) { return Vec3(-1, 0, 0); };
    c.surface = s;
    c.t0 = 0.0;
    c.te = 1.0;
  } else {  // zero-flow
    c.velocity = constant_velocity(Vec3::Zero());
    c.scalar = unit_scalar();
    c.surface = static_plane(Vec3::Zero(), Vec3(1, 0, 0), Vec3(0, 1, 0));
    c.t0 = 0.0;
    c.te = 1.0;
  }

  if (overrides.t0) c.t0 = *overrides.t0;
  if (overrides.te) c.te = *overrides.te;
  if (!(c.te > c.t0)) throw ArgumentError("preset interval requires te > t0");
  return c;
}

double conservation_residual(const PresetCase& preset, const Vec3& x, double t) {
  const auto& f = preset.scalar;
  const auto& u = preset.velocity;
  double residual = central4([&](double s) { return f(x, s); }, t, fd_step(t));
  for (int i = 0; i < 3; ++i) {
    auto flux = [&](double s) {
      Vec3 y = x;
      y[i] = s;
      return u(y, t)[i] * f(y, t);
    };
    residual += central4(flux, x[i], fd_step(x[i]));
  }
  return residual;
}

}  // namespace lfc3d
