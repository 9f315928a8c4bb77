#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

#include "lfc3d/error.hpp"
#include "lfc3d/lfc.hpp"
#include "lfc3d/parallel.hpp"

namespace lfc3d {

namespace {

using MapFn = std::function<Vec3(const Vec3&)>;

Mat3 fd_jacobian(const MapFn& map, const Vec3& z) {
  Mat3 jac;
  for (int j = 0; j < 3; ++j) {
    const double h = fd_step(z[j]);
    Vec3 zp = z, zm = z;
    zp[j] += h;
    zm[j] -= h;
    jac.col(j) = (map(zp) - map(zm)) / (2.0 * h);
  }
  return jac;
}

template <class Fn>
auto central4(const Fn& fn, double x, double h) {
  return (-fn(x + 2 * h) + 8.0 * fn(x + h) - 8.0 * fn(x - h) + fn(x - 2 * h)) / (12.0 * h);
}

double relative_gap(double a, double b) {
  const double scale = std::max(std::abs(a), std::abs(b));
  return scale > 1e-14 ? std::abs(a - b) / scale : std::abs(a - b);
}

// Tensor Gauss-Legendre over [0,1]^3 of g(z), summed by (i, j) rows.
template <class Fn>
double cube_integral(int n, const Fn& g) {
  const GaussRule& r = gauss_legendre(n);
  std::vector<double> rows(static_cast<std::size_t>(n) * n);
  parallel_for(static_cast<std::ptrdiff_t>(rows.size()), [&](std::ptrdiff_t idx) {
    const int i = static_cast<int>(idx / n);
    const int j = static_cast<int>(idx % n);
    double sum = 0.0;
    for (int k = 0; k < n; ++k) {
      const Vec3 z(0.5 * (r.nodes[i] + 1.0), 0.5 * (r.nodes[j] + 1.0), 0.5 * (r.nodes[k] + 1.0));
      sum += r.weights[k] * g(z);
    }
    rows[idx] = 0.125 * r.weights[i] * r.weights[j] * sum;
  });
  return pairwise_sum(rows);
}

}  // namespace

DivergenceCheck divergence_theorem_check(const PresetCase& preset, int kappa, int nodes,
                                         int volume_nodes, int chi_steps) {
  const GeneratingCycleMesh mesh =
      build_generating_cycle(preset.velocity, preset.surface, preset.t0, preset.te, 1.0 / nodes,
                             (preset.te - preset.t0) / nodes, kappa);
  ScalarField one;
  one.eval = [](const Vec3&, double) { return 1.0; };
  DivergenceCheck out;
  // With f = 1 and xi = 0 the cubature integrates x dy^dz, the flux of (x, 0, 0).
  out.boundary = cycle_flux(mesh, one, 0.0).value;

  const MapFn chi = [&](const Vec3& z) {
    return composite_map(preset.velocity, preset.surface, preset.t0, preset.te, z[0], z[1], z[2],
                         6, chi_steps);
  };
  out.volume = cube_integral(volume_nodes, [&](const Vec3& z) {
    return fd_jacobian(chi, z).determinant();
  });
  out.relative_difference = relative_gap(out.boundary, out.volume);
  return out;
}

TransportCheck reynolds_transport_check(const PresetCase& preset, double t, double fd_step_t,
                                        int nodes, int chi_steps) {
  if (!(t > preset.t0)) throw ArgumentError("transport check needs t > t0");
  if (!(fd_step_t > 0.0) || !(t - fd_step_t > preset.t0)) {
    throw ArgumentError("transport check step must be positive and keep t - step > t0");
  }
  const auto& f = preset.scalar;
  auto phi = [&](const Vec3& z, double time) {
    return composite_map(preset.velocity, preset.surface, preset.t0, time, z[0], z[1], z[2], 6,
                         chi_steps);
  };
  auto content = [&](double time) {
    const MapFn map = [&](const Vec3& z) { return phi(z, time); };
    return cube_integral(nodes, [&](const Vec3& z) {
      return f(map(z), time) * fd_jacobian(map, z).determinant();
    });
  };

  TransportCheck out;
  out.t = t;
  out.lhs = (content(t + fd_step_t) - content(t - fd_step_t)) / (2.0 * fd_step_t);

  const MapFn map = [&](const Vec3& z) { return phi(z, t); };
  const double interior = cube_integral(nodes, [&](const Vec3& z) {
    const Vec3 x = map(z);
    const double ft = central4([&](double s) { return f(x, s); }, t, fd_step(t));
    return ft * fd_jacobian(map, z).determinant();
  });

  // Closed-surface term pulled back to the faces of the unit cube: on the
  // faces z_r = 0, 1 the outward area vector is -/+ (d_{r+1} phi x d_{r+2} phi).
  const GaussRule& rule = gauss_legendre(nodes);
  std::vector<double> faces(6 * static_cast<std::size_t>(nodes) * nodes);
  parallel_for(static_cast<std::ptrdiff_t>(faces.size()), [&](std::ptrdiff_t idx) {
    const int face = static_cast<int>(idx / (nodes * nodes));
    const int i = static_cast<int>((idx / nodes) % nodes);
    const int j = static_cast<int>(idx % nodes);
    const int r = face / 2;
    const int side = face % 2;
    const int a = (r + 1) % 3, b = (r + 2) % 3;
    Vec3 z;
    z[r] = side;
    z[a] = 0.5 * (rule.nodes[i] + 1.0);
    z[b] = 0.5 * (rule.nodes[j] + 1.0);
    auto partial = [&](int dim) {
      const double h = fd_step(z[dim]);
      Vec3 zp = z, zm = z;
      zp[dim] += h;
      zm[dim] -= h;
      return Vec3((map(zp) - map(zm)) / (2.0 * h));
    };
    const Vec3 area = partial(a).cross(partial(b));
    const Vec3 x = map(z);
    const Vec3 phi_t = central4([&](double s) { return phi(z, s); }, t, fd_step(t));
    const double sign = side == 1 ? 1.0 : -1.0;
    faces[idx] = sign * 0.25 * rule.weights[i] * rule.weights[j] * f(x, t) * phi_t.dot(area);
  });
  out.rhs = interior + pairwise_sum(faces);
  out.relative_difference = relative_gap(out.lhs, out.rhs);
  return out;
}

IdentityReport verify_identities(const PresetCase& preset, int kappa, int nodes,
                                 const IdentityOptions& options) {
  IdentityReport report;
  report.preset = preset.name;
  const GeneratingCycleMesh mesh =
      build_generating_cycle(preset.velocity, preset.surface, preset.t0, preset.te, 1.0 / nodes,
                             (preset.te - preset.t0) / nodes, kappa);
  report.flux = cycle_flux(mesh, preset.scalar, 0.0);
  report.oracle = gated_eulerian_oracle(preset).value;

  IdentityCheck a;
  a.name = "oracle-vs-lfc";
  a.lhs = report.oracle;
  a.rhs = report.flux.value;
  a.difference = relative_gap(a.lhs, a.rhs);
  a.tolerance = options.lfc_tolerance;
  a.passed = a.difference <= a.tolerance;
  report.checks.push_back(a);

  const DegreeClassifier classifier(mesh, options.tessellation);
  report.donating = donating_region_integral(classifier, preset.scalar, preset.t0,
                                             options.mc_samples, options.seed);
  IdentityCheck b;
  b.name = "lfc-vs-donating-region";
  b.lhs = report.flux.value;
  b.rhs = report.donating.value;
  const double gap = std::abs(b.lhs - b.rhs);
  const double se = report.donating.standard_error;
  b.difference = se > 0.0 ? gap / se : (gap == 0.0 ? 0.0 : std::numeric_limits<double>::infinity());
  b.tolerance = options.mc_sigmas;
  b.passed = b.difference <= b.tolerance || gap <= 1e-12;
  report.checks.push_back(b);

  if (options.divergence) {
    const DivergenceCheck d = divergence_theorem_check(preset, kappa, nodes);
    IdentityCheck c;
    c.name = "divergence-theorem";
    c.lhs = d.boundary;
    c.rhs = d.volume;
    c.difference = d.relative_difference;
    c.tolerance = options.divergence_tolerance;
    c.passed = c.difference <= c.tolerance;
    report.checks.push_back(c);
  }
  if (options.transport) {
    const TransportCheck g =
        reynolds_transport_check(preset, 0.5 * (preset.t0 + preset.te));
    IdentityCheck c;
    c.name = "reynolds-transport";
    c.lhs = g.lhs;
    c.rhs = g.rhs;
    c.difference = g.relative_difference;
    c.tolerance = options.transport_tolerance;
    c.passed = c.difference <= c.tolerance;
    report.checks.push_back(c);
  }
  report.passed = std::all_of(report.checks.begin(), report.checks.end(),
                              [](const IdentityCheck& c) { return c.passed; });
  return report;
}

}  // namespace lfc3d
