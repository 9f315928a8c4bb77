#include "lfc3d/lfc.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include "lfc3d/error.hpp"
#include "lfc3d/parallel.hpp"

namespace lfc3d {

namespace {

constexpr double kVanishing = 1e-14;
// Inner rule when f has no closed-form antiderivative. 12 Gauss points
// integrate smooth f along an O(1) segment far below the spline error.
constexpr int kInnerNodes = 12;

}  // namespace

double assemble_flux(const std::array<double, 6>& per_patch, const std::array<int, 6>& signs) {
  double value = 0.0;
  for (int i = 0; i < 6; ++i) value += signs[i] * per_patch[i];
  return value;
}

FluxResult cycle_flux(const GeneratingCycleMesh& mesh, const ScalarField& f, double xi) {
  const int kappa = mesh.meta.kappa;
  FluxCubatureSpec spec = FluxCubatureSpec::minimal(kappa, kappa, xi);
  spec.analytic_inner = true;
  spec.n = std::max(spec.n, kInnerNodes);
  FluxResult out;
  for (int i = 0; i < 6; ++i) {
    out.per_patch[i] = surface_flux_quadrature(mesh.patches[i], f, mesh.meta.t0, spec);
  }
  out.value = assemble_flux(out.per_patch, mesh.signs);
  out.parameters = {kappa, mesh.meta.n, mesh.meta.m, mesh.meta.h, mesh.meta.dt, xi};
  return out;
}

FluxResult lfc3d_flux(const ScalarField& f, const VelocityField& u, const MovingSurface& surface,
                      double t0, double te, int n_space, int n_time, int kappa, double xi) {
  if (!(te > t0)) throw ArgumentError("lfc3d_flux needs te > t0");
  if (n_space < 1 || n_time < 1) throw ArgumentError("node counts must be positive");
  const double h = 1.0 / n_space;
  const double dt = (te - t0) / n_time;
  const GeneratingCycleMesh mesh = build_generating_cycle(u, surface, t0, te, h, dt, kappa);
  return cycle_flux(mesh, f, xi);
}

FluxResult lfc3d_flux(const PresetCase& preset, int n_space, int n_time, int kappa, double xi) {
  return lfc3d_flux(preset.scalar, preset.velocity, preset.surface, preset.t0, preset.te, n_space,
                    n_time, kappa, xi);
}

double eulerian_flux_oracle(const ScalarField& f, const VelocityField& u,
                            const MovingSurface& surface, double t0, double te, int n_space,
                            int n_time) {
  if (n_space < 1 || n_time < 1) throw ArgumentError("oracle node counts must be positive");
  const GaussRule& rs = gauss_legendre(n_space);
  const GaussRule& rt = gauss_legendre(n_time);
  const double half_t = 0.5 * (te - t0);
  const double mid_t = 0.5 * (te + t0);
  std::vector<double> rows(static_cast<std::size_t>(n_time) * n_space);
  parallel_for(static_cast<std::ptrdiff_t>(rows.size()), [&](std::ptrdiff_t idx) {
    const int k = static_cast<int>(idx / n_space);
    const int i = static_cast<int>(idx % n_space);
    const double t = mid_t + half_t * rt.nodes[k];
    const double a = 0.5 * (rs.nodes[i] + 1.0);
    double sum = 0.0;
    for (int j = 0; j < n_space; ++j) {
      const double b = 0.5 * (rs.nodes[j] + 1.0);
      const Vec3 x = surface(a, b, t);
      // (u - S_t) . n dA with n dA = -(S_u x S_v) du dv.
      const Vec3 area = -surface.partial_u(a, b, t).cross(surface.partial_v(a, b, t));
      const double rel = (u(x, t) - surface.partial_t(a, b, t)).dot(area);
      sum += rs.weights[j] * f(x, t) * rel;
    }
    rows[idx] = rt.weights[k] * rs.weights[i] * sum * half_t * 0.25;
  });
  return pairwise_sum(rows);
}

GatedReference gated_eulerian_oracle(const PresetCase& preset, double tolerance) {
  GatedReference ref;
  ref.coarse = eulerian_flux_oracle(preset.scalar, preset.velocity, preset.surface, preset.t0,
                                    preset.te, 64, 64);
  ref.value = eulerian_flux_oracle(preset.scalar, preset.velocity, preset.surface, preset.t0,
                                   preset.te, 96, 96);
  const double diff = std::abs(ref.value - ref.coarse);
  ref.difference = std::abs(ref.value) > kVanishing ? diff / std::abs(ref.value) : diff;
  if (!(ref.difference <= tolerance)) {
    std::ostringstream os;
    os << "Eulerian oracle for '" << preset.name << "' is not resolved: (64,64) and (96,96) differ by "
       << ref.difference << " > " << tolerance;
    throw ReferenceQualityError(os.str());
  }
  return ref;
}

ConvergenceTable convergence_study(const PresetCase& preset, const std::vector<int>& kappas,
                                   const std::vector<int>& nodes, double xi) {
  if (kappas.empty() || nodes.empty()) throw ArgumentError("convergence study needs kappas and nodes");
  for (std::size_t i = 1; i < nodes.size(); ++i) {
    if (nodes[i] != 2 * nodes[i - 1]) {
      throw ArgumentError("convergence study nodes must double at each level");
    }
  }
  ConvergenceTable table;
  table.preset = preset.name;
  table.reference = gated_eulerian_oracle(preset);
  const double ref = table.reference.value;
  const bool vanishing = std::abs(ref) <= kVanishing;
  for (int kappa : kappas) {
    double previous = std::numeric_limits<double>::quiet_NaN();
    for (int n : nodes) {
      ConvergenceRow row;
      row.kappa = kappa;
      row.nodes = n;
      row.h = 1.0 / n;
      row.value = lfc3d_flux(preset, n, n, kappa, xi).value;
      const double err = std::abs(row.value - ref);
      row.error = vanishing ? err : err / std::abs(ref);
      row.rate = std::log2(previous / row.error);
      row.flagged = vanishing || !std::isfinite(row.rate);
      if (vanishing) row.rate = std::numeric_limits<double>::quiet_NaN();
      previous = row.error;
      table.rows.push_back(row);
    }
  }
  return table;
}

std::string convergence_csv(const ConvergenceTable& table) {
  std::string out = "kappa,h,E,rate\n";
  char buf[160];
  for (const ConvergenceRow& r : table.rows) {
    if (std::isfinite(r.rate)) {
      std::snprintf(buf, sizeof buf, "%d,%.17g,%.17g,%.17g\n", r.kappa, r.h, r.error, r.rate);
    } else {
      std::snprintf(buf, sizeof buf, "%d,%.17g,%.17g,nan\n", r.kappa, r.h, r.error);
    }
    out += buf;
  }
  return out;
}

}  // namespace lfc3d
