#include "lfc3d/degree.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "lfc3d/error.hpp"
#include "lfc3d/ode.hpp"
#include "lfc3d/parallel.hpp"

namespace lfc3d {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kParamTol = 1e-12;
constexpr double kTangencyTol = 1e-8;

struct Projection {
  double u = 0.0;
  double v = 0.0;
  double g = kNaN;  // signed distance along the surface normal
  bool clamped = false;
};

// Closest point of S(., ., t) to x over [0,1]^2 by clamped Gauss-Newton.
Projection project(const MovingSurface& surface, const Vec3& x, double t, double u0, double v0,
                   bool warm) {
  double u = u0, v = v0;
  if (!warm) {
    double best = std::numeric_limits<double>::infinity();
    constexpr int kGrid = 12;
    for (int i = 0; i <= kGrid; ++i) {
      for (int j = 0; j <= kGrid; ++j) {
        const double a = static_cast<double>(i) / kGrid, b = static_cast<double>(j) / kGrid;
        const double d = (surface(a, b, t) - x).squaredNorm();
        if (d < best) {
          best = d;
          u = a;
          v = b;
        }
      }
    }
  }
  Projection out;
  bool clamped = false;
  for (int iter = 0; iter < 60; ++iter) {
    const Vec3 r = x - surface(u, v, t);
    const Vec3 su = surface.partial_u(u, v, t);
    const Vec3 sv = surface.partial_v(u, v, t);
    Eigen::Matrix2d jtj;
    jtj << su.dot(su), su.dot(sv), su.dot(sv), sv.dot(sv);
    const Eigen::Vector2d rhs(su.dot(r), sv.dot(r));
    if (std::abs(jtj.determinant()) <= 1e-300) break;
    const Eigen::Vector2d step = jtj.ldlt().solve(rhs);
    const double un = u + step[0], vn = v + step[1];
    const double uc = std::clamp(un, 0.0, 1.0), vc = std::clamp(vn, 0.0, 1.0);
    clamped = (uc != un) || (vc != vn);
    const double move = std::abs(uc - u) + std::abs(vc - v);
    u = uc;
    v = vc;
    if (move < 1e-15) break;
  }
  out.u = u;
  out.v = v;
  out.clamped = clamped;
  try {
    const Vec3 n = surface_normal(surface, u, v, t);
    out.g = (x - surface(u, v, t)).dot(n);
  } catch (const SingularPointError&) {
    out.g = kNaN;
  }
  return out;
}

struct Pathline {
  const VelocityField* u;
  const Integrator* scheme;
  double t0;
  double dt;
  std::vector<Vec3> states;

  Vec3 at(double t) const {
    int i = static_cast<int>(std::floor((t - t0) / dt));
    i = std::clamp(i, 0, static_cast<int>(states.size()) - 2);
    const double ti = t0 + i * dt;
    if (t == ti) return states[i];
    return rk_step(*scheme, *u, states[i], ti, t - ti);
  }
};

}  // namespace

FluxingIndex fluxing_index_oracle(const VelocityField& u, const MovingSurface& surface, double t0,
                                  double k, const Vec3& p, double sampling) {
  if (!(k > 0.0)) throw ArgumentError("fluxing index needs k > 0");
  if (!(sampling > 0.0)) throw ArgumentError("sampling must be positive");
  const int steps = step_count(k, 1.0 / sampling);
  Pathline path{&u, &Integrator::of_order(6), t0, k / steps, {}};
  path.states.resize(steps + 1);
  path.states[0] = p;
  for (int i = 0; i < steps; ++i) {
    path.states[i + 1] = rk_step(*path.scheme, u, path.states[i], t0 + i * path.dt, path.dt);
  }

  std::vector<Projection> proj(steps + 1);
  for (int i = 0; i <= steps; ++i) {
    const bool warm = i > 0 && std::isfinite(proj[i - 1].g);
    proj[i] = project(surface, path.states[i], t0 + i * path.dt, warm ? proj[i - 1].u : 0.5,
                      warm ? proj[i - 1].v : 0.5, warm);
    if (warm && proj[i].clamped) {
      // A warm start can stall at the boundary; confirm with a cold search.
      const Projection cold = project(surface, path.states[i], t0 + i * path.dt, 0.5, 0.5, false);
      if (std::isfinite(cold.g) && !cold.clamped) proj[i] = cold;
    }
  }
  if (std::isfinite(proj[0].g) && !proj[0].clamped &&
      std::abs(proj[0].g) <= 1e-12 * (1.0 + p.norm())) {
    throw ArgumentError("seed point lies on S(t0)");
  }

  FluxingIndex result;
  for (int i = 0; i < steps; ++i) {
    const Projection& a = proj[i];
    const Projection& b = proj[i + 1];
    if (!std::isfinite(a.g) || !std::isfinite(b.g)) continue;
    if ((a.g < 0.0) == (b.g < 0.0)) continue;

    // Bisection on the signed distance, warm-started from the bracket ends.
    double lo = t0 + i * path.dt, hi = t0 + (i + 1) * path.dt;
    double glo = a.g;
    Projection mid = a;
    for (int it = 0; it < 30; ++it) {
      const double tm = 0.5 * (lo + hi);
      mid = project(surface, path.at(tm), tm, mid.u, mid.v, true);
      if (!std::isfinite(mid.g)) break;
      if ((mid.g < 0.0) == (glo < 0.0)) {
        lo = tm;
        glo = mid.g;
      } else {
        hi = tm;
      }
    }

    // Newton on P(t) - S(u, v, t) = 0 with unknowns (u, v, t).
    double uu = mid.u, vv = mid.v, tt = 0.5 * (lo + hi);
    bool converged = false;
    for (int it = 0; it < 40; ++it) {
      const Vec3 pt = path.at(tt);
      const Vec3 res = pt - surface(uu, vv, tt);
      Mat3 jac;
      jac.col(0) = -surface.partial_u(uu, vv, tt);
      jac.col(1) = -surface.partial_v(uu, vv, tt);
      jac.col(2) = u(pt, tt) - surface.partial_t(uu, vv, tt);
      const Eigen::Vector3d delta = jac.fullPivLu().solve(-res);
      if (!delta.allFinite()) break;
      uu += delta[0];
      vv += delta[1];
      tt += delta[2];
      if (delta.lpNorm<Eigen::Infinity>() < 1e-13) {
        converged = true;
        break;
      }
    }
    const double bracket = path.dt;
    const bool in_bracket = tt >= t0 + i * path.dt - 1e-3 * bracket &&
                            tt <= t0 + (i + 1) * path.dt + 1e-3 * bracket;
    if (!converged || !in_bracket) {
      if (a.clamped || b.clamped) continue;  // passed around the surface edge
      std::ostringstream os;
      os << "crossing near tau = " << (lo - t0) / k
         << " could not be resolved; increase the pathline sampling";
      throw UnresolvedCrossingError(os.str());
    }
    if (uu < -kParamTol || uu > 1.0 + kParamTol || vv < -kParamTol || vv > 1.0 + kParamTol) {
      continue;  // the intersection lies on the extension of S, outside [0,1]^2
    }
    uu = std::clamp(uu, 0.0, 1.0);
    vv = std::clamp(vv, 0.0, 1.0);
    const Vec3 pt = path.at(tt);
    const Vec3 vel = u(pt, tt);
    const Vec3 st = surface.partial_t(uu, vv, tt);
    const Vec3 n = surface_normal(surface, uu, vv, tt);
    const double rel = (vel - st).dot(n);
    const double tau = (tt - t0) / k;
    const double scale = std::max(vel.norm(), st.norm());
    if (!(std::abs(rel) > kTangencyTol * scale)) {
      std::ostringstream os;
      os << "improper intersection at tau = " << tau;
      throw TangencyError(os.str(), tau);
    }
    CrossingRecord rec;
    rec.tau = tau;
    rec.point = pt;
    rec.sign = rel > 0.0 ? 1 : -1;
    rec.u = uu;
    rec.v = vv;
    result.crossings.push_back(rec);
    result.index += rec.sign;
  }
  return result;
}

int crossing_sign_relation(const VelocityField& u, const MovingSurface& surface, double t0,
                           double k, const Vec3& p, const CrossingRecord& crossing, int steps) {
  const Integrator& scheme = Integrator::of_order(6);
  const double tc = t0 + crossing.tau * k;
  const int phi_steps = std::max(8, static_cast<int>(std::ceil(crossing.tau * steps)));
  const double det_phi = flow_jacobian(u, p, t0, tc, scheme, phi_steps).determinant();

  const double te = t0 + k;
  auto chi = [&](double a, double b, double c) {
    return composite_map(u, surface, t0, te, a, b, c, 6, steps);
  };
  const Vec3 z(crossing.u, crossing.v, crossing.tau);
  Mat3 dchi;
  for (int j = 0; j < 3; ++j) {
    const double h = fd_step(z[j]);
    Vec3 zp = z, zm = z;
    zp[j] += h;
    zm[j] -= h;
    dchi.col(j) = (chi(zp[0], zp[1], zp[2]) - chi(zm[0], zm[1], zm[2])) / (2.0 * h);
  }
  const double prod = det_phi * dchi.determinant();
  return prod > 0.0 ? 1 : (prod < 0.0 ? -1 : 0);
}

// ---------------------------------------------------------------------------
// Degree by ray casting

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

DegreeClassifier::DegreeClassifier(const GeneratingCycleMesh& mesh, int resolution)
    : tri_(TriangleMesh::from_cycle(mesh, resolution)) {
  tol_ = 1e-9 * tri_.diagonal();
  double sag = 0.0;
  for (int p = 0; p < 6; ++p) {
    const TensorSpline& s = mesh.patches[p];
    for (int a = 0; a < resolution; ++a) {
      for (int b = 0; b < resolution; ++b) {
        const double u0 = static_cast<double>(a) / resolution;
        const double u1 = static_cast<double>(a + 1) / resolution;
        const double v0 = static_cast<double>(b) / resolution;
        const double v1 = static_cast<double>(b + 1) / resolution;
        const Vec3 corners =
            0.25 * (s.eval(u0, v0) + s.eval(u0, v1) + s.eval(u1, v0) + s.eval(u1, v1));
        sag = std::max(sag, (s.eval(0.5 * (u0 + u1), 0.5 * (v0 + v1)) - corners).norm());
      }
    }
  }
  near_tol_ = 2.0 * sag + tol_;
}

DegreeEstimate DegreeClassifier::classify(const Vec3& p, int rays, std::uint64_t seed,
                                          bool check_proximity) const {
  if (rays < 1) throw ArgumentError("ray count must be positive");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<std::pair<int, int>> tally;  // (crossings, votes)
  const int majority = rays / 2 + 1;
  bool grazing = false;
  int valid = 0;
  DegreeEstimate out;
  for (int attempt = 0; attempt < 4 * rays && valid < rays; ++attempt) {
    Vec3 d(normal(rng), normal(rng), normal(rng));
    const double len = d.norm();
    if (len == 0.0) continue;
    d /= len;
    const RayCount rc = tri_.cast(p, d, tol_);
    if (rc.degenerate) {
      grazing = true;
      continue;
    }
    ++valid;
    auto it = std::find_if(tally.begin(), tally.end(),
                           [&](const auto& e) { return e.first == rc.crossings; });
    int votes = 1;
    if (it == tally.end()) {
      tally.emplace_back(rc.crossings, 1);
    } else {
      votes = ++it->second;
    }
    if (votes >= majority) break;
  }
  if (tally.empty()) {
    out.degenerate = true;
    out.flagged = true;
    return out;
  }
  const auto best = std::max_element(tally.begin(), tally.end(), [](const auto& x, const auto& y) {
    return x.second < y.second || (x.second == y.second && x.first > y.first);
  });
  out.degree = best->first;
  out.votes = best->second;
  out.degenerate = best->second < majority;
  out.flagged = grazing || tally.size() > 1 || out.degenerate;
  if (check_proximity && !out.flagged && tri_.distance(p, near_tol_) < near_tol_) {
    out.flagged = true;
  }
  return out;
}

int degree_of_point(const DegreeClassifier& classifier, const Vec3& p, int rays,
                    std::uint64_t seed) {
  const DegreeEstimate est = classifier.classify(p, rays, seed, false);
  if (est.degenerate) {
    throw DegeneracyError("no majority among the rays; retessellate or move the point");
  }
  return est.degree;
}

int degree_of_point(const GeneratingCycleMesh& mesh, const Vec3& p, int rays) {
  return degree_of_point(DegreeClassifier(mesh), p, rays);
}

DonatingRegionEstimate donating_region_integral(const DegreeClassifier& classifier,
                                                const ScalarField& f, double t0,
                                                std::size_t samples, std::uint64_t seed,
                                                int rays) {
  if (samples < 2) throw ArgumentError("donating region integral needs at least 2 samples");
  const Eigen::AlignedBox3d& box = classifier.mesh().bounds();
  const double pad = 0.01 * classifier.mesh().diagonal();
  const Vec3 lo = box.min() - Vec3::Constant(pad);
  const Vec3 size = box.max() + Vec3::Constant(pad) - lo;
  int c = static_cast<int>(std::floor(std::cbrt(static_cast<double>(samples) / 2.0) + 1e-9));
  c = std::max(c, 1);
  const std::size_t cells = static_cast<std::size_t>(c) * c * c;
  const std::size_t base = samples / cells;
  const std::size_t extra = samples % cells;
  auto per_cell = [&](std::size_t idx) { return static_cast<int>(base + (idx < extra ? 1 : 0)); };
  const Vec3 cell = size / c;
  const double cell_volume = cell.prod();

  struct CellResult {
    double mean = 0.0;
    double var = 0.0;
    int degenerate = 0;
    std::vector<std::pair<int, int>> counts;
  };
  std::vector<CellResult> results(cells);
  parallel_for(static_cast<std::ptrdiff_t>(cells), [&](std::ptrdiff_t idx) {
    const int i = static_cast<int>(idx / (c * c));
    const int j = static_cast<int>((idx / c) % c);
    const int l = static_cast<int>(idx % c);
    std::mt19937_64 rng(mix_seed(seed, static_cast<std::uint64_t>(idx)));
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    CellResult& out = results[idx];
    const int n = per_cell(static_cast<std::size_t>(idx));
    double sum = 0.0, sumsq = 0.0;
    for (int s = 0; s < n; ++s) {
      const double a = unit(rng), b = unit(rng), d = unit(rng);
      const Vec3 x = lo + Vec3((i + a) * cell[0], (j + b) * cell[1], (l + d) * cell[2]);
      const DegreeEstimate est = classifier.classify(x, rays, rng(), false);
      if (est.degenerate) ++out.degenerate;
      double value = 0.0;
      if (est.degree != 0) {
        value = est.degree * f(x, t0);
        auto it = std::find_if(out.counts.begin(), out.counts.end(),
                               [&](const auto& e) { return e.first == est.degree; });
        if (it == out.counts.end()) {
          out.counts.emplace_back(est.degree, 1);
        } else {
          ++it->second;
        }
      }
      sum += value;
      sumsq += value * value;
    }
    out.mean = sum / n;
    out.var = std::max(0.0, (sumsq - sum * out.mean) / (n - 1));
  });

  DonatingRegionEstimate est;
  est.samples = samples;
  std::vector<double> contrib(cells), var(cells);
  for (std::size_t idx = 0; idx < cells; ++idx) {
    const CellResult& r = results[idx];
    contrib[idx] = cell_volume * r.mean;
    var[idx] = cell_volume * cell_volume * r.var / per_cell(idx);
    est.degenerate += r.degenerate;
    for (const auto& [n, count] : r.counts) {
      est.volume[n] += cell_volume * count / per_cell(idx);
    }
  }
  est.value = pairwise_sum(contrib);
  est.standard_error = std::sqrt(pairwise_sum(var));
  return est;
}

}  // namespace lfc3d
