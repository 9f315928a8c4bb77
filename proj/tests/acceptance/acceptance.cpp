// Acceptance runner: one PASS/FAIL line per criterion.
//
//   lfc3d_acceptance [--criterion N] [--extended]
//
// Exit status is 0 when every selected criterion passes.

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Geometry>

#include "lfc3d/error.hpp"
#include "lfc3d/lfc.hpp"
#include "lfc3d/ode.hpp"

using namespace lfc3d;

namespace {

// Criterion 1: rate bands for kappa = 2, 4, 6.
constexpr double kRateBand[3] = {0.35, 0.5, 0.75};
// Criterion 2.
constexpr double kCompressibleRate = 6.45;
constexpr double kCompressibleBand = 0.75;
constexpr double kCompressibleMaxError = 1e-8;
// Criterion 4.
constexpr double kTranslateTolerance = 1e-10;
// Criterion 5.
constexpr int kPolynomialCases = 50;
constexpr double kCubatureTolerance = 1e-11;
// Criterion 6.
constexpr double kOracleTolerance = 1e-4;
constexpr double kMonteCarloSigmas = 3.0;
constexpr std::size_t kMonteCarloSamples = 1000000;
// Criterion 7.
constexpr double kDivergenceTolerance = 1e-6;
constexpr double kTransportTolerance = 1e-5;
// Criterion 8.
constexpr int kSeedPoints = 200;
constexpr double kAgreement = 0.99;
// Criterion 9.
constexpr int kTrajectories = 100;
constexpr double kJacobiTolerance = 1e-4;

bool g_extended = false;

struct Outcome {
  bool pass = true;
  std::string detail;
};

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

void note(const std::string& line) { std::printf("  %s\n", line.c_str()); }

double band_for(int kappa) { return kRateBand[kappa / 2 - 1]; }

void print_table(const ConvergenceTable& t) {
  for (const ConvergenceRow& r : t.rows) {
    std::ostringstream os;
    os << t.preset << " kappa=" << r.kappa << " h=1/" << r.nodes << " E=" << fmt("%.3e", r.error)
       << " rate=" << (std::isnan(r.rate) ? std::string("-") : fmt("%.2f", r.rate));
    note(os.str());
  }
}

const ConvergenceRow& finest(const ConvergenceTable& t, int kappa) {
  const ConvergenceRow* row = nullptr;
  for (const ConvergenceRow& r : t.rows)
    if (r.kappa == kappa) row = &r;
  return *row;
}

Outcome rates_within_bands(const std::string& preset, const std::vector<int>& kappas,
                           const std::vector<int>& nodes) {
  const ConvergenceTable t = convergence_study(make_preset(preset), kappas, nodes);
  print_table(t);
  Outcome o;
  std::ostringstream os;
  os << preset;
  const char* sep = " ";
  for (int k : kappas) {
    const double rate = finest(t, k).rate;
    const bool ok = std::abs(rate - k) <= band_for(k);
    o.pass = o.pass && ok;
    os << sep << "kappa=" << k << " rate " << fmt("%.2f", rate) << (ok ? " ok" : " out of band");
    sep = ", ";
  }
  o.detail = os.str();
  return o;
}

Outcome criterion_1() {
  Outcome o = rates_within_bands("leveque-static", {2, 4, 6}, {32, 64, 128});
  o.detail += " (h=1/64 to 1/128)";
  if (g_extended) {
    const ConvergenceTable t = convergence_study(make_preset("leveque-static"), {4, 6}, {128, 256});
    note("information only, not part of the verdict:");
    print_table(t);
  }
  return o;
}

Outcome criterion_2() {
  const ConvergenceTable t = convergence_study(make_preset("compressible-static"), {6}, {32, 64});
  print_table(t);
  const ConvergenceRow& r = t.rows.back();
  Outcome o;
  o.pass = std::abs(r.rate - kCompressibleRate) <= kCompressibleBand &&
           r.error <= kCompressibleMaxError;
  o.detail = "compressible-static kappa=6 rate " + fmt("%.2f", r.rate) + ", E(1/64) = " +
             fmt("%.2e", r.error);
  return o;
}

Outcome criterion_3() {
  Outcome a = rates_within_bands("leveque-moving", {4, 6}, {64, 128, 256});
  Outcome b = rates_within_bands("compressible-moving-1", {4, 6}, {64, 128, 256});
  return {a.pass && b.pass, a.detail + "; " + b.detail + " (h=1/128 to 1/256)"};
}

// translate-demo turned by a generic rotation and shifted off the origin, so
// that every patch carries part of the flux of F = (x, 0, 0).
PresetCase rotated_translate_demo() {
  const Mat3 r = (Eigen::AngleAxisd(0.3, Vec3::UnitZ()) * Eigen::AngleAxisd(0.7, Vec3::UnitY()) *
                  Eigen::AngleAxisd(1.1, Vec3::UnitX()))
                     .toRotationMatrix();
  const Vec3 shift(2.0, -0.5, 0.25);
  PresetCase c = make_preset("translate-demo");
  const Vec3 w = r * Vec3(0, 0, -1);
  c.velocity = VelocityField{};
  c.velocity.eval = [w](const Vec3&, double) { return w; };
  c.surface = MovingSurface{};
  c.surface.eval = [r, shift](double u, double v, double t) {
    return Vec3(r * Vec3(u - t, v, 0.0) + shift);
  };
  return c;
}

Outcome criterion_4() {
  Outcome o;
  const std::array<int, 6> signs{1, -1, 1, 1, 1, 1};
  double worst = 0.0;
  int caught_plain = 0, caught_rotated = 0;
  for (int kappa : {2, 4, 6}) {
    const FluxResult plain = lfc3d_flux(make_preset("translate-demo"), 8, 8, kappa);
    const FluxResult turned = lfc3d_flux(rotated_translate_demo(), 8, 8, kappa);
    worst = std::max({worst, std::abs(plain.value - 1.0), std::abs(turned.value - 1.0)});
    for (int p = 0; p < 6; ++p) {
      std::array<int, 6> flipped = signs;
      flipped[p] = -flipped[p];
      const bool plain_caught = std::abs(assemble_flux(plain.per_patch, flipped) - 1.0) > kTranslateTolerance;
      const bool turned_caught = std::abs(assemble_flux(turned.per_patch, flipped) - 1.0) > kTranslateTolerance;
      caught_plain += plain_caught;
      caught_rotated += turned_caught;
      if (kappa == 6) {
        note("flip P" + std::to_string(p + 1) + ": translate-demo " +
             (plain_caught ? "detected" : "undetected (I = 0 on this face)") + ", rotated " +
             (turned_caught ? "detected" : "undetected"));
      }
    }
  }
  // On the axis-aligned demo P1, P2, P4 and P6 carry no dy^dz, so only the
  // P3 and P5 flips are observable there; the rotated copy exposes all six.
  o.pass = worst <= kTranslateTolerance && caught_rotated == 18 && caught_plain >= 6;
  o.detail = "max |flux - 1| = " + fmt("%.1e", worst) + ", sign flips detected " +
             std::to_string(caught_rotated) + "/18 rotated, " + std::to_string(caught_plain) +
             "/18 axis-aligned";
  return o;
}

TensorSpline random_patch(std::mt19937_64& rng, int kappa) {
  std::uniform_real_distribution<double> c(-0.3, 0.3);
  std::uniform_int_distribution<int> size(kappa, kappa + 6);
  const int n = std::max(size(rng), 2);
  const int deg = kappa - 1;
  std::vector<double> coef(3 * (deg + 1) * (deg + 1));
  for (double& x : coef) x = c(rng);
  PointGrid grid(n, n);
  for (int i = 0; i <= n; ++i) {
    for (int j = 0; j <= n; ++j) {
      const double u = double(i) / n, v = double(j) / n;
      Vec3 p(1.0, u, v);
      for (int d = 0; d < 3; ++d)
        for (int a = 0; a <= deg; ++a)
          for (int b = 0; b <= deg; ++b)
            p[d] += coef[(d * (deg + 1) + a) * (deg + 1) + b] * std::pow(u, a) * std::pow(v, b);
      grid.at(i, j) = p;
    }
  }
  return fit_tensor_spline(grid, kappa);
}

Outcome criterion_5() {
  std::mt19937_64 rng(2024);
  std::uniform_int_distribution<int> degree(0, 4);
  std::uniform_real_distribution<double> coef(-1.0, 1.0);
  double worst = 0.0;
  int cases = 0;
  for (int kappa : {2, 4, 6}) {
    for (int trial = 0; trial < kPolynomialCases; ++trial) {
      const int q = degree(rng);
      std::vector<std::array<int, 3>> powers;
      for (int a = 0; a <= q; ++a)
        for (int b = 0; a + b <= q; ++b)
          for (int c = 0; a + b + c <= q; ++c) powers.push_back({a, b, c});
      std::vector<double> w(powers.size());
      for (double& x : w) x = coef(rng);
      ScalarField f;
      f.eval = [powers, w](const Vec3& x, double) {
        double s = 0.0;
        for (std::size_t i = 0; i < powers.size(); ++i)
          s += w[i] * std::pow(x[0], powers[i][0]) * std::pow(x[1], powers[i][1]) *
               std::pow(x[2], powers[i][2]);
        return s;
      };
      const TensorSpline patch = random_patch(rng, kappa);
      const double xi = coef(rng);
      const FluxCubatureSpec spec = FluxCubatureSpec::minimal(q, kappa, xi);
      const double base = surface_flux_quadrature(patch, f, 0.0, spec);
      const double doubled = surface_flux_quadrature(patch, f, 0.0, spec.scaled(2));
      worst = std::max(worst, std::abs(base - doubled) / std::abs(doubled));
      ++cases;
    }
  }
  return {worst <= kCubatureTolerance,
          std::to_string(cases) + " polynomial cases, max relative difference " + fmt("%.1e", worst)};
}

Outcome criterion_6() {
  IdentityOptions opt;
  opt.mc_samples = kMonteCarloSamples;
  opt.lfc_tolerance = kOracleTolerance;
  opt.mc_sigmas = kMonteCarloSigmas;
  opt.divergence = false;
  opt.transport = false;
  const IdentityReport rep = verify_identities(make_preset("leveque-static"), 6, 64, opt);
  const double rel = std::abs(rep.oracle - rep.flux.value) / std::abs(rep.oracle);
  const double z = (rep.flux.value - rep.donating.value) / rep.donating.standard_error;
  note("oracle " + fmt("%.12g", rep.oracle) + ", cycle flux " + fmt("%.12g", rep.flux.value) +
       ", donating region " + fmt("%.6g", rep.donating.value) + " +/- " +
       fmt("%.2g", rep.donating.standard_error));
  return {rel < kOracleTolerance && std::abs(z) <= kMonteCarloSigmas,
          "|oracle - lfc3d|/|oracle| = " + fmt("%.2e", rel) + ", lfc3d vs donating region " +
              fmt("%.2f", z) + " standard errors at " + std::to_string(rep.donating.samples) +
              " samples"};
}

Outcome criterion_7() {
  const DivergenceCheck d = divergence_theorem_check(make_preset("compressible-static"), 6, 64);
  const TransportCheck t = reynolds_transport_check(make_preset("leveque-moving"), 0.5);
  note("boundary " + fmt("%.12g", d.boundary) + ", volume " + fmt("%.12g", d.volume));
  note("transport lhs " + fmt("%.12g", t.lhs) + ", rhs " + fmt("%.12g", t.rhs));
  return {d.relative_difference < kDivergenceTolerance &&
              t.relative_difference < kTransportTolerance,
          "divergence theorem " + fmt("%.1e", d.relative_difference) + ", Reynolds transport " +
              fmt("%.1e", t.relative_difference)};
}

Outcome criterion_8() {
  const PresetCase c = make_preset("leveque-static");
  const double k = c.te - c.t0;
  const GeneratingCycleMesh mesh =
      build_generating_cycle(c.velocity, c.surface, c.t0, c.te, 1.0 / 64, k / 64, 6);
  const DegreeClassifier cls(mesh);
  const auto& box = cls.mesh().bounds();
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  int agree = 0, nonzero = 0, unflagged_miss = 0, crossings = 0, sign_ok = 0;
  for (int i = 0; i < kSeedPoints; ++i) {
    const Vec3 p = box.min() + box.sizes().cwiseProduct(Vec3(unit(rng), unit(rng), unit(rng)));
    const FluxingIndex fi = fluxing_index_oracle(c.velocity, c.surface, c.t0, k, p);
    const DegreeEstimate est = cls.classify(p, 5, mix_seed(7, i));
    agree += est.degree == fi.index;
    nonzero += fi.index != 0;
    if (est.degree != fi.index && !est.flagged) ++unflagged_miss;
    for (const CrossingRecord& cr : fi.crossings) {
      ++crossings;
      sign_ok += crossing_sign_relation(c.velocity, c.surface, c.t0, k, p, cr) == cr.sign;
    }
  }
  const bool pass = agree >= kAgreement * kSeedPoints && unflagged_miss == 0 && sign_ok == crossings;
  return {pass, std::to_string(agree) + "/" + std::to_string(kSeedPoints) + " agree (" +
                    std::to_string(nonzero) + " nonzero), " + std::to_string(unflagged_miss) +
                    " unflagged disagreements, sign relation " + std::to_string(sign_ok) + "/" +
                    std::to_string(crossings) + " crossings"};
}

Outcome criterion_9() {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const Integrator& rk6 = Integrator::of_order(6);
  double worst_jacobi = 0.0, min_det = INFINITY;
  for (int i = 0; i < kTrajectories; ++i) {
    const PresetCase c = make_preset(i % 2 ? "compressible-static" : "leveque-moving");
    const Vec3 x(unit(rng), unit(rng), unit(rng));
    const double t0 = 0.5 * unit(rng), span = 0.1 + 0.9 * unit(rng);
    const double te = t0 + (i % 4 < 2 ? span : -std::min(span, t0 + 0.05));
    const int steps = 200;
    const double det = flow_jacobian(c.velocity, x, t0, te, rk6, steps).determinant();
    min_det = std::min(min_det, det);
    const double d = 1e-3;
    const double lp = std::log(flow_jacobian(c.velocity, x, t0, te + d, rk6, steps).determinant());
    const double lm = std::log(flow_jacobian(c.velocity, x, t0, te - d, rk6, steps).determinant());
    const Vec3 p = flow_point(c.velocity, x, t0, te, rk6, steps);
    worst_jacobi = std::max(worst_jacobi, std::abs((lp - lm) / (2 * d) - c.velocity.div(p, te)));
  }

  double worst_spline = 0.0;
  std::uniform_real_distribution<double> coef(-1.0, 1.0);
  for (int kappa : {2, 4, 6}) {
    for (int trial = 0; trial < 10; ++trial) {
      std::vector<double> a(3 * kappa * kappa);
      for (double& x : a) x = coef(rng);
      auto poly = [&](double u, double v) {
        Vec3 out = Vec3::Zero();
        for (int d = 0; d < 3; ++d)
          for (int i = 0; i < kappa; ++i)
            for (int j = 0; j < kappa; ++j)
              out[d] += a[(d * kappa + i) * kappa + j] * std::pow(u, i) * std::pow(v, j);
        return out;
      };
      const int n = kappa + 1 + trial;
      PointGrid g(n, n);
      for (int i = 0; i <= n; ++i)
        for (int j = 0; j <= n; ++j) g.at(i, j) = poly(double(i) / n, double(j) / n);
      const TensorSpline s = fit_tensor_spline(g, kappa);
      for (int probe = 0; probe < 50; ++probe) {
        const double u = unit(rng), v = unit(rng);
        worst_spline = std::max(worst_spline, (s.eval(u, v) - poly(u, v)).norm());
      }
    }
  }

  double worst_gauss = 0.0;
  for (int p = 1; p <= 32; ++p) {
    const GaussRule& r = gauss_legendre(p);
    for (int d = 0; d <= 2 * p - 1; ++d) {
      double sum = 0.0;
      for (int i = 0; i < p; ++i) sum += r.weights[i] * std::pow(r.nodes[i], d);
      worst_gauss = std::max(worst_gauss, std::abs(sum - (d % 2 ? 0.0 : 2.0 / (d + 1))));
    }
  }
  const bool pass = min_det > 0.0 && worst_jacobi < kJacobiTolerance && worst_spline < 1e-10 &&
                    worst_gauss < 1e-13;
  return {pass, "min det = " + fmt("%.3g", min_det) + ", Jacobi residual " +
                    fmt("%.1e", worst_jacobi) + " over " + std::to_string(kTrajectories) +
                    " trajectories, spline reproduction " + fmt("%.1e", worst_spline) +
                    ", Gauss monomials " + fmt("%.1e", worst_gauss)};
}

const std::function<Outcome()> kCriteria[] = {criterion_1, criterion_2, criterion_3,
                                              criterion_4, criterion_5, criterion_6,
                                              criterion_7, criterion_8, criterion_9};

}  // namespace

int main(int argc, char** argv) {
  int only = 0;
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--criterion") == 0 && i + 1 < argc) {
      only = std::atoi(argv[++i]);
    } else if (std::strcmp(argv[i], "--extended") == 0) {
      g_extended = true;
    } else {
      std::fprintf(stderr, "usage: %s [--criterion N] [--extended]\n", argv[0]);
      return 64;
    }
  }
  if (only < 0 || only > 9) {
    std::fprintf(stderr, "criterion must be 1..9\n");
    return 64;
  }
  bool all = true;
  for (int n = 1; n <= 9; ++n) {
    if (only && n != only) continue;
    Outcome o;
    try {
      o = kCriteria[n - 1]();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    std::printf("criterion %d %s: %s\n", n, o.pass ? "PASS" : "FAIL", o.detail.c_str());
    std::fflush(stdout);
    all = all && o.pass;
  }
  return all ? 0 : 1;
}
