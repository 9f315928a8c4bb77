#include <cmath>
#include <functional>
#include <random>

#include <gtest/gtest.h>

#include "lfc3d/error.hpp"
#include "lfc3d/quad.hpp"

using namespace lfc3d;

namespace {

TensorSpline fit(const std::function<Vec3(double, double)>& g, int n, int order) {
  PointGrid grid(n, n);
  for (int i = 0; i <= n; ++i)
    for (int j = 0; j <= n; ++j) grid.at(i, j) = g(double(i) / n, double(j) / n);
  return fit_tensor_spline(grid, order);
}

ScalarField scalar(std::function<double(const Vec3&)> f) {
  ScalarField s;
  s.eval = [f](const Vec3& x, double) { return f(x); };
  return s;
}

}  // namespace

TEST(GaussLegendre, LowOrderRules) {
  const GaussRule& r2 = gauss_legendre(2);
  EXPECT_NEAR(r2.nodes[0], -1 / std::sqrt(3.0), 1e-15);
  EXPECT_NEAR(r2.nodes[1], 1 / std::sqrt(3.0), 1e-15);
  EXPECT_NEAR(r2.weights[0], 1.0, 1e-15);
  const GaussRule& r3 = gauss_legendre(3);
  EXPECT_NEAR(r3.nodes[0], -std::sqrt(0.6), 1e-15);
  EXPECT_NEAR(r3.nodes[1], 0.0, 1e-15);
  EXPECT_NEAR(r3.weights[0], 5.0 / 9, 1e-15);
  EXPECT_NEAR(r3.weights[1], 8.0 / 9, 1e-15);
  EXPECT_THROW(gauss_legendre(0), ArgumentError);
}

TEST(GaussLegendre, ExactForMonomialsUpToTwoPMinusOne) {
  for (int p = 1; p <= 24; ++p) {
    const GaussRule& r = gauss_legendre(p);
    for (int d = 0; d <= 2 * p - 1; ++d) {
      double sum = 0.0;
      for (int i = 0; i < p; ++i) sum += r.weights[i] * std::pow(r.nodes[i], d);
      const double exact = d % 2 ? 0.0 : 2.0 / (d + 1);
      EXPECT_NEAR(sum, exact, 1e-14) << "p=" << p << " d=" << d;
    }
  }
}

TEST(FluxCubatureSpec, MinimalCounts) {
  const FluxCubatureSpec s = FluxCubatureSpec::minimal(3, 4);
  EXPECT_EQ(s.n, 2);
  EXPECT_EQ(s.m, 9);
  EXPECT_EQ(s.h, 9);
  EXPECT_TRUE(s.exact);
  EXPECT_EQ(FluxCubatureSpec::minimal(0, 2).n, 1);
  EXPECT_EQ(FluxCubatureSpec::minimal(0, 2).m, 2);
  EXPECT_EQ(FluxCubatureSpec::minimal(4, 6).m, 18);
  EXPECT_EQ(s.scaled(2).m, 18);
}

TEST(SurfaceFlux, ConstantXPlane) {
  const double c = 0.7;
  const TensorSpline s = fit([c](double u, double v) { return Vec3(c, u, v); }, 4, 4);
  const double got =
      surface_flux_quadrature(s, scalar([](const Vec3&) { return 1.0; }), 0.0,
                              FluxCubatureSpec::minimal(0, 4));
  EXPECT_NEAR(got, -c, 1e-14);
}

TEST(SurfaceFlux, HorizontalPlaneCarriesNothing) {
  const TensorSpline s = fit([](double u, double v) { return Vec3(u, v, 0.3); }, 6, 6);
  const double got = surface_flux_quadrature(
      s, scalar([](const Vec3& x) { return 1 + x[0] * x[1]; }), 0.0, FluxCubatureSpec::minimal(2, 6));
  EXPECT_NEAR(got, 0.0, 1e-16);
}

TEST(SurfaceFlux, GraphOverYzSquare) {
  // x = uv over (y, z) = (u, v): the flux of F = int_0^x f is -int int F(uv, u, v).
  const TensorSpline s = fit([](double u, double v) { return Vec3(u * v, u, v); }, 5, 4);
  const ScalarField one = scalar([](const Vec3&) { return 1.0; });
  const ScalarField y = scalar([](const Vec3& x) { return x[1]; });
  EXPECT_NEAR(surface_flux_quadrature(s, one, 0.0, FluxCubatureSpec::minimal(0, 4)), -0.25, 1e-14);
  EXPECT_NEAR(surface_flux_quadrature(s, y, 0.0, FluxCubatureSpec::minimal(1, 4)), -1.0 / 6, 1e-14);
}

TEST(SurfaceFlux, ExactCountsReachThePlateau) {
  std::mt19937_64 rng(29);
  std::uniform_real_distribution<double> coef(-1.0, 1.0);
  for (int k : {2, 4, 6}) {
    const double a = coef(rng), b = coef(rng), c = coef(rng);
    const TensorSpline s = fit(
        [&](double u, double v) {
          return Vec3(a * u * v + 0.2 * std::pow(u, k - 1), u + b * v * v * (k > 2), v + c * u);
        },
        7, k);
    for (int q = 0; q <= 4; ++q) {
      const ScalarField f = scalar([q](const Vec3& x) {
        return std::pow(x[0], q) + std::pow(x[1] - x[2], q > 0 ? q - 1 : 0);
      });
      const FluxCubatureSpec spec = FluxCubatureSpec::minimal(q, k, 0.3);
      const double base = surface_flux_quadrature(s, f, 0.0, spec);
      const double fine = surface_flux_quadrature(s, f, 0.0, spec.scaled(3));
      EXPECT_NEAR(base, fine, 1e-13 * std::max(1.0, std::abs(fine))) << "k=" << k << " q=" << q;
    }
  }
}

TEST(SurfaceFlux, ConfigurationChecks) {
  const TensorSpline s = fit([](double u, double v) { return Vec3(u, v, u * v); }, 6, 4);
  const ScalarField one = scalar([](const Vec3&) { return 1.0; });
  FluxCubatureSpec low = FluxCubatureSpec::minimal(3, 4);
  low.m -= 1;
  EXPECT_THROW(surface_flux_quadrature(s, one, 0.0, low), ConfigurationError);
  EXPECT_THROW(surface_flux_quadrature(s, one, 0.0, FluxCubatureSpec::minimal(3, 6)),
               ConfigurationError);
  low.exact = false;
  EXPECT_NO_THROW(surface_flux_quadrature(s, one, 0.0, low));
  FluxCubatureSpec zero = FluxCubatureSpec::minimal(1, 4);
  zero.n = 0;
  EXPECT_THROW(surface_flux_quadrature(s, one, 0.0, zero), ArgumentError);
}

TEST(SurfaceFlux, LinearInTheScalar) {
  const TensorSpline s = fit(
      [](double u, double v) { return Vec3(std::sin(u + v), u * u + v, std::cos(2 * v) * u); }, 8, 6);
  const ScalarField f = scalar([](const Vec3& x) { return std::exp(x[0]) * x[1]; });
  const ScalarField g = scalar([](const Vec3& x) { return x[2] * x[2] - x[0]; });
  const ScalarField h = scalar([&](const Vec3& x) { return 2.5 * f(x, 0) - 0.75 * g(x, 0); });
  FluxCubatureSpec spec = FluxCubatureSpec::minimal(4, 6);
  spec.exact = false;
  const double lhs = surface_flux_quadrature(s, h, 0.0, spec);
  const double rhs = 2.5 * surface_flux_quadrature(s, f, 0.0, spec) -
                     0.75 * surface_flux_quadrature(s, g, 0.0, spec);
  EXPECT_NEAR(lhs, rhs, 1e-13);
}

TEST(SurfaceFlux, AnalyticInnerUsesTheAntiderivative) {
  const TensorSpline s = fit([](double u, double v) { return Vec3(0.5 + 0.3 * u * v, u, v); }, 6, 4);
  ScalarField f = scalar([](const Vec3& x) { return std::cos(3 * x[0]); });
  f.antiderivative = [](const Vec3& x, double, double xi) {
    return (std::sin(3 * x[0]) - std::sin(3 * xi)) / 3;
  };
  FluxCubatureSpec spec = FluxCubatureSpec::minimal(2, 4);
  spec.n = 1;
  spec.exact = false;
  const double crude = surface_flux_quadrature(s, f, 0.0, spec);
  spec.analytic_inner = true;
  const double analytic = surface_flux_quadrature(s, f, 0.0, spec);
  spec.analytic_inner = false;
  spec.n = 16;
  const double gauss = surface_flux_quadrature(s, f, 0.0, spec);
  EXPECT_NEAR(analytic, gauss, 1e-14);
  EXPECT_GT(std::abs(crude - gauss), 1e-3);
}
