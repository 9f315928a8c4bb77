#pragma once

#include <vector>

#include "lfc3d/fields.hpp"
#include "lfc3d/spline.hpp"

namespace lfc3d {

/// p-point Gauss-Legendre rule on [-1, 1], nodes ascending.
struct GaussRule {
  int p = 0;
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// Legendre roots by Newton iteration from Chebyshev guesses. Rules are
/// cached, so repeated calls are cheap. Throws ArgumentError for p < 1.
const GaussRule& gauss_legendre(int p);

/// Node counts for the antiderivative surface cubature: n nodes along the
/// antiderivative segment [xi, x], m along u and h along v of each piece.
struct FluxCubatureSpec {
  int q = 0;       ///< total-degree bound of f the counts are sized for
  int kappa = 2;   ///< spline order
  int n = 1;
  int m = 1;
  int h = 1;
  double xi = 0.0;
  bool exact = false;  ///< reject counts below the exactness bound
  /// Use ScalarField::antiderivative for F when the field provides one.
  /// The segment [xi, x] does not shrink with h, so the n-point rule leaves
  /// an h-independent error for non-polynomial f.
  bool analytic_inner = false;

  /// n = ceil((q+1)/2), m = h = ceil((q+3)(kappa-1)/2), exact mode on.
  static FluxCubatureSpec minimal(int q, int kappa, double xi = 0.0);

  static int min_n(int q);
  static int min_mh(int q, int kappa);

  /// Same bounds scaled by `factor`, exact mode kept.
  FluxCubatureSpec scaled(int factor) const;
};

/// I_q(S, f): integral of F dy^dz over the patch, F(x,y,z) = int_xi^x f(s,y,z,t) ds,
/// with F itself evaluated by the inner n-point rule (or analytically, see
/// FluxCubatureSpec::analytic_inner).
///
/// Each uniform data interval of the spline is a single polynomial piece, so
/// the sum over pieces is exact for polynomial f of total degree <= q. The
/// weight carries the signed d(y,z)/d(u,v); together with the leading minus
/// this is the pullback of dy^dz with the normal -(S_u x S_v).
///
/// Throws ConfigurationError in exact mode when the counts are too small or
/// kappa differs from the spline order.
double surface_flux_quadrature(const TensorSpline& s, const ScalarField& f, double t,
                               const FluxCubatureSpec& spec);

}  // namespace lfc3d
