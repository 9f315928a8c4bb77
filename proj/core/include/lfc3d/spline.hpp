#pragma once

#include <vector>

#include <Eigen/Core>

#include "lfc3d/types.hpp"

namespace lfc3d {

/// Samples on a uniform (nu+1) x (nv+1) parameter grid; point (i, j) sits at
/// (i/nu, j/nv). Storage is row-major in i.
struct PointGrid {
  int nu = 0;
  int nv = 0;
  std::vector<Vec3> points;

  PointGrid() = default;
  PointGrid(int intervals_u, int intervals_v)
      : nu(intervals_u), nv(intervals_v), points((nu + 1) * (nv + 1), Vec3::Zero()) {}

  Vec3& at(int i, int j) { return points[i * (nv + 1) + j]; }
  const Vec3& at(int i, int j) const { return points[i * (nv + 1) + j]; }
};

/// Univariate B-spline basis of a given order over the data sites i/N,
/// i = 0..N, with not-a-knot end conditions: the interior knots are the data
/// sites x_{k/2} .. x_{N-k/2} for order k. Order 2 gives the piecewise-linear
/// interpolant, 4 the cubic and 6 the quintic not-a-knot spline.
class SplineBasis {
 public:
  SplineBasis() = default;
  SplineBasis(int order, int intervals);

  int order() const { return order_; }
  int degree() const { return order_ - 1; }
  int intervals() const { return intervals_; }
  int size() const { return intervals_ + 1; }
  const std::vector<double>& knots() const { return knots_; }

  /// Span s with knots[s] <= x < knots[s+1]; x == 1 maps to the last span.
  int span(double x) const;

  /// The order() basis functions that are nonzero on `span` (indices
  /// span-degree .. span) and, when `derivs` is non-null, their derivatives.
  void eval(int span, double x, double* values, double* derivs = nullptr) const;

  /// B_j(x_i) for the data sites x_i.
  Eigen::MatrixXd collocation() const;

 private:
  int order_ = 0;
  int intervals_ = 0;
  std::vector<double> knots_;
};

/// Vector-valued tensor-product interpolating spline on [0,1]^2.
class TensorSpline {
 public:
  TensorSpline() = default;

  int order() const { return basis_u_.order(); }
  int intervals_u() const { return basis_u_.intervals(); }
  int intervals_v() const { return basis_v_.intervals(); }
  const SplineBasis& basis_u() const { return basis_u_; }
  const SplineBasis& basis_v() const { return basis_v_; }

  /// B-spline coefficient (i, j), i over u.
  const Vec3& coefficient(int i, int j) const { return coef_[i * basis_v_.size() + j]; }

  /// Value (du = dv = 0) or partial derivative; du, dv in {0, 1}.
  /// Throws DomainError outside [0,1]^2.
  Vec3 eval(double u, double v, int du = 0, int dv = 0) const;

  /// Value and both first partials in one pass.
  void eval_with_partials(double u, double v, Vec3& value, Vec3& su, Vec3& sv) const;

  friend TensorSpline fit_tensor_spline(const PointGrid& grid, int order);

 private:
  SplineBasis basis_u_;
  SplineBasis basis_v_;
  std::vector<Vec3> coef_;
};

/// Interpolating tensor-product spline of order 2, 4 or 6 through every grid
/// point. Throws InsufficientDataError if either direction has fewer than
/// order-1 intervals and ArgumentError for an unsupported order or
/// non-finite data.
TensorSpline fit_tensor_spline(const PointGrid& grid, int order);

/// Spline value or first partial with derivative multi-index (a, b).
Vec3 spline_eval(const TensorSpline& s, double u, double v, int a = 0, int b = 0);

/// Signed d(y,z)/d(u,v) = y_u z_v - y_v z_u.
double jacobian_yz(const TensorSpline& s, double u, double v);

}  // namespace lfc3d
