#include "lfc3d/spline.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

#include <Eigen/LU>

#include "lfc3d/error.hpp"

namespace lfc3d {

namespace {

constexpr int kMaxOrder = 6;
constexpr double kDomainSlack = 1e-12;

double clamp_param(double x, const char* name) {
  if (!(x >= -kDomainSlack && x <= 1.0 + kDomainSlack)) {
    throw DomainError(std::string("spline parameter ") + name + " = " + std::to_string(x) +
                      " is outside [0, 1]");
  }
  return std::clamp(x, 0.0, 1.0);
}

// Cox-de Boor triangle up to degree `p`; out[r] is the value of function span-p+r.
void basis_upto(const std::vector<double>& t, int span, double x, int p, double* out) {
  std::array<double, kMaxOrder + 1> left{}, right{};
  out[0] = 1.0;
  for (int j = 1; j <= p; ++j) {
    left[j] = x - t[span + 1 - j];
    right[j] = t[span + j] - x;
    double saved = 0.0;
    for (int r = 0; r < j; ++r) {
      const double tmp = out[r] / (right[r + 1] + left[j - r]);
      out[r] = saved + right[r + 1] * tmp;
      saved = left[j - r] * tmp;
    }
    out[j] = saved;
  }
}

}  // namespace

SplineBasis::SplineBasis(int order, int intervals) : order_(order), intervals_(intervals) {
  const int p = order - 1;
  knots_.reserve(intervals + order + 1);
  for (int i = 0; i <= p; ++i) knots_.push_back(0.0);
  const int half = order / 2;
  for (int i = half; i <= intervals - half; ++i) {
    knots_.push_back(static_cast<double>(i) / intervals);
  }
  for (int i = 0; i <= p; ++i) knots_.push_back(1.0);
}

int SplineBasis::span(double x) const {
  const int p = degree();
  const int last = intervals_;  // index of the last basis function
  auto it = std::upper_bound(knots_.begin() + p, knots_.begin() + last + 1, x);
  const int s = static_cast<int>(it - knots_.begin()) - 1;
  return std::clamp(s, p, last);
}

void SplineBasis::eval(int span, double x, double* values, double* derivs) const {
  const int p = degree();
  if (!derivs) {
    basis_upto(knots_, span, x, p, values);
    return;
  }
  std::array<double, kMaxOrder + 1> lower{};
  if (p == 0) {
    values[0] = 1.0;
    derivs[0] = 0.0;
    return;
  }
  basis_upto(knots_, span, x, p - 1, lower.data());
  // lower[r] is function span-p+1+r at degree p-1.
  for (int r = 0; r <= p; ++r) {
    const int i = span - p + r;
    double d = 0.0;
    if (r >= 1) d += lower[r - 1] / (knots_[i + p] - knots_[i]);
    if (r <= p - 1) d -= lower[r] / (knots_[i + p + 1] - knots_[i + 1]);
    derivs[r] = p * d;
  }
  basis_upto(knots_, span, x, p, values);
}

Eigen::MatrixXd SplineBasis::collocation() const {
  const int n = size();
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
  std::array<double, kMaxOrder> vals{};
  for (int i = 0; i < n; ++i) {
    const double x = static_cast<double>(i) / intervals_;
    const int s = span(x);
    eval(s, x, vals.data());
    for (int r = 0; r < order_; ++r) a(i, s - degree() + r) = vals[r];
  }
  return a;
}

TensorSpline fit_tensor_spline(const PointGrid& grid, int order) {
  if (order != 2 && order != 4 && order != 6) {
    throw ArgumentError("spline order must be 2, 4 or 6 (got " + std::to_string(order) + ")");
  }
  if (grid.nu < order - 1 || grid.nv < order - 1) {
    throw InsufficientDataError("order-" + std::to_string(order) + " spline needs at least " +
                                std::to_string(order - 1) + " intervals per direction (got " +
                                std::to_string(grid.nu) + " x " + std::to_string(grid.nv) + ")");
  }
  if (static_cast<int>(grid.points.size()) != (grid.nu + 1) * (grid.nv + 1)) {
    throw ArgumentError("spline grid has the wrong number of points");
  }
  for (const Vec3& p : grid.points) {
    if (!p.allFinite()) throw ArgumentError("spline grid contains a non-finite point");
  }

  TensorSpline s;
  s.basis_u_ = SplineBasis(order, grid.nu);
  s.basis_v_ = SplineBasis(order, grid.nv);
  const int nu = grid.nu + 1;
  const int nv = grid.nv + 1;
  const Eigen::PartialPivLU<Eigen::MatrixXd> lu_u(s.basis_u_.collocation());
  const Eigen::PartialPivLU<Eigen::MatrixXd> lu_v(s.basis_v_.collocation());

  s.coef_.assign(static_cast<std::size_t>(nu) * nv, Vec3::Zero());
  for (int c = 0; c < 3; ++c) {
    Eigen::MatrixXd data(nu, nv);
    for (int i = 0; i < nu; ++i)
      for (int j = 0; j < nv; ++j) data(i, j) = grid.at(i, j)[c];
    // Columns along u, then rows along v.
    const Eigen::MatrixXd x = lu_u.solve(data);
    const Eigen::MatrixXd ct = lu_v.solve(x.transpose());
    for (int i = 0; i < nu; ++i)
      for (int j = 0; j < nv; ++j) s.coef_[i * nv + j][c] = ct(j, i);
  }
  return s;
}

void TensorSpline::eval_with_partials(double u, double v, Vec3& value, Vec3& su,
                                      Vec3& sv) const {
  u = clamp_param(u, "u");
  v = clamp_param(v, "v");
  const int k = order();
  const int p = k - 1;
  const int span_u = basis_u_.span(u);
  const int span_v = basis_v_.span(v);
  std::array<double, kMaxOrder> bu{}, dbu{}, bv{}, dbv{};
  basis_u_.eval(span_u, u, bu.data(), dbu.data());
  basis_v_.eval(span_v, v, bv.data(), dbv.data());
  value.setZero();
  su.setZero();
  sv.setZero();
  const int nv = basis_v_.size();
  for (int a = 0; a < k; ++a) {
    Vec3 row = Vec3::Zero();
    Vec3 row_dv = Vec3::Zero();
    const Vec3* c = &coef_[(span_u - p + a) * nv + (span_v - p)];
    for (int b = 0; b < k; ++b) {
      row += bv[b] * c[b];
      row_dv += dbv[b] * c[b];
    }
    value += bu[a] * row;
    su += dbu[a] * row;
    sv += bu[a] * row_dv;
  }
}

Vec3 TensorSpline::eval(double u, double v, int du, int dv) const {
  if (du < 0 || du > 1 || dv < 0 || dv > 1) {
    throw ArgumentError("spline derivative orders must be 0 or 1");
  }
  u = clamp_param(u, "u");
  v = clamp_param(v, "v");
  const int k = order();
  const int p = k - 1;
  const int span_u = basis_u_.span(u);
  const int span_v = basis_v_.span(v);
  std::array<double, kMaxOrder> bu{}, dbu{}, bv{}, dbv{};
  basis_u_.eval(span_u, u, bu.data(), dbu.data());
  basis_v_.eval(span_v, v, bv.data(), dbv.data());
  const auto& wu = du ? dbu : bu;
  const auto& wv = dv ? dbv : bv;
  const int nv = basis_v_.size();
  Vec3 out = Vec3::Zero();
  for (int a = 0; a < k; ++a) {
    Vec3 row = Vec3::Zero();
    const Vec3* c = &coef_[(span_u - p + a) * nv + (span_v - p)];
    for (int b = 0; b < k; ++b) row += wv[b] * c[b];
    out += wu[a] * row;
  }
  return out;
}

Vec3 spline_eval(const TensorSpline& s, double u, double v, int a, int b) {
  return s.eval(u, v, a, b);
}

double jacobian_yz(const TensorSpline& s, double u, double v) {
  Vec3 value, su, sv;
  s.eval_with_partials(u, v, value, su, sv);
  return su[1] * sv[2] - sv[1] * su[2];
}

}  // namespace lfc3d
