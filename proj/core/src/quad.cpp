#include "lfc3d/quad.hpp"

#include <array>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <string>

#include "lfc3d/error.hpp"
#include "lfc3d/parallel.hpp"

namespace lfc3d {

namespace {

constexpr int kMaxOrder = 6;

GaussRule compute_rule(int p) {
  GaussRule rule;
  rule.p = p;
  rule.nodes.resize(p);
  rule.weights.resize(p);
  for (int i = 0; i < (p + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (p + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= p; ++k) {
        const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = pk;
      }
      dp = p * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    // Recompute the derivative at the converged root for the weight.
    double p0 = 1.0, p1 = x;
    for (int k = 2; k <= p; ++k) {
      const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = pk;
    }
    dp = p * (x * p1 - p0) / (x * x - 1.0);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[i] = -x;
    rule.nodes[p - 1 - i] = x;
    rule.weights[i] = w;
    rule.weights[p - 1 - i] = w;
  }
  if (p % 2 == 1) rule.nodes[p / 2] = 0.0;
  return rule;
}

// Basis values of one spline direction at the Gauss nodes of every data interval.
struct NodeBasis {
  int order = 0;
  int nodes = 0;
  std::vector<int> first;        // first nonzero basis index per interval
  std::vector<double> value;     // [interval][node][order]
  std::vector<double> deriv;
  std::vector<double> position;  // [interval][node]
};

NodeBasis tabulate(const SplineBasis& basis, const GaussRule& rule) {
  NodeBasis nb;
  nb.order = basis.order();
  nb.nodes = rule.p;
  const int pieces = basis.intervals();
  const double width = 1.0 / pieces;
  nb.first.resize(pieces);
  nb.value.resize(static_cast<std::size_t>(pieces) * rule.p * nb.order);
  nb.deriv.resize(nb.value.size());
  nb.position.resize(static_cast<std::size_t>(pieces) * rule.p);
  for (int l = 0; l < pieces; ++l) {
    const double a = static_cast<double>(l) / pieces;
    const int span = basis.span(a + 0.5 * width);
    nb.first[l] = span - basis.degree();
    for (int j = 0; j < rule.p; ++j) {
      const double x = a + 0.5 * width * (rule.nodes[j] + 1.0);
      const std::size_t off = (static_cast<std::size_t>(l) * rule.p + j) * nb.order;
      basis.eval(span, x, &nb.value[off], &nb.deriv[off]);
      nb.position[static_cast<std::size_t>(l) * rule.p + j] = x;
    }
  }
  return nb;
}

}  // namespace

const GaussRule& gauss_legendre(int p) {
  if (p < 1) throw ArgumentError("Gauss-Legendre rule needs p >= 1 (got " + std::to_string(p) + ")");
  static std::mutex mutex;
  static std::map<int, std::unique_ptr<GaussRule>> cache;
  std::lock_guard<std::mutex> lock(mutex);
  auto& slot = cache[p];
  if (!slot) slot = std::make_unique<GaussRule>(compute_rule(p));
  return *slot;
}

int FluxCubatureSpec::min_n(int q) { return (q + 2) / 2; }

int FluxCubatureSpec::min_mh(int q, int kappa) {
  const int prod = (q + 3) * (kappa - 1);
  return (prod + 1) / 2;
}

FluxCubatureSpec FluxCubatureSpec::minimal(int q, int kappa, double xi) {
  FluxCubatureSpec s;
  s.q = q;
  s.kappa = kappa;
  s.n = min_n(q);
  s.m = s.h = min_mh(q, kappa);
  s.xi = xi;
  s.exact = true;
  return s;
}

FluxCubatureSpec FluxCubatureSpec::scaled(int factor) const {
  FluxCubatureSpec s = *this;
  s.n *= factor;
  s.m *= factor;
  s.h *= factor;
  return s;
}

double surface_flux_quadrature(const TensorSpline& s, const ScalarField& f, double t,
                               const FluxCubatureSpec& spec) {
  if (spec.n < 1 || spec.m < 1 || spec.h < 1) {
    throw ArgumentError("quadrature node counts must be positive");
  }
  if (spec.exact) {
    if (spec.kappa != s.order()) {
      throw ConfigurationError("cubature sized for order " + std::to_string(spec.kappa) +
                               " applied to an order-" + std::to_string(s.order()) + " spline");
    }
    const int n_min = FluxCubatureSpec::min_n(spec.q);
    const int mh_min = FluxCubatureSpec::min_mh(spec.q, spec.kappa);
    if (spec.n < n_min || spec.m < mh_min || spec.h < mh_min) {
      throw ConfigurationError("node counts (n, m, h) = (" + std::to_string(spec.n) + ", " +
                               std::to_string(spec.m) + ", " + std::to_string(spec.h) +
                               ") are below the exactness bound (" + std::to_string(n_min) +
                               ", " + std::to_string(mh_min) + ", " + std::to_string(mh_min) +
                               ") for q = " + std::to_string(spec.q));
    }
  }

  const GaussRule& rule_s = gauss_legendre(spec.n);
  const GaussRule& rule_u = gauss_legendre(spec.m);
  const GaussRule& rule_v = gauss_legendre(spec.h);
  const NodeBasis bu = tabulate(s.basis_u(), rule_u);
  const NodeBasis bv = tabulate(s.basis_v(), rule_v);
  const int k = s.order();
  const int pu = s.intervals_u();
  const int pv = s.intervals_v();
  const double scale = (0.5 / pu) * (0.5 / pv);
  const double xi = spec.xi;
  const bool analytic = spec.analytic_inner && static_cast<bool>(f.antiderivative);

  std::vector<double> piece_sum(static_cast<std::size_t>(pu) * pv, 0.0);
  parallel_for(static_cast<std::ptrdiff_t>(pu) * pv, [&](std::ptrdiff_t idx) {
    const int l1 = static_cast<int>(idx / pv);
    const int l2 = static_cast<int>(idx % pv);
    const int a0 = bu.first[l1];
    const int b0 = bv.first[l2];
    // Contract the coefficient block with the v basis first.
    std::vector<std::array<Vec3, kMaxOrder>> tv(spec.h), dtv(spec.h);
    for (int kk = 0; kk < spec.h; ++kk) {
      const double* wv = &bv.value[(static_cast<std::size_t>(l2) * spec.h + kk) * k];
      const double* dwv = &bv.deriv[(static_cast<std::size_t>(l2) * spec.h + kk) * k];
      for (int a = 0; a < k; ++a) {
        Vec3 acc = Vec3::Zero(), dacc = Vec3::Zero();
        for (int b = 0; b < k; ++b) {
          const Vec3& c = s.coefficient(a0 + a, b0 + b);
          acc += wv[b] * c;
          dacc += dwv[b] * c;
        }
        tv[kk][a] = acc;
        dtv[kk][a] = dacc;
      }
    }
    double sum = 0.0;
    for (int j = 0; j < spec.m; ++j) {
      const double* wu = &bu.value[(static_cast<std::size_t>(l1) * spec.m + j) * k];
      const double* dwu = &bu.deriv[(static_cast<std::size_t>(l1) * spec.m + j) * k];
      for (int kk = 0; kk < spec.h; ++kk) {
        Vec3 x = Vec3::Zero(), su = Vec3::Zero(), sv = Vec3::Zero();
        for (int a = 0; a < k; ++a) {
          x += wu[a] * tv[kk][a];
          su += dwu[a] * tv[kk][a];
          sv += wu[a] * dtv[kk][a];
        }
        const double jac = su[1] * sv[2] - sv[1] * su[2];
        const double w = rule_u.weights[j] * rule_v.weights[kk] * jac;
        if (analytic) {
          if (jac != 0.0) sum -= w * f.antiderivative(x, t, xi);
          continue;
        }
        const double half = 0.5 * (x[0] - xi);
        if (jac == 0.0 || half == 0.0) continue;
        const double mid = 0.5 * (x[0] + xi);
        double inner = 0.0;
        for (int i = 0; i < spec.n; ++i) {
          const Vec3 pt(half * rule_s.nodes[i] + mid, x[1], x[2]);
          inner += rule_s.weights[i] * f.eval(pt, t);
        }
        sum -= w * half * inner;
      }
    }
    piece_sum[idx] = sum * scale;
  });
  return pairwise_sum(piece_sum);
}

}  // namespace lfc3d
