#include "lfc3d/ray_mesh.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numeric>

#include "lfc3d/error.hpp"

namespace lfc3d {

namespace {

constexpr int kLeafSize = 4;
constexpr double kBaryTol = 1e-9;
constexpr double kAngleTol = 1e-9;

bool slab_hit(const Eigen::AlignedBox3d& box, const Vec3& o, const Vec3& inv, double pad) {
  double tmin = 0.0;
  double tmax = std::numeric_limits<double>::infinity();
  for (int k = 0; k < 3; ++k) {
    double t1 = (box.min()[k] - pad - o[k]) * inv[k];
    double t2 = (box.max()[k] + pad - o[k]) * inv[k];
    if (std::isnan(t1) || std::isnan(t2)) continue;  // origin on a slab plane of a flat axis
    if (t1 > t2) std::swap(t1, t2);
    tmin = std::max(tmin, t1);
    tmax = std::min(tmax, t2);
    if (tmin > tmax) return false;
  }
  return true;
}

// Closest point on triangle abc to p (Ericson, Real-Time Collision Detection 5.1.5).
Vec3 closest_on_triangle(const Vec3& p, const Vec3& a, const Vec3& b, const Vec3& c) {
  const Vec3 ab = b - a, ac = c - a, ap = p - a;
  const double d1 = ab.dot(ap), d2 = ac.dot(ap);
  if (d1 <= 0.0 && d2 <= 0.0) return a;
  const Vec3 bp = p - b;
  const double d3 = ab.dot(bp), d4 = ac.dot(bp);
  if (d3 >= 0.0 && d4 <= d3) return b;
  const double vc = d1 * d4 - d3 * d2;
  if (vc <= 0.0 && d1 >= 0.0 && d3 <= 0.0) return a + d1 / (d1 - d3) * ab;
  const Vec3 cp = p - c;
  const double d5 = ab.dot(cp), d6 = ac.dot(cp);
  if (d6 >= 0.0 && d5 <= d6) return c;
  const double vb = d5 * d2 - d1 * d6;
  if (vb <= 0.0 && d2 >= 0.0 && d6 <= 0.0) return a + d2 / (d2 - d6) * ac;
  const double va = d3 * d6 - d5 * d4;
  if (va <= 0.0 && (d4 - d3) >= 0.0 && (d5 - d6) >= 0.0) {
    return b + (d4 - d3) / ((d4 - d3) + (d5 - d6)) * (c - b);
  }
  const double denom = 1.0 / (va + vb + vc);
  return a + ab * (vb * denom) + ac * (vc * denom);
}

}  // namespace

TriangleMesh::TriangleMesh(std::vector<Triangle> triangles) : tris_(std::move(triangles)) {
  bounds_.setEmpty();
  std::vector<Vec3> centroids(tris_.size());
  for (std::size_t i = 0; i < tris_.size(); ++i) {
    const Triangle& t = tris_[i];
    bounds_.extend(t.a);
    bounds_.extend(t.b);
    bounds_.extend(t.c);
    centroids[i] = (t.a + t.b + t.c) / 3.0;
  }
  order_.resize(tris_.size());
  std::iota(order_.begin(), order_.end(), 0);
  nodes_.reserve(2 * tris_.size() / kLeafSize + 2);
  if (!tris_.empty()) build(0, static_cast<int>(tris_.size()), centroids);
}

int TriangleMesh::build(int first, int count, std::vector<Vec3>& centroids) {
  const int index = static_cast<int>(nodes_.size());
  nodes_.emplace_back();
  Eigen::AlignedBox3d box, cbox;
  box.setEmpty();
  cbox.setEmpty();
  for (int i = first; i < first + count; ++i) {
    const Triangle& t = tris_[order_[i]];
    box.extend(t.a);
    box.extend(t.b);
    box.extend(t.c);
    cbox.extend(centroids[order_[i]]);
  }
  nodes_[index].box = box;
  if (count <= kLeafSize) {
    nodes_[index].first = first;
    nodes_[index].count = count;
    return index;
  }
  int axis = 0;
  cbox.diagonal().maxCoeff(&axis);
  const int half = count / 2;
  std::nth_element(order_.begin() + first, order_.begin() + first + half,
                   order_.begin() + first + count, [&](int a, int b) {
                     return centroids[a][axis] < centroids[b][axis];
                   });
  const int left = build(first, half, centroids);
  const int right = build(first + half, count - half, centroids);
  nodes_[index].left = left;
  nodes_[index].right = right;
  return index;
}

TriangleMesh TriangleMesh::from_cycle(const GeneratingCycleMesh& mesh, int resolution) {
  if (resolution < 2) throw ArgumentError("tessellation resolution must be at least 2");
  const int r = resolution;
  std::vector<Triangle> tris;
  tris.reserve(static_cast<std::size_t>(12) * r * r);
  std::vector<Vec3> pts(static_cast<std::size_t>(r + 1) * (r + 1));
  for (int p = 0; p < 6; ++p) {
    for (int a = 0; a <= r; ++a)
      for (int b = 0; b <= r; ++b)
        pts[a * (r + 1) + b] =
            mesh.patches[p].eval(static_cast<double>(a) / r, static_cast<double>(b) / r);
    for (int a = 0; a < r; ++a) {
      for (int b = 0; b < r; ++b) {
        const Vec3& p00 = pts[a * (r + 1) + b];
        const Vec3& p01 = pts[a * (r + 1) + b + 1];
        const Vec3& p11 = pts[(a + 1) * (r + 1) + b + 1];
        const Vec3& p10 = pts[(a + 1) * (r + 1) + b];
        // (p00, p01, p11) has normal along S_v x S_u = -(S_u x S_v).
        if (mesh.signs[p] > 0) {
          tris.push_back({p00, p01, p11});
          tris.push_back({p00, p11, p10});
        } else {
          tris.push_back({p00, p11, p01});
          tris.push_back({p00, p10, p11});
        }
      }
    }
  }
  return TriangleMesh(std::move(tris));
}

RayCount TriangleMesh::cast(const Vec3& origin, const Vec3& dir, double tol) const {
  RayCount out;
  if (nodes_.empty()) return out;
  const Vec3 inv(1.0 / dir[0], 1.0 / dir[1], 1.0 / dir[2]);
  const double dnorm = dir.norm();
  std::array<int, 128> stack;
  int top = 0;
  stack[top++] = 0;
  while (top > 0) {
    const Node& node = nodes_[stack[--top]];
    if (!slab_hit(node.box, origin, inv, tol)) continue;
    if (node.left >= 0) {
      stack[top++] = node.left;
      stack[top++] = node.right;
      continue;
    }
    for (int i = node.first; i < node.first + node.count; ++i) {
      const Triangle& t = tris_[order_[i]];
      const Vec3 e1 = t.b - t.a;
      const Vec3 e2 = t.c - t.a;
      const Vec3 p = dir.cross(e2);
      const double det = e1.dot(p);
      if (det == 0.0) continue;
      const double inv_det = 1.0 / det;
      const Vec3 s = origin - t.a;
      const double u = s.dot(p) * inv_det;
      if (u < -kBaryTol || u > 1.0 + kBaryTol) continue;
      const Vec3 q = s.cross(e1);
      const double v = dir.dot(q) * inv_det;
      if (v < -kBaryTol || u + v > 1.0 + kBaryTol) continue;
      const double dist = e2.dot(q) * inv_det * dnorm;
      if (dist < -tol) continue;
      const double area2 = e1.cross(e2).norm();
      if (std::abs(dist) <= tol || u < kBaryTol || v < kBaryTol || 1.0 - u - v < kBaryTol ||
          std::abs(det) <= kAngleTol * area2 * dnorm) {
        out.degenerate = true;
        continue;
      }
      // d . n = -det for n = e1 x e2.
      out.crossings += det < 0.0 ? 1 : -1;
    }
  }
  return out;
}

double TriangleMesh::distance(const Vec3& p, double cutoff) const {
  double best = cutoff;
  if (nodes_.empty()) return best;
  std::array<int, 128> stack;
  int top = 0;
  stack[top++] = 0;
  while (top > 0) {
    const Node& node = nodes_[stack[--top]];
    if (node.box.exteriorDistance(p) >= best) continue;
    if (node.left >= 0) {
      stack[top++] = node.left;
      stack[top++] = node.right;
      continue;
    }
    for (int i = node.first; i < node.first + node.count; ++i) {
      const Triangle& t = tris_[order_[i]];
      best = std::min(best, (p - closest_on_triangle(p, t.a, t.b, t.c)).norm());
    }
  }
  return best;
}

}  // namespace lfc3d
