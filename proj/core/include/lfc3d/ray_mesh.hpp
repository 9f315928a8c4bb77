#pragma once

#include <vector>

#include <Eigen/Geometry>

#include "lfc3d/cycle.hpp"
#include "lfc3d/types.hpp"

namespace lfc3d {

/// Oriented triangle; its outward normal is (b - a) x (c - a).
struct Triangle {
  Vec3 a, b, c;
};

/// Outcome of casting one ray against the mesh.
struct RayCount {
  int crossings = 0;      ///< sum of sgn(d . n) over hits
  bool degenerate = false;  ///< a hit grazed an edge, a vertex or the face plane
};

/// Triangle soup with a bounding-volume hierarchy for signed ray counting.
class TriangleMesh {
 public:
  TriangleMesh() = default;
  explicit TriangleMesh(std::vector<Triangle> triangles);

  /// Tessellates every patch of the cycle at `resolution` cells per edge,
  /// two triangles per cell, wound outward.
  static TriangleMesh from_cycle(const GeneratingCycleMesh& mesh, int resolution);

  const std::vector<Triangle>& triangles() const { return tris_; }
  const Eigen::AlignedBox3d& bounds() const { return bounds_; }
  double diagonal() const { return bounds_.diagonal().norm(); }

  /// Signed crossings of the ray origin + s*dir, s > 0. A hit within `tol`
  /// of the origin, within relative 1e-9 of a triangle edge, or at a
  /// near-parallel angle marks the count degenerate.
  RayCount cast(const Vec3& origin, const Vec3& dir, double tol) const;

  /// Distance from p to the nearest triangle, or `cutoff` if that is smaller.
  double distance(const Vec3& p, double cutoff) const;

 private:
  struct Node {
    Eigen::AlignedBox3d box;
    int left = -1;   // child index, or -1 for a leaf
    int right = -1;
    int first = 0;   // leaf range into order_
    int count = 0;
  };

  int build(int first, int count, std::vector<Vec3>& centroids);

  std::vector<Triangle> tris_;
  std::vector<int> order_;
  std::vector<Node> nodes_;
  Eigen::AlignedBox3d bounds_;
};

}  // namespace lfc3d
