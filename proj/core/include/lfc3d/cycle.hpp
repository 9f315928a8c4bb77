#pragma once

#include <array>
#include <string>
#include <string_view>

#include "lfc3d/fields.hpp"
#include "lfc3d/spline.hpp"

namespace lfc3d {

struct CycleMetadata {
  double t0 = 0.0;
  double te = 1.0;
  double h = 0.0;   ///< spatial spacing 1/N
  double dt = 0.0;  ///< temporal spacing (te-t0)/M
  int kappa = 2;
  int n = 0;  ///< spatial intervals N
  int m = 0;  ///< temporal intervals M
};

/// The generating cycle as six spline patches:
///   P1 = S(t0), P2 = S(te) mapped back to t0, and the backward streak
///   surfaces of the four edges v=0..1 at u=0, u=1 at v=1, u=1 (v reversed)
///   and v=0 (u reversed). Streak patches use (i/N, j/M) with j the seed time.
/// The outward normal of patch i is signs[i] * -(S_u x S_v)/|S_u x S_v|.
struct GeneratingCycleMesh {
  std::array<TensorSpline, 6> patches;
  std::array<PointGrid, 6> knots;
  std::array<int, 6> signs{1, -1, 1, 1, 1, 1};
  CycleMetadata meta;
};

/// Builds the cycle with N = ceil(1/h) and M = ceil((te-t0)/dt); the temporal
/// spacing actually used is (te-t0)/M. Throws ArgumentError on invalid input;
/// flow-map failures propagate.
GeneratingCycleMesh build_generating_cycle(const VelocityField& u, const MovingSurface& surface,
                                           double t0, double te, double h, double dt, int kappa);

/// chi(z1, z2, tau) = S(z1, z2, t0 + tau (te-t0)) carried back to t0 with
/// `steps` fixed steps of the order-`kappa` scheme (no step taken at tau = 0).
Vec3 composite_map(const VelocityField& u, const MovingSurface& surface, double t0, double te,
                   double z1, double z2, double tau, int kappa, int steps);

/// Outward unit normal of patch `index` (0-based) at (a, b).
Vec3 patch_normal(const GeneratingCycleMesh& mesh, int index, double a, double b);

enum class MeshFormat { vtk, obj };

/// Parses "vtk" or "obj"; ArgumentError otherwise.
MeshFormat parse_mesh_format(std::string_view name);

/// Samples every patch on a (r+1) x (r+1) parameter lattice. Faces are wound
/// so that their right-hand normals point outward. VTK output is legacy ASCII
/// POLYDATA with quads and a per-cell "patch" id; OBJ output is triangulated
/// with one group P1..P6 per patch. Throws ArgumentError for r < 2.
std::string export_cycle_mesh(const GeneratingCycleMesh& mesh, MeshFormat format,
                              int resolution);

}  // namespace lfc3d
