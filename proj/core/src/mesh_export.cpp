#include <array>
#include <cstdio>
#include <string>
#include <utility>
#include <vector>

#include "lfc3d/cycle.hpp"
#include "lfc3d/error.hpp"

namespace lfc3d {

namespace {

void append_point(std::string& out, const char* prefix, const Vec3& p) {
  char buf[128];
  std::snprintf(buf, sizeof buf, "%s%.17g %.17g %.17g\n", prefix, p[0], p[1], p[2]);
  out += buf;
}

// Lattice (r+1)^2 per patch, index a*(r+1)+b for parameters (a/r, b/r).
std::vector<Vec3> sample_patch(const TensorSpline& s, int r) {
  std::vector<Vec3> pts;
  pts.reserve(static_cast<std::size_t>(r + 1) * (r + 1));
  for (int a = 0; a <= r; ++a)
    for (int b = 0; b <= r; ++b)
      pts.push_back(s.eval(static_cast<double>(a) / r, static_cast<double>(b) / r));
  return pts;
}

// Quad corners of cell (a, b) wound clockwise in (u, v), so the right-hand
// normal is -(S_u x S_v); reversed for patches with sign -1.
std::array<int, 4> cell_quad(int a, int b, int r, int sign) {
  const int w = r + 1;
  std::array<int, 4> q{a * w + b, a * w + b + 1, (a + 1) * w + b + 1, (a + 1) * w + b};
  if (sign < 0) std::swap(q[1], q[3]);
  return q;
}

}  // namespace

MeshFormat parse_mesh_format(std::string_view name) {
  if (name == "vtk") return MeshFormat::vtk;
  if (name == "obj") return MeshFormat::obj;
  throw ArgumentError("unsupported mesh format '" + std::string(name) + "' (use vtk or obj)");
}

std::string export_cycle_mesh(const GeneratingCycleMesh& mesh, MeshFormat format,
                              int resolution) {
  if (resolution < 2) throw ArgumentError("mesh resolution must be at least 2");
  const int r = resolution;
  const int per_patch = (r + 1) * (r + 1);
  std::string out;
  if (format == MeshFormat::obj) {
    out += "# generating cycle, 6 patches\n";
    for (int p = 0; p < 6; ++p) {
      out += "g P" + std::to_string(p + 1) + "\n";
      for (const Vec3& x : sample_patch(mesh.patches[p], r)) append_point(out, "v ", x);
      const int base = p * per_patch + 1;
      for (int a = 0; a < r; ++a) {
        for (int b = 0; b < r; ++b) {
          const auto q = cell_quad(a, b, r, mesh.signs[p]);
          out += "f " + std::to_string(base + q[0]) + " " + std::to_string(base + q[1]) + " " +
                 std::to_string(base + q[2]) + "\n";
          out += "f " + std::to_string(base + q[0]) + " " + std::to_string(base + q[2]) + " " +
                 std::to_string(base + q[3]) + "\n";
        }
      }
    }
    return out;
  }

  out += "# vtk DataFile Version 3.0\ngenerating cycle\nASCII\nDATASET POLYDATA\n";
  out += "POINTS " + std::to_string(6 * per_patch) + " double\n";
  for (int p = 0; p < 6; ++p)
    for (const Vec3& x : sample_patch(mesh.patches[p], r)) append_point(out, "", x);
  const int cells = 6 * r * r;
  out += "POLYGONS " + std::to_string(cells) + " " + std::to_string(5 * cells) + "\n";
  for (int p = 0; p < 6; ++p) {
    const int base = p * per_patch;
    for (int a = 0; a < r; ++a) {
      for (int b = 0; b < r; ++b) {
        const auto q = cell_quad(a, b, r, mesh.signs[p]);
        out += "4 " + std::to_string(base + q[0]) + " " + std::to_string(base + q[1]) + " " +
               std::to_string(base + q[2]) + " " + std::to_string(base + q[3]) + "\n";
      }
    }
  }
  out += "CELL_DATA " + std::to_string(cells) + "\nSCALARS patch int 1\nLOOKUP_TABLE default\n";
  for (int p = 0; p < 6; ++p)
    for (int c = 0; c < r * r; ++c) out += std::to_string(p + 1) + "\n";
  return out;
}

}  // namespace lfc3d
