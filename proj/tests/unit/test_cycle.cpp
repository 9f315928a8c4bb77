#include <cmath>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "lfc3d/cycle.hpp"
#include "lfc3d/error.hpp"

using namespace lfc3d;

namespace {

GeneratingCycleMesh cycle_for(const std::string& name, int n, int kappa) {
  const PresetCase c = make_preset(name);
  return build_generating_cycle(c.velocity, c.surface, c.t0, c.te, 1.0 / n, (c.te - c.t0) / n,
                                kappa);
}

struct Obj {
  std::vector<Vec3> vertices;
  std::vector<std::array<int, 3>> faces;
  std::vector<std::string> groups;
};

Obj parse_obj(const std::string& text) {
  Obj obj;
  std::istringstream in(text);
  std::string tag;
  while (in >> tag) {
    if (tag == "v") {
      Vec3 p;
      in >> p[0] >> p[1] >> p[2];
      obj.vertices.push_back(p);
    } else if (tag == "f") {
      std::array<int, 3> f;
      in >> f[0] >> f[1] >> f[2];
      obj.faces.push_back(f);
    } else if (tag == "g") {
      std::string g;
      in >> g;
      obj.groups.push_back(g);
    } else {
      std::getline(in, tag);
    }
  }
  return obj;
}

double enclosed_volume(const Obj& obj) {
  double v = 0.0;
  for (const auto& f : obj.faces) {
    const Vec3& a = obj.vertices[f[0] - 1];
    const Vec3& b = obj.vertices[f[1] - 1];
    const Vec3& c = obj.vertices[f[2] - 1];
    v += a.dot(b.cross(c)) / 6;
  }
  return v;
}

}  // namespace

TEST(GeneratingCycle, MetadataAndArguments) {
  const GeneratingCycleMesh mesh = cycle_for("leveque-static", 16, 4);
  EXPECT_EQ(mesh.meta.n, 16);
  EXPECT_EQ(mesh.meta.m, 16);
  EXPECT_DOUBLE_EQ(mesh.meta.dt, 1.5 / 16);
  EXPECT_EQ(mesh.signs, (std::array<int, 6>{1, -1, 1, 1, 1, 1}));
  EXPECT_EQ(mesh.knots[2].nu, 16);
  EXPECT_EQ(mesh.knots[2].nv, 16);

  const PresetCase c = make_preset("zero-flow");
  EXPECT_THROW(build_generating_cycle(c.velocity, c.surface, 0, 1, 0.1, 0.1, 3), ArgumentError);
  EXPECT_THROW(build_generating_cycle(c.velocity, c.surface, 1, 0, 0.1, 0.1, 4), ArgumentError);
  EXPECT_THROW(build_generating_cycle(c.velocity, c.surface, 0, 1, 0.0, 0.1, 4), ArgumentError);
  EXPECT_THROW(build_generating_cycle(c.velocity, c.surface, 0, 1, 0.1, -0.1, 4), ArgumentError);
  EXPECT_THROW(build_generating_cycle(c.velocity, c.surface, 0, 1, 0.25, 0.1, 6),
               InsufficientDataError);
}

TEST(GeneratingCycle, TranslateDemoKnotLoci) {
  const int n = 8;
  const GeneratingCycleMesh mesh = cycle_for("translate-demo", n, 4);
  for (int i = 0; i <= n; ++i) {
    for (int j = 0; j <= n; ++j) {
      const double s = double(i) / n, tau = double(j) / n;
      EXPECT_LT((mesh.knots[0].at(i, j) - Vec3(s, tau, 0)).norm(), 1e-15);
      EXPECT_LT((mesh.knots[1].at(i, j) - Vec3(s - 1, tau, 1)).norm(), 1e-14);
      EXPECT_LT((mesh.knots[2].at(i, j) - Vec3(-tau, s, tau)).norm(), 1e-14);
      EXPECT_LT((mesh.knots[3].at(i, j) - Vec3(s - tau, 1, tau)).norm(), 1e-14);
      EXPECT_LT((mesh.knots[4].at(i, j) - Vec3(1 - tau, 1 - s, tau)).norm(), 1e-14);
      EXPECT_LT((mesh.knots[5].at(i, j) - Vec3(1 - s - tau, 0, tau)).norm(), 1e-14);
    }
  }
}

TEST(GeneratingCycle, TranslateDemoOutwardNormals) {
  const GeneratingCycleMesh mesh = cycle_for("translate-demo", 8, 4);
  const double r = std::sqrt(0.5);
  const std::array<Vec3, 6> expected{Vec3(0, 0, -1), Vec3(0, 0, 1),  Vec3(-r, 0, -r),
                                     Vec3(0, 1, 0),  Vec3(r, 0, r),  Vec3(0, -1, 0)};
  for (int p = 0; p < 6; ++p)
    for (double a : {0.1, 0.5, 0.9})
      for (double b : {0.2, 0.7})
        EXPECT_LT((patch_normal(mesh, p, a, b) - expected[p]).norm(), 1e-12) << "P" << p + 1;
  EXPECT_THROW(patch_normal(mesh, 6, 0.5, 0.5), ArgumentError);
}

TEST(GeneratingCycle, ZeroFlowBacktrackIsStatic) {
  const GeneratingCycleMesh mesh = cycle_for("zero-flow", 6, 4);
  for (std::size_t k = 0; k < mesh.knots[0].points.size(); ++k)
    EXPECT_EQ(mesh.knots[0].points[k], mesh.knots[1].points[k]);
  for (int j = 0; j <= 6; ++j) EXPECT_EQ(mesh.knots[2].at(3, j), mesh.knots[2].at(3, 0));
}

TEST(GeneratingCycle, LevequeCornerIsAStagnationPoint) {
  const GeneratingCycleMesh mesh = cycle_for("leveque-static", 16, 6);
  EXPECT_LT((mesh.patches[1].eval(0, 0) - Vec3(0, 0, 0.25)).norm(), 1e-12);
  EXPECT_LT((mesh.patches[0].eval(0.5, 0.5) - Vec3(0.25, 0.25, 0.25)).norm(), 1e-15);
}

TEST(GeneratingCycle, CompositeMapMatchesKnots) {
  const PresetCase c = make_preset("leveque-moving");
  const GeneratingCycleMesh mesh =
      build_generating_cycle(c.velocity, c.surface, c.t0, c.te, 1.0 / 8, 1.0 / 8, 4);
  for (int j = 0; j <= 8; ++j) {
    const Vec3 x = composite_map(c.velocity, c.surface, c.t0, c.te, 0.0, 0.25, j / 8.0, 4, j);
    EXPECT_LT((x - mesh.knots[2].at(2, j)).norm(), 1e-14);
  }
}

// Adjacent patches are interpolants of identical edge data in identical bases.
TEST(GeneratingCycle, SharedEdgesCoincide) {
  const GeneratingCycleMesh m = cycle_for("leveque-moving", 12, 6);
  const auto& P = m.patches;
  for (double s : {0.0, 0.13, 0.5, 0.77, 1.0}) {
    const auto near = [](const Vec3& a, const Vec3& b) { return (a - b).norm() < 1e-12; };
    EXPECT_TRUE(near(P[0].eval(0, s), P[2].eval(s, 0)));
    EXPECT_TRUE(near(P[0].eval(s, 1), P[3].eval(s, 0)));
    EXPECT_TRUE(near(P[0].eval(1, 1 - s), P[4].eval(s, 0)));
    EXPECT_TRUE(near(P[0].eval(1 - s, 0), P[5].eval(s, 0)));
    EXPECT_TRUE(near(P[1].eval(0, s), P[2].eval(s, 1)));
    EXPECT_TRUE(near(P[1].eval(s, 1), P[3].eval(s, 1)));
    EXPECT_TRUE(near(P[1].eval(1, 1 - s), P[4].eval(s, 1)));
    EXPECT_TRUE(near(P[1].eval(1 - s, 0), P[5].eval(s, 1)));
    EXPECT_TRUE(near(P[2].eval(1, s), P[3].eval(0, s)));
    EXPECT_TRUE(near(P[3].eval(1, s), P[4].eval(0, s)));
    EXPECT_TRUE(near(P[4].eval(1, s), P[5].eval(0, s)));
    EXPECT_TRUE(near(P[5].eval(1, s), P[2].eval(0, s)));
  }
}

TEST(GeneratingCycle, RefinementConverges) {
  const GeneratingCycleMesh ref = cycle_for("leveque-static", 128, 4);
  double prev = 0.0;
  for (int n : {16, 32, 64}) {
    const GeneratingCycleMesh m = cycle_for("leveque-static", n, 4);
    double e = 0.0;
    for (double a : {0.1, 0.35, 0.6, 0.85})
      for (double b : {0.15, 0.4, 0.9}) e = std::max(e, (m.patches[1].eval(a, b) - ref.patches[1].eval(a, b)).norm());
    if (prev > 0.0) EXPECT_LT(e, prev / 2);
    prev = e;
  }
}

TEST(MeshExport, ObjGroupsAndOrientation) {
  const GeneratingCycleMesh mesh = cycle_for("translate-demo", 8, 4);
  const Obj obj = parse_obj(export_cycle_mesh(mesh, MeshFormat::obj, 6));
  EXPECT_EQ(obj.groups, (std::vector<std::string>{"P1", "P2", "P3", "P4", "P5", "P6"}));
  EXPECT_EQ(obj.vertices.size(), 6u * 49);
  EXPECT_EQ(obj.faces.size(), 6u * 2 * 36);
  EXPECT_NEAR(enclosed_volume(obj), 1.0, 1e-12);
}

TEST(MeshExport, LevequeStaticCountsAndBasePlane) {
  const GeneratingCycleMesh mesh = cycle_for("leveque-static", 16, 4);
  const Obj obj = parse_obj(export_cycle_mesh(mesh, MeshFormat::obj, 2));
  EXPECT_EQ(obj.groups.size(), 6u);
  EXPECT_EQ(obj.vertices.size(), 6u * 9);
  for (int k = 0; k < 9; ++k) EXPECT_NEAR(obj.vertices[k][2], 0.25, 1e-15);
  EXPECT_GT(enclosed_volume(obj), 0.0);

  const std::string vtk = export_cycle_mesh(mesh, MeshFormat::vtk, 2);
  EXPECT_EQ(vtk.rfind("# vtk DataFile Version", 0), 0u);
  EXPECT_NE(vtk.find("POINTS 54 double"), std::string::npos);
  EXPECT_NE(vtk.find("POLYGONS 24 120"), std::string::npos);
  EXPECT_NE(vtk.find("SCALARS patch int 1"), std::string::npos);

  EXPECT_THROW(export_cycle_mesh(mesh, MeshFormat::obj, 1), ArgumentError);
  EXPECT_EQ(parse_mesh_format("obj"), MeshFormat::obj);
  EXPECT_THROW(parse_mesh_format("stl"), ArgumentError);
}
