#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <vector>

#include "lfc3d/cycle.hpp"
#include "lfc3d/fields.hpp"
#include "lfc3d/ray_mesh.hpp"

namespace lfc3d {

/// One transversal pathline/surface crossing.
struct CrossingRecord {
  double tau = 0.0;  ///< (t - t0) / k
  Vec3 point = Vec3::Zero();
  int sign = 0;      ///< sgn((u - dS/dt) . n)
  double u = 0.0;    ///< surface parameters of the crossing
  double v = 0.0;
};

struct FluxingIndex {
  int index = 0;  ///< positive minus negative crossings
  std::vector<CrossingRecord> crossings;
};

/// Fluxing index of the particle starting at p at time t0 through S over
/// [t0, t0 + k]. The pathline is integrated with the sixth-order scheme at
/// dt = 1/sampling; sign changes of the signed distance to S(t) are refined
/// by bisection and Newton on P(t) = S(u, v, t).
///
/// Throws ArgumentError if p lies on S(t0), TangencyError at an improper
/// intersection and UnresolvedCrossingError if a bracketed crossing cannot
/// be resolved.
FluxingIndex fluxing_index_oracle(const VelocityField& u, const MovingSurface& surface, double t0,
                                  double k, const Vec3& p, double sampling = 256.0);

/// sgn(det d(phi) * det d(chi)) at a crossing, both Jacobians by central
/// differences: phi carries p from t0 to the crossing time and chi is the
/// composite map evaluated at (u, v, tau). `steps` is the step count used
/// for chi over the whole interval.
int crossing_sign_relation(const VelocityField& u, const MovingSurface& surface, double t0,
                           double k, const Vec3& p, const CrossingRecord& crossing,
                           int steps = 256);

struct DegreeEstimate {
  int degree = 0;
  bool degenerate = false;  ///< no majority among the rays
  bool flagged = false;     ///< grazing hits, split votes or a point near the mesh
  int votes = 0;            ///< rays agreeing with `degree`
};

/// deg(chi, B^3, p) by signed ray counting against the tessellated cycle.
class DegreeClassifier {
 public:
  /// `resolution` cells per patch edge.
  explicit DegreeClassifier(const GeneratingCycleMesh& mesh, int resolution = 256);

  /// Majority vote over `rays` rays with directions drawn from `seed`; stops
  /// early once a majority is reached. With `check_proximity`, points closer
  /// to the tessellation than its estimated deviation from the splines are
  /// flagged.
  DegreeEstimate classify(const Vec3& p, int rays, std::uint64_t seed,
                          bool check_proximity = true) const;

  const TriangleMesh& mesh() const { return tri_; }
  double grazing_tolerance() const { return tol_; }
  /// Twice the largest spline-to-facet deviation found at cell centres.
  double proximity_tolerance() const { return near_tol_; }

 private:
  TriangleMesh tri_;
  double tol_ = 0.0;
  double near_tol_ = 0.0;
};

/// Throws DegeneracyError when the rays produce no majority.
int degree_of_point(const DegreeClassifier& classifier, const Vec3& p, int rays = 5,
                    std::uint64_t seed = 0);
int degree_of_point(const GeneratingCycleMesh& mesh, const Vec3& p, int rays = 5);

struct DonatingRegionEstimate {
  double value = 0.0;          ///< sum_n n * int_{D^n} f
  double standard_error = 0.0;
  std::map<int, double> volume;  ///< estimated vol(D^n) for every index seen
  std::size_t samples = 0;
  std::size_t degenerate = 0;  ///< samples without a ray majority (plurality used)
};

/// Stratified Monte Carlo over the mesh bounding box padded by 1% of its
/// diagonal: c^3 cells with c = floor(cbrt(samples / 2)), each holding
/// floor(samples / c^3) jittered points; the first samples mod c^3 cells take
/// one more. Per-cell generators are derived from `seed`, so the result does
/// not depend on the thread count.
DonatingRegionEstimate donating_region_integral(const DegreeClassifier& classifier,
                                                const ScalarField& f, double t0,
                                                std::size_t samples, std::uint64_t seed = 0,
                                                int rays = 5);

/// Mixes a seed with a stream index (splitmix64).
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream);

}  // namespace lfc3d
