#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

#include <vector>

namespace lfc3d {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

/// Ordered point set; index i of any output corresponds to index i of the input.
using PointSet = std::vector<Vec3>;

}  // namespace lfc3d
