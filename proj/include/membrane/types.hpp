#pragma once

#include <array>
#include <cstddef>

#include <Eigen/Dense>

namespace membrane {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Triangle = std::array<std::size_t, 3>;

}  // namespace membrane
