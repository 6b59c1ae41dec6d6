#pragma once

#include <Eigen/Dense>
#include <vector>

namespace morphoflow {

using Vec2 = Eigen::Vector2d;
using Mat2 = Eigen::Matrix2d;
using Points = std::vector<Vec2>;

}  // namespace morphoflow
