#pragma once

#include <Eigen/Dense>

namespace rpo {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Vec6 = Eigen::Matrix<double, 6, 1>;
using Mat2 = Eigen::Matrix2d;
using Mat3 = Eigen::Matrix3d;
using Mat6 = Eigen::Matrix<double, 6, 6>;
using Mat32 = Eigen::Matrix<double, 3, 2>;
using Mat63 = Eigen::Matrix<double, 6, 3>;

using Eigen::MatrixXd;
using Eigen::VectorXd;
using Eigen::VectorXi;

/// Number of redundant measurement channels on the robot.
inline constexpr int kChannels = 6;
/// Dimension of the estimated state x = [theta, v, omega].
inline constexpr int kStateDim = 3;

}  // namespace rpo
