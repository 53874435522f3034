#pragma once

#include "rpo/types.hpp"

namespace rpo {

/// Physical parameters of the differential-drive robot.
struct RobotParams {
  double mass = 10.0;          ///< m [kg]
  double inertia = 0.5;        ///< J, yaw inertia [kg m^2]
  double offset = 0.1;         ///< d, body-center offset [m]
  double wheel_radius = 0.05;  ///< r [m]
  double half_track = 0.2;     ///< L, half wheel-base [m]

  /// Throws ConfigError unless every parameter is finite and strictly positive.
  void validate() const;

  static RobotParams make(double mass, double inertia, double offset, double wheel_radius,
                          double half_track);
};

/// Heading and generalized body velocities q = [v, omega].
struct BodyState {
  double theta = 0.0;
  Vec2 q = Vec2::Zero();

  Vec3 as_vector() const { return {theta, q.x(), q.y()}; }
  static BodyState from_vector(const Vec3& x) { return {x(0), x.tail<2>()}; }
};

struct Pose {
  Vec2 z = Vec2::Zero();
};

/// Covariance of the additive noise w on qdot.
struct ProcessNoise {
  Mat2 cov = Mat2::Zero();
};

struct PlantState {
  BodyState body;
  Pose pose;
};

Mat2 mass_matrix(const RobotParams& params);
Mat2 damping_matrix(const RobotParams& params, double omega);
Mat2 input_matrix(const RobotParams& params);

/// C(theta) maps q to the planar velocity of the offset point; det C = d.
Mat2 c_matrix(double theta, const RobotParams& params);
Mat2 c_inverse(double theta, const RobotParams& params);
/// Time derivative of C^{-1}(theta(t)) given thetadot = omega.
Mat2 c_inverse_dot(double theta, double omega, const RobotParams& params);

/// Noise-free qdot = M^{-1}(-D q + B tau).
Vec2 dynamics_rhs(const BodyState& state, const Vec2& tau, const RobotParams& params);

/// [thetadot; zdot] = Cbar(theta) q.
Vec3 kinematics_rhs(double theta, const Vec2& q, const RobotParams& params);

/// One forward-Euler step of the plant. `noise_sample` is a draw of w and enters as w*dt on q.
/// Throws NumericError if the result is not finite.
PlantState step(const PlantState& state, const Vec2& tau, double dt, const Vec2& noise_sample,
                const RobotParams& params);

/// Euler map of the estimated state [theta, v, omega] (no pose), shared with the filter.
Vec3 discrete_state_map(const Vec3& x, const Vec2& tau, double dt, const RobotParams& params);

}  // namespace rpo
