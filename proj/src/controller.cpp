#include "rpo/controller.hpp"

#include <cmath>

#include "rpo/errors.hpp"

namespace rpo {

void ControlGains::validate() const {
  if (!(k_q > 0.0) || !(k_e > 0.0) || !std::isfinite(k_q) || !std::isfinite(k_e)) {
    throw ConfigError("control gains k_q and k_e must be finite and > 0");
  }
}

TrackingError tracking_error(const BodyState& state, const Pose& pose, const ReferenceSample& ref) {
  return {state.theta - ref.theta_d, pose.z - ref.z_d};
}

DesiredVelocity desired_velocity(const BodyState& state, const Vec2& e_z, const ReferenceSample& ref,
                                 const ControlGains& gains, const RobotParams& params) {
  const Mat2 c = c_matrix(state.theta, params);
  const Mat2 c_inv = c_inverse(state.theta, params);
  const Mat2 c_inv_dot = c_inverse_dot(state.theta, state.q.y(), params);

  DesiredVelocity out;
  out.q_d = c_inv * (ref.z_d_dot - gains.k_e * e_z);
  out.q_d_dot = -gains.k_e * (c_inv_dot * e_z + state.q) +
                c_inv * (ref.z_d_ddot + (gains.k_e * Mat2::Identity() + c * c_inv_dot) * ref.z_d_dot);
  return out;
}

Vec2 control_torque(const BodyState& state, const Pose& pose, const ReferenceSample& ref,
                    const ControlGains& gains, const RobotParams& params) {
  const TrackingError err = tracking_error(state, pose, ref);
  const DesiredVelocity des = desired_velocity(state, err.e_z, ref, gains, params);

  // Cbar^T e = [0; e_theta] + C^T e_z
  Vec2 feedback = c_matrix(state.theta, params).transpose() * err.e_z;
  feedback.y() += err.e_theta;

  const Vec2 u = -gains.k_q * (state.q - des.q_d) + des.q_d_dot - feedback;
  const Vec2 wrench = mass_matrix(params) * u + damping_matrix(params, state.q.y()) * state.q;
  return input_matrix(params).partialPivLu().solve(wrench);
}

LyapunovTerms lyapunov_terms(const BodyState& state, const Pose& pose, const ReferenceSample& ref,
                             const ControlGains& gains, const RobotParams& params) {
  const TrackingError err = tracking_error(state, pose, ref);
  const DesiredVelocity des = desired_velocity(state, err.e_z, ref, gains, params);
  const Vec2 q_err = state.q - des.q_d;
  const double e2 = err.e_theta * err.e_theta + err.e_z.squaredNorm();

  LyapunovTerms out;
  out.value = 0.5 * q_err.squaredNorm() + 0.5 * e2;
  out.predicted_rate = -gains.k_q * q_err.squaredNorm() - gains.k_e * err.e_z.squaredNorm();
  out.error_norm = std::sqrt(e2) + q_err.norm();
  return out;
}

}  // namespace rpo
