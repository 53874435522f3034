#pragma once

#include "rpo/reference.hpp"
#include "rpo/robot_model.hpp"

namespace rpo {

struct ControlGains {
  double k_q = 10.0;
  double k_e = 10.0;

  void validate() const;
};

struct TrackingError {
  double e_theta = 0.0;  // not wrapped
  Vec2 e_z = Vec2::Zero();
};

struct DesiredVelocity {
  Vec2 q_d = Vec2::Zero();
  Vec2 q_d_dot = Vec2::Zero();
};

TrackingError tracking_error(const BodyState& state, const Pose& pose, const ReferenceSample& ref);

/// q_d = C^{-1}(theta)(zdot_d - k_e e_z) and its time derivative evaluated along the current q.
DesiredVelocity desired_velocity(const BodyState& state, const Vec2& e_z, const ReferenceSample& ref,
                                 const ControlGains& gains, const RobotParams& params);

/// tau = B^{-1}(M u + D q), u = -k_q (q - q_d) + qdot_d - Cbar(theta)^T e.
Vec2 control_torque(const BodyState& state, const Pose& pose, const ReferenceSample& ref,
                    const ControlGains& gains, const RobotParams& params);

/// V = 1/2 |q - q_d|^2 + 1/2 |e|^2 together with the rate -k_q |q~|^2 - k_e |e_z|^2
/// predicted by the closed-loop analysis.
struct LyapunovTerms {
  double value = 0.0;
  double predicted_rate = 0.0;
  double error_norm = 0.0;  // |e| + |q~|
};

LyapunovTerms lyapunov_terms(const BodyState& state, const Pose& pose, const ReferenceSample& ref,
                             const ControlGains& gains, const RobotParams& params);

}  // namespace rpo
