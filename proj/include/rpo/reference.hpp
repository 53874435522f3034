#pragma once

#include <string_view>

#include "rpo/types.hpp"

namespace rpo {

/// Desired heading and task-space trajectory sample with derivatives up to second order.
struct ReferenceSample {
  double theta_d = 0.0;
  Vec2 z_d = Vec2::Zero();
  Vec2 z_d_dot = Vec2::Zero();
  Vec2 z_d_ddot = Vec2::Zero();
  double omega_d = 0.0;
};

enum class TrajectoryKind { circle, lemniscate, line };

TrajectoryKind parse_trajectory_kind(std::string_view name);
std::string_view to_string(TrajectoryKind kind);

/// Analytic reference path.
///
/// circle:     z_d = center + radius [cos(rate t), sin(rate t)]
/// lemniscate: z_d = center + radius [sin(rate t), sin(rate t) cos(rate t)]   (Gerono)
/// line:       z_d = center + speed t [cos(heading), sin(heading)]
///
/// The desired heading is the one the body settles to when the offset point
/// follows z_d: theta_d = psi - asin(d psidot / |zdot_d|), psi = direction of zdot_d.
/// With body_offset = 0 this reduces to the path tangent.
struct TrajectorySpec {
  TrajectoryKind kind = TrajectoryKind::circle;
  Vec2 center = Vec2::Zero();
  double radius = 2.0;   // circle / lemniscate size [m]
  double rate = 0.25;    // angular rate [rad/s]
  double speed = 0.5;    // line speed [m/s]
  double heading = 0.0;  // line direction [rad]
  double body_offset = 0.0;

  /// Throws ConfigError for non-positive sizes/rates or an offset the path cannot support.
  void validate() const;
  /// Nominal forward speed along the path.
  double nominal_speed() const;
};

ReferenceSample reference_trajectory(const TrajectorySpec& spec, double t);

}  // namespace rpo
