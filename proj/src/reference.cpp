#include "rpo/reference.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "rpo/errors.hpp"

namespace rpo {

namespace {

struct PathDerivatives {
  Vec2 p, d1, d2, d3;
};

PathDerivatives path_derivatives(const TrajectorySpec& s, double t) {
  const double w = s.rate;
  PathDerivatives out;
  switch (s.kind) {
    case TrajectoryKind::circle: {
      const double c = std::cos(w * t);
      const double sn = std::sin(w * t);
      const double r = s.radius;
      out.p = s.center + r * Vec2(c, sn);
      out.d1 = r * w * Vec2(-sn, c);
      out.d2 = -r * w * w * Vec2(c, sn);
      out.d3 = r * w * w * w * Vec2(sn, -c);
      break;
    }
    case TrajectoryKind::lemniscate: {
      // y = (a/2) sin(2 w t)
      const double a = s.radius;
      const double s1 = std::sin(w * t), c1 = std::cos(w * t);
      const double s2 = std::sin(2 * w * t), c2 = std::cos(2 * w * t);
      out.p = s.center + Vec2(a * s1, 0.5 * a * s2);
      out.d1 = Vec2(a * w * c1, a * w * c2);
      out.d2 = Vec2(-a * w * w * s1, -2 * a * w * w * s2);
      out.d3 = Vec2(-a * w * w * w * c1, -4 * a * w * w * w * c2);
      break;
    }
    case TrajectoryKind::line: {
      const Vec2 dir(std::cos(s.heading), std::sin(s.heading));
      out.p = s.center + s.speed * t * dir;
      out.d1 = s.speed * dir;
      out.d2 = Vec2::Zero();
      out.d3 = Vec2::Zero();
      break;
    }
  }
  return out;
}

// Continuous branch of the tangent direction for each path.
double tangent_angle(const TrajectorySpec& s, const Vec2& d1, double t) {
  switch (s.kind) {
    case TrajectoryKind::circle:
      return s.rate * t + std::numbers::pi / 2;
    case TrajectoryKind::lemniscate: {
      // The Gerono tangent sweeps [-5pi/4, pi/4] and never points along +y.
      double psi = std::atan2(d1.y(), d1.x());
      if (psi > std::numbers::pi / 2) psi -= 2 * std::numbers::pi;
      return psi;
    }
    case TrajectoryKind::line:
      return s.heading;
  }
  return 0.0;
}

}  // namespace

TrajectoryKind parse_trajectory_kind(std::string_view name) {
  if (name == "circle") return TrajectoryKind::circle;
  if (name == "lemniscate") return TrajectoryKind::lemniscate;
  if (name == "line") return TrajectoryKind::line;
  throw ConfigError("unknown trajectory kind '" + std::string(name) + "'");
}

std::string_view to_string(TrajectoryKind kind) {
  switch (kind) {
    case TrajectoryKind::circle: return "circle";
    case TrajectoryKind::lemniscate: return "lemniscate";
    case TrajectoryKind::line: return "line";
  }
  return "?";
}

void TrajectorySpec::validate() const {
  if (!center.allFinite() || !std::isfinite(heading)) throw ConfigError("trajectory: non-finite center/heading");
  if (!(body_offset >= 0.0)) throw ConfigError("trajectory: body_offset must be >= 0");
  if (kind == TrajectoryKind::line) {
    if (!(speed > 0.0)) throw ConfigError("trajectory: speed must be > 0");
    return;
  }
  if (!(radius > 0.0) || !(rate > 0.0)) throw ConfigError("trajectory: radius and rate must be > 0");
  // |d psidot / |zdot|| < 1 is required for the heading correction; the worst case is
  // d*rate/radius for the circle and 4 d rate / radius (curvature peak) for the lemniscate.
  const double worst = (kind == TrajectoryKind::circle ? 1.0 : 4.0) * body_offset / radius;
  if (worst >= 1.0) throw ConfigError("trajectory: body_offset too large for path curvature");
}

double TrajectorySpec::nominal_speed() const {
  switch (kind) {
    case TrajectoryKind::circle: return radius * rate;
    case TrajectoryKind::lemniscate: return radius * rate;
    case TrajectoryKind::line: return speed;
  }
  return 0.0;
}

ReferenceSample reference_trajectory(const TrajectorySpec& s, double t) {
  const PathDerivatives d = path_derivatives(s, t);
  ReferenceSample ref;
  ref.z_d = d.p;
  ref.z_d_dot = d.d1;
  ref.z_d_ddot = d.d2;

  const double speed2 = d.d1.squaredNorm();
  const double speed = std::sqrt(speed2);
  const double cross12 = d.d1.x() * d.d2.y() - d.d1.y() * d.d2.x();
  const double dot12 = d.d1.dot(d.d2);
  const double cross13 = d.d1.x() * d.d3.y() - d.d1.y() * d.d3.x();

  const double psi = tangent_angle(s, d.d1, t);
  const double psi_dot = cross12 / speed2;
  const double psi_ddot = cross13 / speed2 - 2.0 * cross12 * dot12 / (speed2 * speed2);
  const double speed_dot = dot12 / speed;

  const double g = s.body_offset * psi_dot / speed;
  const double g_dot = s.body_offset * (psi_ddot * speed - psi_dot * speed_dot) / speed2;

  ref.theta_d = psi - std::asin(g);
  ref.omega_d = psi_dot - g_dot / std::sqrt(1.0 - g * g);
  return ref;
}

}  // namespace rpo
