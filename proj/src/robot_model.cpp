#include "rpo/robot_model.hpp"

#include <cmath>
#include <string>

#include "rpo/errors.hpp"

namespace rpo {

namespace {

void require_positive(double value, const char* name) {
  if (!std::isfinite(value) || value <= 0.0) {
    throw ConfigError(std::string("robot parameter '") + name + "' must be finite and > 0");
  }
}

}  // namespace

void RobotParams::validate() const {
  require_positive(mass, "mass");
  require_positive(inertia, "inertia");
  require_positive(offset, "offset");
  require_positive(wheel_radius, "wheel_radius");
  require_positive(half_track, "half_track");
}

RobotParams RobotParams::make(double mass, double inertia, double offset, double wheel_radius,
                              double half_track) {
  RobotParams p{mass, inertia, offset, wheel_radius, half_track};
  p.validate();
  return p;
}

Mat2 mass_matrix(const RobotParams& p) {
  Mat2 m = Mat2::Zero();
  m(0, 0) = p.mass;
  m(1, 1) = p.mass * p.offset * p.offset + p.inertia;
  return m;
}

Mat2 damping_matrix(const RobotParams& p, double omega) {
  const double k = p.mass * p.offset * omega;
  Mat2 d;
  d << 0.0, -k, k, 0.0;
  return d;
}

Mat2 input_matrix(const RobotParams& p) {
  Mat2 b;
  b << 1.0, 1.0, p.half_track, -p.half_track;
  return b / p.wheel_radius;
}

Mat2 c_matrix(double theta, const RobotParams& p) {
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  Mat2 m;
  m << c, -p.offset * s, s, p.offset * c;
  return m;
}

Mat2 c_inverse(double theta, const RobotParams& p) {
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  Mat2 m;
  m << c, s, -s / p.offset, c / p.offset;
  return m;
}

Mat2 c_inverse_dot(double theta, double omega, const RobotParams& p) {
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  Mat2 m;
  m << -s, c, -c / p.offset, -s / p.offset;
  return m * omega;
}

Vec2 dynamics_rhs(const BodyState& state, const Vec2& tau, const RobotParams& p) {
  const Vec2 force = -damping_matrix(p, state.q.y()) * state.q + input_matrix(p) * tau;
  // M is diagonal
  const Mat2 m = mass_matrix(p);
  return {force.x() / m(0, 0), force.y() / m(1, 1)};
}

Vec3 kinematics_rhs(double theta, const Vec2& q, const RobotParams& p) {
  Vec3 out;
  out(0) = q.y();
  out.tail<2>() = c_matrix(theta, p) * q;
  return out;
}

PlantState step(const PlantState& state, const Vec2& tau, double dt, const Vec2& noise_sample,
                const RobotParams& p) {
  const Vec3 kin = kinematics_rhs(state.body.theta, state.body.q, p);
  const Vec2 qdot = dynamics_rhs(state.body, tau, p);

  PlantState next;
  next.body.theta = state.body.theta + dt * kin(0);
  next.body.q = state.body.q + dt * (qdot + noise_sample);
  next.pose.z = state.pose.z + dt * kin.tail<2>();

  if (!std::isfinite(next.body.theta) || !next.body.q.allFinite() || !next.pose.z.allFinite()) {
    throw NumericError("plant step produced non-finite state");
  }
  return next;
}

Vec3 discrete_state_map(const Vec3& x, const Vec2& tau, double dt, const RobotParams& p) {
  const BodyState body = BodyState::from_vector(x);
  Vec3 next;
  next(0) = x(0) + dt * x(2);
  next.tail<2>() = body.q + dt * dynamics_rhs(body, tau, p);
  return next;
}

}  // namespace rpo
