#pragma once

#include <vector>

#include "rpo/robot_model.hpp"

namespace rpo {

/// Channels: 0 v, 1 omega, 2 (v + L omega)/4r, 3 (v - L omega)/4r, 4 xdot, 5 ydot.
struct MeasurementFrame {
  Vec6 y = Vec6::Zero();
  Vec6 e = Vec6::Zero();
  std::vector<int> attacked_support;  // supp(e), ascending

  Vec6 attacked() const { return y + e; }
};

struct MeasurementNoise {
  Mat6 cov = Mat6::Identity() * 1e-4;
};

/// Noise-free f(x) for x = [theta, v, omega].
Vec6 measurement_model(const Vec3& x, const RobotParams& params);

/// f(x) + noise_sample.
Vec6 measure(double theta, const Vec2& q, const RobotParams& params, const Vec6& noise_sample);

/// Analytic Jacobian of f with respect to [theta, v, omega] at x0.
Mat63 measurement_jacobian(const Vec3& x0, const RobotParams& params);

MeasurementFrame inject(const Vec6& y, const Vec6& e);

}  // namespace rpo
