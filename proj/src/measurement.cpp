#include "rpo/measurement.hpp"

#include <cmath>

namespace rpo {

namespace {

Eigen::Matrix<double, 6, 2> output_matrix(double theta, const RobotParams& p) {
  const double k = 1.0 / (4.0 * p.wheel_radius);
  Eigen::Matrix<double, 6, 2> m;
  m.row(0) << 1.0, 0.0;
  m.row(1) << 0.0, 1.0;
  m.row(2) << k, p.half_track * k;
  m.row(3) << k, -p.half_track * k;
  m.bottomRows<2>() = c_matrix(theta, p);
  return m;
}

}  // namespace

Vec6 measurement_model(const Vec3& x, const RobotParams& params) {
  return output_matrix(x(0), params) * x.tail<2>();
}

Vec6 measure(double theta, const Vec2& q, const RobotParams& params, const Vec6& noise_sample) {
  return output_matrix(theta, params) * q + noise_sample;
}

Mat63 measurement_jacobian(const Vec3& x0, const RobotParams& p) {
  const double th = x0(0), v = x0(1), w = x0(2);
  const double c = std::cos(th), s = std::sin(th);
  Mat63 jac = Mat63::Zero();
  jac.block<6, 2>(0, 1) = output_matrix(th, p);
  // d/dtheta of C(theta) q
  jac(4, 0) = -v * s - p.offset * w * c;
  jac(5, 0) = v * c - p.offset * w * s;
  return jac;
}

MeasurementFrame inject(const Vec6& y, const Vec6& e) {
  MeasurementFrame frame;
  frame.y = y;
  frame.e = e;
  for (int i = 0; i < kChannels; ++i) {
    if (e(i) != 0.0) frame.attacked_support.push_back(i);
  }
  return frame;
}

}  // namespace rpo
