#pragma once

#include <functional>
#include <vector>

#include "rpo/robot_model.hpp"

namespace rpo {

struct UkfConfig {
  double alpha = 0.5;
  double beta = 2.0;
  double kappa = 0.0;

  double lambda(int n) const { return alpha * alpha * (n + kappa) - n; }
  /// Throws ConfigError unless alpha in (0, 1], kappa >= 0 and n + lambda > 0.
  void validate(int n) const;
};

struct GaussianBelief {
  VectorXd mean;
  MatrixXd cov;
};

struct SigmaPoints {
  MatrixXd points;  // n x (2n + 1), column 0 is the mean
  VectorXd wm;
  VectorXd wc;
};

struct Prediction {
  GaussianBelief belief;
  MatrixXd propagated;  // sigma points after the process map
};

/// Unscented Kalman filter over a generic process map x' = g(x, u, dt) and a measurement map
/// y = f(x) that returns every channel; updates use only the channels in the supplied mask.
class UnscentedKalmanFilter {
 public:
  using ProcessFn = std::function<VectorXd(const VectorXd&, const VectorXd&, double)>;
  using MeasurementFn = std::function<VectorXd(const VectorXd&)>;

  UnscentedKalmanFilter(UkfConfig config, ProcessFn process, MeasurementFn measurement);

  SigmaPoints sigma_points(const GaussianBelief& belief) const;

  /// Propagate sigma points through g and add process_cov (already per-step) to the spread.
  Prediction predict(const GaussianBelief& belief, const VectorXd& u, double dt,
                     const MatrixXd& process_cov) const;

  /// Measurement update against y_masked = y(mask). meas_cov is the full channel covariance;
  /// it is restricted to the mask here. Throws std::invalid_argument for an empty mask and
  /// NumericError when the innovation covariance cannot be inverted.
  GaussianBelief update(const GaussianBelief& predicted, const VectorXd& y_masked,
                        const std::vector<int>& mask, const MatrixXd& meas_cov) const;

  const UkfConfig& config() const { return config_; }

 private:
  UkfConfig config_;
  ProcessFn process_;
  MeasurementFn measurement_;
};

/// Euler-discretized [theta, v, omega] dynamics driven by the wheel torques.
UnscentedKalmanFilter::ProcessFn robot_process(const RobotParams& params);
/// Noise-free six-channel measurement map.
UnscentedKalmanFilter::MeasurementFn robot_measurement(const RobotParams& params);
/// Per-step covariance of w*dt on q, lifted to the 3-state with a zero theta row.
Mat3 lift_process_cov(const Mat2& process_cov, double dt);

/// Rows of v listed in indices.
VectorXd select(const VectorXd& v, const std::vector<int>& indices);

}  // namespace rpo
