#include "rpo/ukf.hpp"

#include <cmath>
#include <stdexcept>

#include "rpo/errors.hpp"
#include "rpo/measurement.hpp"

namespace rpo {

namespace {

constexpr double kJitter = 1e-9;

MatrixXd symmetrized(const MatrixXd& m) { return 0.5 * (m + m.transpose()); }

}  // namespace

void UkfConfig::validate(int n) const {
  if (!(alpha > 0.0 && alpha <= 1.0)) throw ConfigError("ukf: alpha must be in (0, 1]");
  if (!(kappa >= 0.0)) throw ConfigError("ukf: kappa must be >= 0");
  if (!std::isfinite(beta)) throw ConfigError("ukf: beta must be finite");
  if (!(n + lambda(n) > 0.0)) throw ConfigError("ukf: n + lambda must be > 0");
}

UnscentedKalmanFilter::UnscentedKalmanFilter(UkfConfig config, ProcessFn process,
                                             MeasurementFn measurement)
    : config_(config), process_(std::move(process)), measurement_(std::move(measurement)) {}

SigmaPoints UnscentedKalmanFilter::sigma_points(const GaussianBelief& belief) const {
  const auto n = static_cast<int>(belief.mean.size());
  const double lambda = config_.lambda(n);
  const double spread = n + lambda;

  MatrixXd scaled = spread * belief.cov;
  Eigen::LLT<MatrixXd> llt(scaled);
  if (llt.info() != Eigen::Success) {
    scaled = symmetrized(scaled) + kJitter * MatrixXd::Identity(n, n);
    llt.compute(scaled);
    if (llt.info() != Eigen::Success) throw NumericError("ukf: covariance is not positive definite");
  }
  const MatrixXd root = llt.matrixL();

  SigmaPoints sp;
  sp.points.resize(n, 2 * n + 1);
  sp.points.col(0) = belief.mean;
  for (int i = 0; i < n; ++i) {
    sp.points.col(1 + i) = belief.mean + root.col(i);
    sp.points.col(1 + n + i) = belief.mean - root.col(i);
  }
  sp.wm = VectorXd::Constant(2 * n + 1, 0.5 / spread);
  sp.wc = sp.wm;
  sp.wm(0) = lambda / spread;
  sp.wc(0) = sp.wm(0) + 1.0 - config_.alpha * config_.alpha + config_.beta;
  return sp;
}

Prediction UnscentedKalmanFilter::predict(const GaussianBelief& belief, const VectorXd& u, double dt,
                                          const MatrixXd& process_cov) const {
  const SigmaPoints sp = sigma_points(belief);
  const Eigen::Index cols = sp.points.cols();

  Prediction out;
  out.propagated.resize(belief.mean.size(), cols);
  for (Eigen::Index i = 0; i < cols; ++i) out.propagated.col(i) = process_(sp.points.col(i), u, dt);
  if (!out.propagated.allFinite()) throw NumericError("ukf: non-finite sigma point propagation");

  out.belief.mean = out.propagated * sp.wm;
  const MatrixXd dev = out.propagated.colwise() - out.belief.mean;
  out.belief.cov = symmetrized(dev * sp.wc.asDiagonal() * dev.transpose() + process_cov);
  return out;
}

GaussianBelief UnscentedKalmanFilter::update(const GaussianBelief& predicted, const VectorXd& y_masked,
                                             const std::vector<int>& mask,
                                             const MatrixXd& meas_cov) const {
  if (mask.empty()) throw std::invalid_argument("ukf: empty channel mask, skip the update");
  const auto k = static_cast<Eigen::Index>(mask.size());
  if (y_masked.size() != k) throw std::invalid_argument("ukf: masked measurement size mismatch");

  const SigmaPoints sp = sigma_points(predicted);
  const Eigen::Index cols = sp.points.cols();

  MatrixXd ys(k, cols);
  for (Eigen::Index i = 0; i < cols; ++i) ys.col(i) = select(measurement_(sp.points.col(i)), mask);

  MatrixXd q(k, k);
  for (Eigen::Index a = 0; a < k; ++a) {
    for (Eigen::Index b = 0; b < k; ++b) q(a, b) = meas_cov(mask[a], mask[b]);
  }

  const VectorXd y_hat = ys * sp.wm;
  const MatrixXd dy = ys.colwise() - y_hat;
  const MatrixXd dx = sp.points.colwise() - predicted.mean;
  MatrixXd p_y = symmetrized(dy * sp.wc.asDiagonal() * dy.transpose() + q);
  const MatrixXd p_xy = dx * sp.wc.asDiagonal() * dy.transpose();

  Eigen::LLT<MatrixXd> llt(p_y);
  if (llt.info() != Eigen::Success) {
    p_y += kJitter * MatrixXd::Identity(k, k);
    llt.compute(p_y);
    if (llt.info() != Eigen::Success) throw NumericError("ukf: singular innovation covariance");
  }
  // K = P_xy P_y^{-1}
  const MatrixXd gain = llt.solve(p_xy.transpose()).transpose();

  GaussianBelief post;
  post.mean = predicted.mean + gain * (y_masked - y_hat);
  post.cov = symmetrized(predicted.cov - gain * p_y * gain.transpose());
  if (!post.mean.allFinite() || !post.cov.allFinite()) throw NumericError("ukf: non-finite update");
  return post;
}

UnscentedKalmanFilter::ProcessFn robot_process(const RobotParams& params) {
  return [params](const VectorXd& x, const VectorXd& u, double dt) -> VectorXd {
    return discrete_state_map(Vec3(x), Vec2(u), dt, params);
  };
}

UnscentedKalmanFilter::MeasurementFn robot_measurement(const RobotParams& params) {
  return [params](const VectorXd& x) -> VectorXd { return measurement_model(Vec3(x), params); };
}

Mat3 lift_process_cov(const Mat2& process_cov, double dt) {
  Mat3 out = Mat3::Zero();
  out.bottomRightCorner<2, 2>() = process_cov * dt * dt;
  return out;
}

VectorXd select(const VectorXd& v, const std::vector<int>& indices) {
  VectorXd out(static_cast<Eigen::Index>(indices.size()));
  for (std::size_t i = 0; i < indices.size(); ++i) out(static_cast<Eigen::Index>(i)) = v(indices[i]);
  return out;
}

}  // namespace rpo
