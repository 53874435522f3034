#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "rpo/errors.hpp"
#include "rpo/fdia.hpp"
#include "rpo/measurement.hpp"
#include "rpo/rng.hpp"
#include "rpo/ukf.hpp"

using namespace rpo;

namespace {

MatrixXd random_pd(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  MatrixXd a(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) a(i, j) = g(rng);
  return a * a.transpose() + 0.1 * MatrixXd::Identity(n, n);
}

UnscentedKalmanFilter linear_filter(const MatrixXd& a, const MatrixXd& c, UkfConfig cfg = {}) {
  return UnscentedKalmanFilter(
      cfg, [a](const VectorXd& x, const VectorXd&, double) -> VectorXd { return a * x; },
      [c](const VectorXd& x) -> VectorXd { return c * x; });
}

bool symmetric_pd(const MatrixXd& p) {
  if ((p - p.transpose()).cwiseAbs().maxCoeff() > 1e-10) return false;
  return Eigen::LLT<MatrixXd>(p).info() == Eigen::Success;
}

}  // namespace

TEST_CASE("sigma points reproduce mean and covariance") {
  std::mt19937_64 rng(1);
  for (const UkfConfig cfg : {UkfConfig{}, UkfConfig{1.0, 2.0, 0.0}, UkfConfig{0.3, 2.0, 1.0}}) {
    const auto ukf = linear_filter(MatrixXd::Identity(3, 3), MatrixXd::Identity(3, 3), cfg);
    for (int t = 0; t < 20; ++t) {
      GaussianBelief b{VectorXd::Random(3), random_pd(3, rng)};
      const SigmaPoints sp = ukf.sigma_points(b);
      CHECK(sp.points.cols() == 7);
      CHECK(std::abs(sp.wm.sum() - 1.0) < 1e-12);
      CHECK((sp.points * sp.wm - b.mean).norm() < 1e-12);
      const MatrixXd d = sp.points.colwise() - b.mean;
      CHECK((d * sp.wc.asDiagonal() * d.transpose() - b.cov).cwiseAbs().maxCoeff() < 1e-10);
      // second block mirrors the first
      CHECK((sp.points.col(1) + sp.points.col(4) - 2 * b.mean).norm() < 1e-12);
      const double lambda = cfg.lambda(3);
      CHECK(sp.wm(0) == doctest::Approx(lambda / (3 + lambda)));
      CHECK(sp.wc(0) == doctest::Approx(lambda / (3 + lambda) + 1 - cfg.alpha * cfg.alpha + cfg.beta));
      CHECK(sp.wm(1) == doctest::Approx(0.5 / (3 + lambda)));
    }
  }
}

TEST_CASE("sigma points repair a slightly indefinite covariance") {
  const auto ukf = linear_filter(MatrixXd::Identity(2, 2), MatrixXd::Identity(2, 2));
  GaussianBelief b{VectorXd::Zero(2), MatrixXd::Zero(2, 2)};
  CHECK_NOTHROW(ukf.sigma_points(b));
  b.cov(0, 0) = -1.0;
  CHECK_THROWS_AS(ukf.sigma_points(b), NumericError);
}

TEST_CASE("config validation") {
  CHECK_NOTHROW(UkfConfig{}.validate(3));
  CHECK_THROWS_AS((UkfConfig{0.0, 2.0, 0.0}.validate(3)), ConfigError);
  CHECK_THROWS_AS((UkfConfig{1.5, 2.0, 0.0}.validate(3)), ConfigError);
  CHECK_THROWS_AS((UkfConfig{0.5, 2.0, -1.0}.validate(3)), ConfigError);
  CHECK(UkfConfig{}.lambda(3) == doctest::Approx(-2.25));
}

TEST_CASE("predict with dt = 0 only adds process covariance") {
  const RobotParams p;
  const UnscentedKalmanFilter ukf(UkfConfig{}, robot_process(p), robot_measurement(p));
  GaussianBelief b{Vec3(0.3, 0.5, 0.2), Mat3::Identity() * 1e-3};
  const Mat3 r = lift_process_cov(Mat2::Identity() * 1e-2, 0.01);
  CHECK(r(0, 0) == 0.0);
  CHECK(r(1, 1) == doctest::Approx(1e-6));
  const Prediction pr = ukf.predict(b, Vec2(0.1, 0.2), 0.0, r);
  CHECK((pr.belief.mean - b.mean).norm() < 1e-14);
  CHECK((pr.belief.cov - (b.cov + r)).cwiseAbs().maxCoeff() < 1e-14);
  CHECK(pr.propagated.cols() == 7);
}

TEST_CASE("linear system: predict and masked update match the Kalman filter") {
  const Linearization lin = linearize(Vec3(0.3, 0.5, 0.2), RobotParams{}, 0.01);
  const MatrixXd a = lin.a;
  const MatrixXd c_full = lin.c;
  const MatrixXd c4 = c_full.topRows(4);  // channels whose rows are linear in x
  const auto ukf = linear_filter(a, c_full);
  const MatrixXd qp = lift_process_cov(Mat2::Identity() * 1e-2, 0.01);
  const Mat6 rm = Mat6::Identity() * 1e-4;
  const std::vector<int> mask{0, 1, 2, 3};

  GaussianBelief b{Vec3(0.1, 0.2, 0.0), Mat3::Identity() * 1e-2};
  oracle::Kalman kf{b.mean, b.cov};
  Rng rng = derive_rng(3, 0);
  const GaussianSampler w(qp), v(rm);
  VectorXd x = Vec3(0.0, 0.3, -0.1);
  double worst = 0.0;
  for (int k = 0; k < 1000; ++k) {
    x = a * x + w(rng);
    const VectorXd y = c_full * x + v(rng);
    b = ukf.predict(b, VectorXd::Zero(2), 0.01, qp).belief;
    kf.predict(a, qp);
    worst = std::max({worst, (b.mean - kf.x).cwiseAbs().maxCoeff(), (b.cov - kf.P).cwiseAbs().maxCoeff()});
    b = ukf.update(b, select(y, mask), mask, rm);
    kf.update(c4, rm.topLeftCorner(4, 4), y.head(4));
    worst = std::max({worst, (b.mean - kf.x).cwiseAbs().maxCoeff(), (b.cov - kf.P).cwiseAbs().maxCoeff()});
  }
  CHECK(worst < 1e-8);
}

TEST_CASE("masked update equals an update against the restricted model") {
  const RobotParams p;
  const auto f = robot_measurement(p);
  const UnscentedKalmanFilter full(UkfConfig{}, robot_process(p), f);
  const std::vector<int> mask{1, 4, 5};
  const UnscentedKalmanFilter restricted(UkfConfig{}, robot_process(p),
                                         [f, mask](const VectorXd& x) -> VectorXd { return select(f(x), mask); });
  Mat6 rm = Mat6::Identity() * 1e-4;
  rm(4, 5) = rm(5, 4) = 2e-5;
  MatrixXd rm_r(3, 3);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) rm_r(i, j) = rm(mask[i], mask[j]);
  const GaussianBelief b{Vec3(0.7, 0.4, 0.1), Mat3::Identity() * 1e-3};
  const Vec6 y = f(Vec3(0.72, 0.41, 0.09));
  const GaussianBelief a1 = full.update(b, select(y, mask), mask, rm);
  const GaussianBelief a2 = restricted.update(b, select(y, mask), {0, 1, 2}, rm_r);
  CHECK((a1.mean - a2.mean).norm() < 1e-14);
  CHECK((a1.cov - a2.cov).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("update errors and information gain") {
  const RobotParams p;
  const UnscentedKalmanFilter ukf(UkfConfig{}, robot_process(p), robot_measurement(p));
  const GaussianBelief b{Vec3(0.2, 0.5, 0.1), Mat3::Identity() * 1e-3};
  const Vec6 y = robot_measurement(p)(Vec3(0.2, 0.5, 0.1));
  CHECK_THROWS_AS(ukf.update(b, VectorXd(0), {}, Mat6::Identity()), std::invalid_argument);
  CHECK_THROWS_AS(ukf.update(b, y.head(2), {0, 1, 2}, Mat6::Identity()), std::invalid_argument);
  CHECK_THROWS_AS(ukf.update(b, y.head(2), {0, 1}, -Mat6::Identity()), NumericError);
  const GaussianBelief post = ukf.update(b, y, {0, 1, 2, 3, 4, 5}, Mat6::Identity() * 1e-4);
  CHECK(post.cov.trace() < b.cov.trace());
  CHECK(symmetric_pd(post.cov));
}

TEST_CASE("covariance stays symmetric positive definite over a long noisy run") {
  const RobotParams p;
  const UnscentedKalmanFilter ukf(UkfConfig{}, robot_process(p), robot_measurement(p));
  const Mat2 rp = Mat2::Identity() * 1e-2;
  const Mat3 qp = lift_process_cov(rp, 0.01);
  const Mat6 rm = Mat6::Identity() * 1e-4;
  const GaussianSampler w(rp), v(rm);
  Rng rng = derive_rng(4, 0);
  PlantState s;
  s.body = {0.0, {0.5, 0.25}};
  GaussianBelief b{s.body.as_vector(), Mat3::Identity() * 1e-4};
  // torque holding the nominal turn: vdot = wdot = 0 at (v, w) = (0.5, 0.25)
  const Vec2 force(-p.mass * p.offset * 0.25 * 0.25, p.mass * p.offset * 0.25 * 0.5);
  const Vec2 tau = input_matrix(p).inverse() * force;
  bool ok = true;
  const std::vector<int> masks[] = {{0, 1, 2, 3, 4, 5}, {0, 1, 2}, {4, 5}};
  for (int k = 0; k < 10000; ++k) {
    const std::vector<int>& mask = masks[(k / 500) % 3];
    const Vec6 y = measure(s.body.theta, s.body.q, p, Vec6(v(rng)));
    b = ukf.update(b, select(y, mask), mask, rm);
    ok = ok && symmetric_pd(b.cov);
    s = step(s, tau, 0.01, Vec2(w(rng)), p);
    b = ukf.predict(b, tau, 0.01, qp).belief;
    ok = ok && symmetric_pd(b.cov);
  }
  CHECK(ok);
  CHECK(std::abs(b.mean(1) - s.body.q(0)) < 0.05);
}
