#include "rpo/monitor.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace rpo {

namespace {
constexpr double kThresholdFloor = 1e-9;
}

MonitorVerdict evaluate(std::span<const VectorXd> y_hist, std::span<const VectorXd> u_hist,
                        std::span<const VectorXd> xhat_hist, const MonitorModel& model,
                        const MonitorConfig& config) {
  const std::size_t n = xhat_hist.size();
  const auto horizon = static_cast<std::size_t>(config.horizon);
  if (config.horizon < 1) throw std::invalid_argument("monitor: horizon must be >= 1");
  if (y_hist.size() != n || u_hist.size() != n) {
    throw std::invalid_argument("monitor: histories are misaligned");
  }
  if (n < horizon + 1) throw std::invalid_argument("monitor: history shorter than horizon + 1");

  bool unsafe = false;
  for (std::size_t j = n - horizon - 1; j + 1 < n; ++j) {
    const double r = (xhat_hist[j + 1] - model.process(xhat_hist[j], u_hist[j])).norm();
    if (r > config.eps_w) unsafe = true;
  }

  const Eigen::Index m = y_hist.back().size();
  VectorXd worst = VectorXd::Zero(m);
  for (std::size_t j = n - horizon; j < n; ++j) {
    const VectorXd res = y_hist[j] - model.measurement(xhat_hist[j]);
    if (res.norm() > config.eps_v) unsafe = true;
    worst = worst.cwiseMax(res.cwiseAbs());
  }

  MonitorVerdict verdict;
  verdict.unsafe = unsafe;
  if (!unsafe) return verdict;

  const bool have_channel_eps = config.per_channel_eps.size() == m;
  std::vector<int> flagged;
  for (Eigen::Index i = 0; i < m; ++i) {
    const double eps = have_channel_eps ? config.per_channel_eps(i) : config.eps_v;
    if (worst(i) > eps) flagged.push_back(static_cast<int>(i));
  }
  std::stable_sort(flagged.begin(), flagged.end(),
                   [&](int a, int b) { return worst(a) > worst(b); });
  verdict.suspect = std::move(flagged);
  return verdict;
}

MonitorThresholds calibrate(const MatrixXd& process_cov, const MatrixXd& meas_cov, double k) {
  MonitorThresholds t;
  t.eps_w = std::max(kThresholdFloor, k * std::sqrt(std::max(0.0, process_cov.trace())));
  t.eps_v = std::max(kThresholdFloor, k * std::sqrt(std::max(0.0, meas_cov.trace())));
  t.per_channel_eps = (k * meas_cov.diagonal().cwiseMax(0.0).cwiseSqrt()).cwiseMax(kThresholdFloor);
  return t;
}

MonitorConfig make_monitor_config(const MonitorThresholds& thresholds, int horizon) {
  return {horizon, thresholds.eps_w, thresholds.eps_v, thresholds.per_channel_eps};
}

}  // namespace rpo
