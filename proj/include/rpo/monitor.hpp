#pragma once

#include <functional>
#include <span>
#include <vector>

#include "rpo/types.hpp"

namespace rpo {

struct MonitorConfig {
  int horizon = 10;  // T
  double eps_w = 1.0;
  double eps_v = 1.0;
  VectorXd per_channel_eps;
};

struct MonitorVerdict {
  bool unsafe = false;       // psi1
  std::vector<int> suspect;  // psi2, most suspicious first
};

/// Process map x_{j+1} = g(x_j, u_j) and measurement map y_j = f(x_j) the monitor checks
/// the estimate history against.
struct MonitorModel {
  std::function<VectorXd(const VectorXd&, const VectorXd&)> process;
  std::function<VectorXd(const VectorXd&)> measurement;
};

/// Residual-based monitor instantiated with the estimator's own history.
///
/// All three histories are time-aligned and of equal length N >= T + 1; u_hist[j] is the input
/// applied between samples j and j+1 (the last entry is unused). The window covers process
/// residuals j = N-T-1 .. N-2 and measurement residuals j = N-T .. N-1. Throws
/// std::invalid_argument on misaligned or short histories.
MonitorVerdict evaluate(std::span<const VectorXd> y_hist, std::span<const VectorXd> u_hist,
                        std::span<const VectorXd> xhat_hist, const MonitorModel& model,
                        const MonitorConfig& config);

struct MonitorThresholds {
  double eps_w = 0.0;
  double eps_v = 0.0;
  VectorXd per_channel_eps;
};

/// k-sigma thresholds: eps_w = k sqrt(tr process_cov), eps_v = k sqrt(tr meas_cov),
/// per-channel k sqrt(meas_cov_ii). Every threshold is floored at 1e-9.
MonitorThresholds calibrate(const MatrixXd& process_cov, const MatrixXd& meas_cov, double k = 3.0);

MonitorConfig make_monitor_config(const MonitorThresholds& thresholds, int horizon);

}  // namespace rpo
