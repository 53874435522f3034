#pragma once

#include <cstdint>
#include <exception>
#include <vector>

#include "rpo/fdia.hpp"
#include "rpo/oracle.hpp"
#include "rpo/ukf.hpp"

namespace rpo {

enum class Execution { serial, parallel };

/// Runs fn(i) for i in [0, n) and stores results by index. The serial path is the reference;
/// the parallel path must be bitwise identical because every trial owns its RNG stream.
template <class Result, class Fn>
std::vector<Result> run_trials(int n, Execution exec, Fn&& fn) {
  std::vector<Result> out(static_cast<std::size_t>(n));
  if (exec == Execution::serial) {
    for (int i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = fn(i);
    return out;
  }
  std::exception_ptr error;
#pragma omp parallel for schedule(static)
  for (int i = 0; i < n; ++i) {
    try {
      out[static_cast<std::size_t>(i)] = fn(i);
    } catch (...) {
#pragma omp critical(rpo_trial_error)
      if (!error) error = std::current_exception();
    }
  }
  if (error) std::rethrow_exception(error);
  return out;
}

// ---------------------------------------------------------------------------
// Pruning trials

struct PruneMcConfig {
  int channels = 12;
  int attacked = 3;
  OracleStats oracle = OracleStats::uniform(12, 0.6, 0.5);
  double eta = 0.8;
  int trials = 10000;
  std::uint64_t seed = 1;
  std::vector<int> fixed_support;  // empty: uniform random support (channels <= 64)
  int support_period = 1;          // trials sharing one random support (time-varying attacks)
};

struct PruneTrial {
  int retained_attacked = 0;  // attacked channels surviving the pruning
  int pruned_size = 0;
  int oracle_retained_attacked = 0;  // attacked channels in the raw oracle safe set
  bool excluded = true;              // pruned set disjoint from the attack support
  std::uint64_t retained_mask = 0;   // bit c: attacked channel c survived the pruning
};

struct PruneMcResult {
  int l_eta = 0;
  std::vector<PruneTrial> trials;

  double exclusion_rate() const;
  double oracle_exclusion_rate() const;
  long retained_total() const;
  /// Number of distinct attacked channels retained in at least one trial.
  int distinct_retained() const;
};

PruneMcResult prune_monte_carlo(const PruneMcConfig& config, Execution exec = Execution::parallel);

// ---------------------------------------------------------------------------
// Linearized-loop trials: noisy linear model about an operating point, a UKF on the same
// model, and a residual monitor on the filter history.

struct LinearLoopConfig {
  RobotParams robot;
  Vec3 operating_point{0.0, 0.5, 0.0};
  double dt = 0.01;
  Mat3 process_cov = Vec3(0.0, 1e-6, 1e-6).asDiagonal().toDenseMatrix();  // per step
  Mat6 meas_cov = Mat6::Identity() * 1e-4;
  Vec3 initial_covariance = Vec3::Constant(1e-4);
  UkfConfig ukf;
  int monitor_horizon = 10;
  double k_sigma = 3.0;

  bool attack = true;
  std::vector<int> channels{0, 2, 3, 4};
  int attack_horizon = 10;
  double alpha = -1.0;  // < 0: (0.5 eps_v)^2
  double target_shift = 0.25;  // |H^+ e| the attacker designs for
  int steps = 800;
  int attack_step = 100;
  int ramp_steps = 300;
  int average_steps = 100;  // trailing window for the achieved shift

  int trials = 200;
  std::uint64_t seed = 1;
};

struct LinearTrial {
  int windows = 0;               // monitor evaluations
  int alarms = 0;                // psi1 = 1 over all windows
  int windows_after_attack = 0;
  int alarms_after_attack = 0;
  bool final_alarm = false;      // verdict on the last window, attack fully applied
  Vec3 achieved_shift = Vec3::Zero();  // mean estimate-minus-truth over the trailing window
};

struct LinearLoopResult {
  VectorXd designed_shift;  // H^+ e of the synthesized attack
  VectorXd attack_head;     // per-sample attack vector
  AttackBranch branch = AttackBranch::none;
  double residual = 0.0;
  double alpha = 0.0;
  double eps_v = 0.0;
  std::vector<LinearTrial> trials;

  /// Fraction of trials whose final monitor verdict is psi1 = 0.
  double stealth_rate() const;
  /// Fraction of post-attack windows (all trials pooled) with psi1 = 0.
  double window_stealth_rate() const;
  /// Fraction of trials with no alarm at all after the attack starts.
  double clean_trial_rate() const;
  /// Alarm fraction over all windows.
  double alarm_rate() const;
  Vec3 mean_achieved_shift() const;
};

LinearLoopResult linear_loop_trials(const LinearLoopConfig& config, Execution exec = Execution::parallel);

}  // namespace rpo
