#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "rpo/controller.hpp"
#include "rpo/fdia.hpp"
#include "rpo/measurement.hpp"
#include "rpo/oracle.hpp"
#include "rpo/ukf.hpp"

namespace rpo {

enum class ObserverStrategy { ukf_only, ukf_with_oracle, pruning_ukf };

ObserverStrategy parse_strategy(std::string_view name);
std::string_view to_string(ObserverStrategy strategy);
inline constexpr ObserverStrategy kAllStrategies[] = {
    ObserverStrategy::ukf_only, ObserverStrategy::ukf_with_oracle, ObserverStrategy::pruning_ukf};

struct AttackScenario {
  bool enabled = true;
  ScheduleConfig schedule{ScheduleMode::recompute, 20.0, 2.0};
  int channel_count = 2;      // used when channels is empty
  std::vector<int> channels;  // explicit compromised channels
  int horizon = 10;           // T_f
  double alpha = -1.0;        // < 0: (0.5 eps_v)^2
  double gamma = 0.0;         // <= 0: derived from target_shift
  double target_shift = -1.0; // < 0: half the nominal path speed
};

struct InitialCondition {
  double theta_offset = 0.0;
  Vec2 position_offset = Vec2::Zero();
  Vec2 velocity_offset = Vec2::Zero();
  Vec3 covariance = Vec3::Constant(1e-4);
};

struct MonitorSettings {
  int horizon = 10;
  double k_sigma = 3.0;
};

struct ScenarioConfig {
  RobotParams robot;
  ControlGains gains;
  TrajectorySpec trajectory;
  double dt = 0.01;
  double duration = 60.0;
  InitialCondition initial;
  Mat2 process_cov = Mat2::Identity() * 1e-2;
  Mat6 meas_cov = Mat6::Identity() * 1e-4;
  AttackScenario attack;
  OracleStats oracle = OracleStats::uniform(kChannels, 0.6, 0.5);
  bool oracle_always_on = false;
  double eta = 0.8;
  MonitorSettings monitor;
  UkfConfig ukf;
  ObserverStrategy strategy = ObserverStrategy::pruning_ukf;
  std::uint64_t seed = 1;

  /// Throws ConfigError on any invalid entry.
  void validate() const;
  int steps() const;
};

/// One row per control step.
struct LogRow {
  double time = 0.0;
  Vec3 truth = Vec3::Zero();     // theta, v, omega
  Vec2 pose = Vec2::Zero();
  double theta_d = 0.0;
  Vec2 z_d = Vec2::Zero();
  Vec3 estimate = Vec3::Zero();
  Vec2 pose_estimate = Vec2::Zero();
  Vec6 y = Vec6::Zero();         // measurement as received (attacked)
  Vec6 e = Vec6::Zero();
  unsigned attacked_mask = 0;    // bit i: channel i attacked
  unsigned oracle_safe_mask = 0; // bit i: oracle reports channel i safe
  unsigned filter_mask = 0;      // bit i: channel i used in the update
  bool attack_active = false;
  bool monitor_unsafe = false;
  unsigned monitor_suspect_mask = 0;
  bool exclusion_event = false;  // filter mask disjoint from attacked channels
  int l_eta = 0;
  Vec2 tau = Vec2::Zero();
  double position_error = 0.0;
};

struct RunLog {
  ObserverStrategy strategy = ObserverStrategy::pruning_ukf;
  std::vector<int> attacked_channels;
  double attack_start = 0.0;
  std::vector<LogRow> rows;
};

struct MetricsSummary {
  std::string strategy;
  int steps = 0;
  double tracking_rmse = 0.0;
  double tracking_rmse_post_attack = 0.0;
  double estimation_rmse_theta = 0.0;
  double estimation_rmse_v = 0.0;
  double estimation_rmse_omega = 0.0;
  double monitor_false_alarm_rate = 0.0;
  double monitor_detection_rate = 0.0;
  double oracle_precision = 1.0;
  double oracle_recall = 1.0;
  double pruning_exclusion_rate = 1.0;
  double localization_precision = 1.0;
};

struct RunResult {
  RunLog log;
  MetricsSummary metrics;
};

RunResult run(const ScenarioConfig& config);

MetricsSummary metrics(const RunLog& log);

/// Closed-loop run of all three observer strategies (common random numbers across them).
std::vector<RunResult> run_strategy_sweep(const ScenarioConfig& config, bool parallel = true);

/// Channels the attacker compromises in this scenario (explicit list or best-objective subset
/// at the initial operating point).
std::vector<int> attack_channels(const ScenarioConfig& config);
/// Residual budget the attacker respects, derived from the calibrated monitor when automatic.
double attack_alpha(const ScenarioConfig& config);
double attack_target_shift(const ScenarioConfig& config);
/// Body state (theta, v, omega) on the reference at time t.
Vec3 nominal_state(const ScenarioConfig& config, double t);

}  // namespace rpo
