#pragma once

#include <optional>
#include <string_view>
#include <vector>

#include "rpo/robot_model.hpp"

namespace rpo {

/// Euler discretization of the (theta, q) dynamics and the output Jacobian about x0.
struct Linearization {
  Mat3 a = Mat3::Identity();
  Mat32 b = Mat32::Zero();
  Mat63 c = Mat63::Zero();
};

/// Stacked horizon model Y_f = H x_k + G u_f + e.
struct LinearizedModel {
  Mat3 a;
  Mat32 b;
  Mat63 c;
  double sample_time = 0.0;
  int horizon = 0;  // T_f
  MatrixXd h;       // (T_f+1)*6 x 3
  MatrixXd g;       // (T_f+1)*6 x 2*T_f
};

/// H = [U1 U2] [Sigma1; 0] Vt.
struct SvdSplit {
  MatrixXd u1;
  MatrixXd u2;
  VectorXd singular_values;
  MatrixXd vt;
};

struct AttackConfig {
  std::vector<int> support;  // rows of the stacked measurement vector
  double alpha = 0.0;        // residual budget on |U2_T^T e|^2
  double gamma = 1.0;        // cap on |e|
};

enum class AttackBranch {
  none,               // empty support or no range-space energy reachable
  null_space,         // perfectly stealthy direction, |e| = gamma
  generalized_eigen,  // constraint-active Rayleigh maximizer, capped at gamma
};

std::string_view to_string(AttackBranch branch);

struct AttackResult {
  VectorXd e;
  AttackBranch branch = AttackBranch::none;
  double objective = 0.0;  // |U1^T e|^2
  double residual = 0.0;   // |U2^T e|^2
};

Linearization linearize(const Vec3& x0, const RobotParams& params, double sample_time);

LinearizedModel stack(const Linearization& lin, int horizon, double sample_time);

/// Throws RankDeficientError when sigma_min <= 1e-10.
SvdSplit svd_split(const MatrixXd& h);

/// Maximize |U1_T^T e|^2 subject to |U2_T^T e|^2 <= alpha and |e| <= gamma, with e zero off the
/// support. Null directions of U2_T^T are tried first; otherwise the maximal generalized
/// eigenvector of (U1_T U1_T^T, U2_T U2_T^T) is scaled to make the residual budget active.
AttackResult generate_attack(const SvdSplit& split, const AttackConfig& config);

/// Pseudo-inverse image H^+ e: the state offset the attack imitates.
VectorXd state_shift(const SvdSplit& split, const VectorXd& e);

/// Rows of the stacked vector that carry the given sensor channels over the horizon.
std::vector<int> stacked_support(const std::vector<int>& channels, int horizon,
                                 int channel_count = kChannels);

/// Channel subset of the given size maximizing the attack objective. Exhaustive when the
/// number of subsets is small, greedy otherwise; ties keep the lexicographically first subset.
std::vector<int> select_channels(const SvdSplit& split, int count, int horizon, double alpha,
                                 double gamma, int channel_count = kChannels);

enum class ScheduleMode { constant, ramp, recompute };

ScheduleMode parse_schedule_mode(std::string_view name);
std::string_view to_string(ScheduleMode mode);

struct ScheduleConfig {
  ScheduleMode mode = ScheduleMode::recompute;
  double start_time = 0.0;
  double ramp_window = 0.0;  // seconds; used by ramp, and by recompute when > 0
};

/// Amplitude envelope in [0, 1]; zero before start_time.
double attack_envelope(double t, const ScheduleConfig& config);

/// e(t) = envelope(t) * base_e. In recompute mode base_e is the vector re-solved for this step.
VectorXd attack_schedule(double t, const VectorXd& base_e, const ScheduleConfig& config);

struct AttackerSettings {
  std::vector<int> channels;  // compromised sensor channels
  int horizon = 10;
  double sample_time = 0.01;
  double alpha = 0.0;
  double gamma = 0.0;          // > 0: explicit cap; <= 0: derive from target_shift
  double target_shift = 0.25;  // |H^+ e| the attacker aims for when gamma is derived
};

/// Full-knowledge attacker: linearizes at its copy of the estimate, stacks the horizon model
/// and synthesizes a support-constrained attack. Keeps the sign of successive solutions
/// continuous in state space.
class StealthyAttacker {
 public:
  struct Synthesis {
    VectorXd stacked;
    Vec6 head = Vec6::Zero();  // attack on the current sample
    VectorXd shift;            // H^+ e
    AttackBranch branch = AttackBranch::none;
    double gamma = 0.0;
    double objective = 0.0;
    double residual = 0.0;
  };

  StealthyAttacker(const RobotParams& params, AttackerSettings settings);

  Synthesis synthesize(const Vec3& operating_point);

  const AttackerSettings& settings() const { return settings_; }

 private:
  RobotParams params_;
  AttackerSettings settings_;
  std::vector<int> rows_;
  std::optional<VectorXd> last_shift_;
};

}  // namespace rpo
