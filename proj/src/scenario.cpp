#include "rpo/scenario.hpp"

#include <bit>
#include <cmath>
#include <deque>
#include <exception>
#include <optional>
#include <string>

#include "rpo/errors.hpp"
#include "rpo/monitor.hpp"
#include "rpo/pruning.hpp"
#include "rpo/rng.hpp"

namespace rpo {

namespace {

enum Stream : std::uint64_t { kProcessStream = 1, kMeasurementStream = 2, kOracleStream = 3 };

constexpr double kSelectionGamma = 1e3;

unsigned to_mask(const std::vector<int>& channels) {
  unsigned m = 0;
  for (int c : channels) m |= 1u << c;
  return m;
}

std::vector<int> all_channels() {
  std::vector<int> out;
  for (int i = 0; i < kChannels; ++i) out.push_back(i);
  return out;
}

PlantState initial_plant(const ScenarioConfig& cfg) {
  const ReferenceSample ref = reference_trajectory(cfg.trajectory, 0.0);
  PlantState s;
  s.body.theta = ref.theta_d + cfg.initial.theta_offset;
  s.body.q = c_inverse(ref.theta_d, cfg.robot) * ref.z_d_dot + cfg.initial.velocity_offset;
  s.pose.z = ref.z_d + cfg.initial.position_offset;
  return s;
}

MonitorThresholds scenario_thresholds(const ScenarioConfig& cfg) {
  return calibrate(lift_process_cov(cfg.process_cov, cfg.dt), cfg.meas_cov, cfg.monitor.k_sigma);
}

}  // namespace

Vec3 nominal_state(const ScenarioConfig& cfg, double t) {
  const ReferenceSample ref = reference_trajectory(cfg.trajectory, t);
  const Vec2 q = c_inverse(ref.theta_d, cfg.robot) * ref.z_d_dot;
  return {ref.theta_d, q.x(), q.y()};
}

ObserverStrategy parse_strategy(std::string_view name) {
  if (name == "ukf-only") return ObserverStrategy::ukf_only;
  if (name == "ukf-with-oracle") return ObserverStrategy::ukf_with_oracle;
  if (name == "pruning-ukf") return ObserverStrategy::pruning_ukf;
  throw ConfigError("unknown observer strategy '" + std::string(name) + "'");
}

std::string_view to_string(ObserverStrategy strategy) {
  switch (strategy) {
    case ObserverStrategy::ukf_only: return "ukf-only";
    case ObserverStrategy::ukf_with_oracle: return "ukf-with-oracle";
    case ObserverStrategy::pruning_ukf: return "pruning-ukf";
  }
  return "?";
}

void ScenarioConfig::validate() const {
  robot.validate();
  gains.validate();
  TrajectorySpec t = trajectory;
  t.validate();
  if (!(dt > 0.0) || !std::isfinite(dt)) throw ConfigError("simulation.dt must be > 0");
  if (!(duration > 0.0) || !std::isfinite(duration)) throw ConfigError("simulation.duration must be > 0");
  if (oracle.p.size() != kChannels) throw ConfigError("oracle.p must have one entry per channel");
  oracle.validate();
  if (!(eta > 0.0 && eta < 1.0)) throw ConfigError("pruning.eta must be in (0, 1)");
  if (monitor.horizon < 1) throw ConfigError("monitor.horizon must be >= 1");
  if (!(monitor.k_sigma > 0.0)) throw ConfigError("monitor.k_sigma must be > 0");
  ukf.validate(kStateDim);
  if ((initial.covariance.array() <= 0.0).any()) throw ConfigError("initial.covariance must be > 0");
  if (attack.horizon < 0) throw ConfigError("attack.horizon must be >= 0");
  for (int c : attack.channels) {
    if (c < 0 || c >= kChannels) throw ConfigError("attack.channels entries must be in [0, 5]");
  }
  if (attack.channels.empty() && (attack.channel_count < 0 || attack.channel_count > kChannels)) {
    throw ConfigError("attack.count must be in [0, 6]");
  }
  Eigen::SelfAdjointEigenSolver<Mat2> ep(process_cov);
  Eigen::SelfAdjointEigenSolver<Mat6> em(meas_cov);
  if (ep.eigenvalues().minCoeff() < -1e-12 || em.eigenvalues().minCoeff() < -1e-12) {
    throw ConfigError("noise covariances must be positive semi-definite");
  }
}

int ScenarioConfig::steps() const { return static_cast<int>(std::llround(duration / dt)); }

double attack_alpha(const ScenarioConfig& cfg) {
  if (cfg.attack.alpha >= 0.0) return cfg.attack.alpha;
  const double eps_v = scenario_thresholds(cfg).eps_v;
  return 0.25 * eps_v * eps_v;
}

double attack_target_shift(const ScenarioConfig& cfg) {
  if (cfg.attack.target_shift >= 0.0) return cfg.attack.target_shift;
  return 0.5 * cfg.trajectory.nominal_speed();
}

std::vector<int> attack_channels(const ScenarioConfig& cfg) {
  if (!cfg.attack.channels.empty()) return cfg.attack.channels;
  const Vec3 x0 = nominal_state(cfg, cfg.attack.schedule.start_time);
  const SvdSplit split =
      svd_split(stack(linearize(x0, cfg.robot, cfg.dt), cfg.attack.horizon, cfg.dt).h);
  const double gamma = cfg.attack.gamma > 0.0 ? cfg.attack.gamma : kSelectionGamma;
  return select_channels(split, cfg.attack.channel_count, cfg.attack.horizon, attack_alpha(cfg), gamma);
}

RunResult run(const ScenarioConfig& cfg) {
  cfg.validate();
  const RobotParams& params = cfg.robot;
  const int steps = cfg.steps();

  Rng process_rng = derive_rng(cfg.seed, kProcessStream);
  Rng meas_rng = derive_rng(cfg.seed, kMeasurementStream);
  Rng oracle_rng = derive_rng(cfg.seed, kOracleStream);
  const GaussianSampler process_noise(cfg.process_cov);
  const GaussianSampler meas_noise(cfg.meas_cov);

  const UnscentedKalmanFilter filter(cfg.ukf, robot_process(params), robot_measurement(params));
  const MatrixXd step_process_cov = lift_process_cov(cfg.process_cov, cfg.dt);

  const MonitorConfig monitor_cfg = make_monitor_config(scenario_thresholds(cfg), cfg.monitor.horizon);
  const MonitorModel monitor_model{
      [&](const VectorXd& x, const VectorXd& u) -> VectorXd {
        return discrete_state_map(Vec3(x), Vec2(u), cfg.dt, params);
      },
      robot_measurement(params)};

  const int l_eta = reliable_count(poisson_binomial_pmf(cfg.oracle.p), cfg.eta);

  RunResult result;
  RunLog& log = result.log;
  log.strategy = cfg.strategy;
  log.attack_start = cfg.attack.schedule.start_time;
  if (cfg.attack.enabled) log.attacked_channels = attack_channels(cfg);
  const unsigned attacked_bits = to_mask(log.attacked_channels);

  std::optional<StealthyAttacker> attacker;
  if (cfg.attack.enabled && !log.attacked_channels.empty()) {
    AttackerSettings settings;
    settings.channels = log.attacked_channels;
    settings.horizon = cfg.attack.horizon;
    settings.sample_time = cfg.dt;
    settings.alpha = attack_alpha(cfg);
    settings.gamma = cfg.attack.gamma;
    settings.target_shift = attack_target_shift(cfg);
    attacker.emplace(params, settings);
  }
  std::optional<Vec6> base_attack;

  PlantState plant = initial_plant(cfg);
  GaussianBelief belief;
  belief.mean = plant.body.as_vector();
  belief.cov = cfg.initial.covariance.asDiagonal();
  Vec2 pose_estimate = plant.pose.z;

  std::deque<VectorXd> y_hist, u_hist, x_hist;
  log.rows.reserve(static_cast<std::size_t>(steps));

  for (int k = 0; k < steps; ++k) {
    const double t = k * cfg.dt;
    LogRow row;
    row.time = t;
    try {
      const Vec6 y_clean = measure(plant.body.theta, plant.body.q, params, Vec6(meas_noise(meas_rng)));

      // Attack synthesized from the attacker's copy of the prior estimate.
      Vec6 e = Vec6::Zero();
      const double envelope = attacker ? attack_envelope(t, cfg.attack.schedule) : 0.0;
      if (envelope > 0.0) {
        try {
          if (cfg.attack.schedule.mode == ScheduleMode::recompute) {
            e = envelope * attacker->synthesize(Vec3(belief.mean)).head;
          } else {
            if (!base_attack) base_attack = attacker->synthesize(Vec3(belief.mean)).head;
            e = envelope * *base_attack;
          }
        } catch (const RankDeficientError&) {
          e.setZero();
        }
      }
      const MeasurementFrame frame = inject(y_clean, e);
      const bool attack_active = envelope > 0.0;
      const std::vector<int> truth_support = attack_active ? log.attacked_channels : std::vector<int>{};

      // Channel mask per strategy.
      std::vector<int> mask = all_channels();
      const bool oracle_on = cfg.oracle_always_on || t >= cfg.attack.schedule.start_time;
      OracleReport report{VectorXi::Ones(kChannels), cfg.oracle.s};
      if (oracle_on) {
        report = simulate(safe_indicator(truth_support, kChannels), cfg.oracle, oracle_rng);
        if (cfg.strategy == ObserverStrategy::ukf_with_oracle) {
          mask = report.safe_set();
        } else if (cfg.strategy == ObserverStrategy::pruning_ukf) {
          mask = prune(report, cfg.oracle.p, l_eta, cfg.eta).indices;
        }
      }

      if (!mask.empty()) {
        belief = filter.update(belief, select(VectorXd(frame.attacked()), mask), mask, cfg.meas_cov);
      }

      const auto keep = static_cast<std::size_t>(cfg.monitor.horizon + 1);
      y_hist.push_back(frame.attacked());
      x_hist.push_back(belief.mean);
      while (x_hist.size() > keep) x_hist.pop_front();
      while (y_hist.size() > keep) y_hist.pop_front();

      MonitorVerdict verdict;
      if (static_cast<int>(x_hist.size()) >= cfg.monitor.horizon + 1) {
        // u_hist holds tau_{k-T} .. tau_{k-1}; the final (unused) slot is padded.
        std::vector<VectorXd> u(u_hist.begin(), u_hist.end());
        u.push_back(Vec2::Zero());
        const std::vector<VectorXd> ys(y_hist.begin(), y_hist.end());
        const std::vector<VectorXd> xs(x_hist.begin(), x_hist.end());
        verdict = evaluate(ys, u, xs, monitor_model, monitor_cfg);
      }

      const BodyState est = BodyState::from_vector(Vec3(belief.mean));
      const ReferenceSample ref = reference_trajectory(cfg.trajectory, t);
      const Vec2 tau = control_torque(est, Pose{pose_estimate}, ref, cfg.gains, params);

      row.truth = plant.body.as_vector();
      row.pose = plant.pose.z;
      row.theta_d = ref.theta_d;
      row.z_d = ref.z_d;
      row.estimate = est.as_vector();
      row.pose_estimate = pose_estimate;
      row.y = frame.attacked();
      row.e = frame.e;
      row.attack_active = attack_active;
      row.attacked_mask = attack_active ? attacked_bits : 0u;
      row.oracle_safe_mask = to_mask(report.safe_set());
      row.filter_mask = to_mask(mask);
      row.monitor_unsafe = verdict.unsafe;
      row.monitor_suspect_mask = to_mask(verdict.suspect);
      row.exclusion_event = (row.filter_mask & row.attacked_mask) == 0u;
      row.l_eta = l_eta;
      row.tau = tau;
      row.position_error = (plant.pose.z - ref.z_d).norm();
      log.rows.push_back(row);

      // Advance plant, filter and dead-reckoned pose.
      plant = step(plant, tau, cfg.dt, Vec2(process_noise(process_rng)), params);
      pose_estimate += cfg.dt * c_matrix(est.theta, params) * est.q;
      belief = filter.predict(belief, tau, cfg.dt, step_process_cov).belief;

      u_hist.push_back(tau);
      while (u_hist.size() > keep - 1) u_hist.pop_front();
    } catch (const NumericError& err) {
      throw NumericError("step " + std::to_string(k) + ": " + err.what());
    }
  }

  result.metrics = metrics(log);
  return result;
}

MetricsSummary metrics(const RunLog& log) {
  MetricsSummary m;
  m.strategy = std::string(to_string(log.strategy));
  m.steps = static_cast<int>(log.rows.size());
  if (log.rows.empty()) return m;

  double track = 0.0, track_post = 0.0, eth = 0.0, ev = 0.0, ew = 0.0;
  int post = 0, pre = 0, false_alarms = 0, detections = 0;
  long tp = 0, fp = 0, fn = 0;
  int exclusion = 0;
  double precision_sum = 0.0;
  int precision_count = 0;

  for (const LogRow& r : log.rows) {
    const double pe2 = r.position_error * r.position_error;
    track += pe2;
    const Vec3 err = r.estimate - r.truth;
    eth += err(0) * err(0);
    ev += err(1) * err(1);
    ew += err(2) * err(2);
    if (!r.attack_active) {
      ++pre;
      if (r.monitor_unsafe) ++false_alarms;
      continue;
    }
    ++post;
    track_post += pe2;
    if (r.monitor_unsafe) ++detections;
    for (int c = 0; c < kChannels; ++c) {
      const bool attacked = (r.attacked_mask >> c) & 1u;
      const bool flagged = !((r.oracle_safe_mask >> c) & 1u);
      if (flagged && attacked) ++tp;
      if (flagged && !attacked) ++fp;
      if (!flagged && attacked) ++fn;
    }
    if (r.exclusion_event) ++exclusion;
    const int used = std::popcount(r.filter_mask);
    if (used > 0) {
      precision_sum += static_cast<double>(std::popcount(r.filter_mask & ~r.attacked_mask)) / used;
      ++precision_count;
    }
  }

  const auto n = static_cast<double>(log.rows.size());
  m.tracking_rmse = std::sqrt(track / n);
  m.tracking_rmse_post_attack = post > 0 ? std::sqrt(track_post / post) : 0.0;
  m.estimation_rmse_theta = std::sqrt(eth / n);
  m.estimation_rmse_v = std::sqrt(ev / n);
  m.estimation_rmse_omega = std::sqrt(ew / n);
  m.monitor_false_alarm_rate = pre > 0 ? static_cast<double>(false_alarms) / pre : 0.0;
  m.monitor_detection_rate = post > 0 ? static_cast<double>(detections) / post : 0.0;
  m.oracle_precision = (tp + fp) > 0 ? static_cast<double>(tp) / static_cast<double>(tp + fp) : 1.0;
  m.oracle_recall = (tp + fn) > 0 ? static_cast<double>(tp) / static_cast<double>(tp + fn) : 1.0;
  m.pruning_exclusion_rate = post > 0 ? static_cast<double>(exclusion) / post : 1.0;
  m.localization_precision = precision_count > 0 ? precision_sum / precision_count : 1.0;
  return m;
}

std::vector<RunResult> run_strategy_sweep(const ScenarioConfig& config, bool parallel) {
  constexpr int kCount = 3;
  std::vector<RunResult> out(kCount);
  std::vector<std::exception_ptr> errors(kCount);
#pragma omp parallel for schedule(static) if (parallel)
  for (int i = 0; i < kCount; ++i) {
    try {
      ScenarioConfig c = config;
      c.strategy = kAllStrategies[i];
      out[static_cast<std::size_t>(i)] = run(c);
    } catch (...) {
      errors[static_cast<std::size_t>(i)] = std::current_exception();
    }
  }
  for (const auto& err : errors) {
    if (err) std::rethrow_exception(err);
  }
  return out;
}

}  // namespace rpo
