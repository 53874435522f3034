#include "rpo/montecarlo.hpp"

#include <algorithm>
#include <bit>
#include <numeric>
#include <span>

#include "rpo/measurement.hpp"
#include "rpo/monitor.hpp"
#include "rpo/pruning.hpp"
#include "rpo/rng.hpp"

namespace rpo {

namespace {

enum Stream : std::uint64_t {
  kSupportStream = 11,
  kOracleTrialStream = 12,
  kLinearProcessStream = 21,
  kLinearMeasurementStream = 22,
};

std::vector<int> random_support(int channels, int attacked, Rng& rng) {
  std::vector<int> idx(static_cast<std::size_t>(channels));
  std::iota(idx.begin(), idx.end(), 0);
  // partial Fisher-Yates with an explicit uniform draw keeps the sequence portable
  for (int i = 0; i < attacked; ++i) {
    std::uniform_int_distribution<int> pick(i, channels - 1);
    std::swap(idx[static_cast<std::size_t>(i)], idx[static_cast<std::size_t>(pick(rng))]);
  }
  idx.resize(static_cast<std::size_t>(attacked));
  std::sort(idx.begin(), idx.end());
  return idx;
}

}  // namespace

double PruneMcResult::exclusion_rate() const {
  if (trials.empty()) return 1.0;
  const auto n = std::count_if(trials.begin(), trials.end(), [](const PruneTrial& t) { return t.excluded; });
  return static_cast<double>(n) / static_cast<double>(trials.size());
}

double PruneMcResult::oracle_exclusion_rate() const {
  if (trials.empty()) return 1.0;
  const auto n = std::count_if(trials.begin(), trials.end(),
                               [](const PruneTrial& t) { return t.oracle_retained_attacked == 0; });
  return static_cast<double>(n) / static_cast<double>(trials.size());
}

long PruneMcResult::retained_total() const {
  long total = 0;
  for (const auto& t : trials) total += t.retained_attacked;
  return total;
}

int PruneMcResult::distinct_retained() const {
  std::uint64_t mask = 0;
  for (const auto& t : trials) mask |= t.retained_mask;
  return std::popcount(mask);
}

PruneMcResult prune_monte_carlo(const PruneMcConfig& cfg, Execution exec) {
  if (cfg.oracle.p.size() != cfg.channels) throw std::invalid_argument("prune_monte_carlo: oracle size mismatch");
  if (cfg.attacked < 0 || cfg.attacked > cfg.channels) throw std::invalid_argument("prune_monte_carlo: bad attacked count");
  if (cfg.channels > 64) throw std::invalid_argument("prune_monte_carlo: at most 64 channels");
  if (cfg.support_period < 1) throw std::invalid_argument("prune_monte_carlo: support_period must be >= 1");
  cfg.oracle.validate();

  PruneMcResult result;
  result.l_eta = reliable_count(poisson_binomial_pmf(cfg.oracle.p), cfg.eta);
  const int l_eta = result.l_eta;

  result.trials = run_trials<PruneTrial>(cfg.trials, exec, [&](int i) {
    std::vector<int> support = cfg.fixed_support;
    if (support.empty()) {
      Rng srng = derive_rng(cfg.seed, kSupportStream, static_cast<std::uint64_t>(i / cfg.support_period));
      support = random_support(cfg.channels, cfg.attacked, srng);
    }
    Rng orng = derive_rng(cfg.seed, kOracleTrialStream, static_cast<std::uint64_t>(i));
    const OracleReport report = simulate(safe_indicator(support, cfg.channels), cfg.oracle, orng);
    const PrunedSupport pruned = prune(report, cfg.oracle.p, l_eta, cfg.eta);

    PruneTrial trial;
    trial.pruned_size = static_cast<int>(pruned.indices.size());
    for (int c : support) {
      if (std::binary_search(pruned.indices.begin(), pruned.indices.end(), c)) {
        ++trial.retained_attacked;
        trial.retained_mask |= std::uint64_t{1} << c;
      }
      if (report.q_hat(c) == 1) ++trial.oracle_retained_attacked;
    }
    trial.excluded = trial.retained_attacked == 0;
    return trial;
  });
  return result;
}

double LinearLoopResult::stealth_rate() const {
  if (trials.empty()) return 1.0;
  const auto n = std::count_if(trials.begin(), trials.end(), [](const LinearTrial& t) { return !t.final_alarm; });
  return static_cast<double>(n) / static_cast<double>(trials.size());
}

double LinearLoopResult::window_stealth_rate() const {
  long windows = 0, alarms = 0;
  for (const auto& t : trials) {
    windows += t.windows_after_attack;
    alarms += t.alarms_after_attack;
  }
  return windows > 0 ? 1.0 - static_cast<double>(alarms) / static_cast<double>(windows) : 1.0;
}

double LinearLoopResult::clean_trial_rate() const {
  if (trials.empty()) return 1.0;
  const auto n = std::count_if(trials.begin(), trials.end(),
                               [](const LinearTrial& t) { return t.alarms_after_attack == 0; });
  return static_cast<double>(n) / static_cast<double>(trials.size());
}

double LinearLoopResult::alarm_rate() const {
  long windows = 0, alarms = 0;
  for (const auto& t : trials) {
    windows += t.windows;
    alarms += t.alarms;
  }
  return windows > 0 ? static_cast<double>(alarms) / static_cast<double>(windows) : 0.0;
}

Vec3 LinearLoopResult::mean_achieved_shift() const {
  Vec3 sum = Vec3::Zero();
  for (const auto& t : trials) sum += t.achieved_shift;
  return trials.empty() ? sum : Vec3(sum / static_cast<double>(trials.size()));
}

LinearLoopResult linear_loop_trials(const LinearLoopConfig& cfg, Execution exec) {
  const Linearization lin = linearize(cfg.operating_point, cfg.robot, cfg.dt);
  const MonitorThresholds thresholds = calibrate(cfg.process_cov, cfg.meas_cov, cfg.k_sigma);
  const MonitorConfig monitor_cfg = make_monitor_config(thresholds, cfg.monitor_horizon);

  LinearLoopResult result;
  result.eps_v = thresholds.eps_v;
  result.alpha = cfg.alpha >= 0.0 ? cfg.alpha : 0.25 * thresholds.eps_v * thresholds.eps_v;
  result.attack_head = VectorXd::Zero(kChannels);
  if (cfg.attack) {
    AttackerSettings settings;
    settings.channels = cfg.channels;
    settings.horizon = cfg.attack_horizon;
    settings.sample_time = cfg.dt;
    settings.alpha = result.alpha;
    settings.gamma = 0.0;
    settings.target_shift = cfg.target_shift;
    StealthyAttacker attacker(cfg.robot, settings);
    const auto synthesis = attacker.synthesize(cfg.operating_point);
    result.attack_head = synthesis.head;
    result.designed_shift = synthesis.shift;
    result.branch = synthesis.branch;
    result.residual = synthesis.residual;
  }

  const Mat3 a = lin.a;
  const Mat63 c = lin.c;
  const UnscentedKalmanFilter filter(
      cfg.ukf, [a](const VectorXd& x, const VectorXd&, double) -> VectorXd { return a * x; },
      [c](const VectorXd& x) -> VectorXd { return c * x; });
  const MonitorModel model{[a](const VectorXd& x, const VectorXd&) -> VectorXd { return a * x; },
                           [c](const VectorXd& x) -> VectorXd { return c * x; }};
  const GaussianSampler wsample(cfg.process_cov);
  const GaussianSampler vsample(cfg.meas_cov);
  const VectorXd head = result.attack_head;
  std::vector<int> mask(kChannels);
  std::iota(mask.begin(), mask.end(), 0);
  const VectorXd u0 = VectorXd::Zero(2);

  result.trials = run_trials<LinearTrial>(cfg.trials, exec, [&](int i) {
    Rng wrng = derive_rng(cfg.seed, kLinearProcessStream, static_cast<std::uint64_t>(i));
    Rng vrng = derive_rng(cfg.seed, kLinearMeasurementStream, static_cast<std::uint64_t>(i));
    const auto keep = static_cast<std::size_t>(cfg.monitor_horizon + 1);

    LinearTrial trial;
    VectorXd x = VectorXd::Zero(kStateDim);
    GaussianBelief belief{VectorXd::Zero(kStateDim), cfg.initial_covariance.asDiagonal()};
    std::vector<VectorXd> ys, xs, us;
    for (int k = 0; k < cfg.steps; ++k) {
      double envelope = 0.0;
      if (cfg.attack && k >= cfg.attack_step) {
        envelope = cfg.ramp_steps > 0
                       ? std::min(1.0, static_cast<double>(k - cfg.attack_step) / cfg.ramp_steps)
                       : 1.0;
      }
      const VectorXd y = c * x + vsample(vrng) + envelope * head;
      belief = filter.update(belief, y, mask, cfg.meas_cov);

      ys.push_back(y);
      xs.push_back(belief.mean);
      us.push_back(u0);
      if (ys.size() > keep) {
        ys.erase(ys.begin());
        xs.erase(xs.begin());
        us.erase(us.begin());
      }
      if (ys.size() == keep) {
        const MonitorVerdict verdict = evaluate(ys, us, xs, model, monitor_cfg);
        ++trial.windows;
        if (k >= cfg.attack_step) ++trial.windows_after_attack;
        if (verdict.unsafe) {
          ++trial.alarms;
          if (k >= cfg.attack_step) ++trial.alarms_after_attack;
        }
        trial.final_alarm = verdict.unsafe;
      }
      if (k >= cfg.steps - cfg.average_steps) trial.achieved_shift += Vec3(belief.mean - x);

      x = a * x + wsample(wrng);
      belief = filter.predict(belief, u0, cfg.dt, cfg.process_cov).belief;
    }
    if (cfg.average_steps > 0) trial.achieved_shift /= cfg.average_steps;
    return trial;
  });
  return result;
}

}  // namespace rpo
