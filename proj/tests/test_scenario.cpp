#include <algorithm>
#include <bit>
#include <cmath>
#include <sstream>

#include "doctest.h"
#include "rpo/config.hpp"
#include "rpo/errors.hpp"
#include "rpo/report.hpp"
#include "rpo/scenario.hpp"

using namespace rpo;

namespace {

ScenarioConfig short_config(double duration = 10.0, double attack_start = 4.0) {
  ScenarioConfig c;
  c.duration = duration;
  c.attack.schedule.start_time = attack_start;
  c.trajectory.body_offset = c.robot.offset;
  return c;
}

std::string csv(const RunLog& log) {
  std::ostringstream out;
  write_run_csv(out, log);
  return out.str();
}

}  // namespace

TEST_CASE("config defaults and overrides") {
  const ConfigBundle empty = parse_config("");
  CHECK(empty.scenario.dt == 0.01);
  CHECK(empty.scenario.duration == 60.0);
  CHECK(empty.scenario.strategy == ObserverStrategy::pruning_ukf);
  CHECK(empty.scenario.attack.schedule.start_time == 20.0);
  CHECK(empty.scenario.attack.channel_count == 2);
  CHECK(empty.scenario.eta == 0.8);
  CHECK(empty.scenario.trajectory.body_offset == empty.scenario.robot.offset);

  const ConfigBundle b = parse_config(R"(
seed: 42
strategy: ukf-only
simulation: {dt: 0.02, duration: 5}
robot: {offset: 0.2}
trajectory: {kind: line, speed: 0.3}
noise: {process: [1.0e-3, 2.0e-3], measurement: 1.0e-5}
attack: {enabled: true, channels: [1, 5], mode: ramp, alpha: 1.0e-4, gamma: auto}
oracle: {p: [0.9, 0.9, 0.9, 0.9, 0.9, 0.8], s: 0.4, always_on: true}
pruning: {eta: 0.5}
monitor: {horizon: 5, k_sigma: 4}
ukf: {alpha: 0.8}
prune_mc: {channels: 8, attacked: 2, trials: 50, support: [1, 2], etas: [0.2, 0.7]}
)");
  const ScenarioConfig& s = b.scenario;
  CHECK(s.seed == 42);
  CHECK(s.strategy == ObserverStrategy::ukf_only);
  CHECK(s.dt == 0.02);
  CHECK(s.steps() == 250);
  CHECK(s.robot.offset == 0.2);
  CHECK(s.trajectory.body_offset == 0.2);
  CHECK(s.trajectory.kind == TrajectoryKind::line);
  CHECK(s.process_cov(1, 1) == 2e-3);
  CHECK(s.meas_cov(4, 4) == 1e-5);
  CHECK(s.attack.channels == std::vector<int>{1, 5});
  CHECK(s.attack.schedule.mode == ScheduleMode::ramp);
  CHECK(s.attack.alpha == 1e-4);
  CHECK(s.attack.gamma == 0.0);
  CHECK(s.oracle.p(5) == 0.8);
  CHECK(s.oracle.s(0) == 0.4);
  CHECK(s.oracle_always_on);
  CHECK(s.eta == 0.5);
  CHECK(s.monitor.horizon == 5);
  CHECK(s.ukf.alpha == 0.8);
  CHECK(b.prune_mc.base.channels == 8);
  CHECK(b.prune_mc.base.fixed_support == std::vector<int>{1, 2});
  CHECK(b.prune_mc.etas == std::vector<double>{0.2, 0.7});
}

TEST_CASE("config errors") {
  CHECK_THROWS_AS(parse_config("strategy: best"), ConfigError);
  CHECK_THROWS_AS(parse_config("simulation: {dt: 0}"), ConfigError);
  CHECK_THROWS_AS(parse_config("simulation: {duration: -1}"), ConfigError);
  CHECK_THROWS_AS(parse_config("simulation: {dt: fast}"), ConfigError);
  CHECK_THROWS_AS(parse_config("trajectory: {kind: spiral}"), ConfigError);
  CHECK_THROWS_AS(parse_config("oracle: {p: [0.5, 0.5]}"), ConfigError);
  CHECK_THROWS_AS(parse_config("oracle: {p: 1.5}"), ConfigError);
  CHECK_THROWS_AS(parse_config("pruning: {eta: 1.0}"), ConfigError);
  CHECK_THROWS_AS(parse_config("attack: {channels: [6]}"), ConfigError);
  CHECK_THROWS_AS(parse_config("attack: {mode: sometimes}"), ConfigError);
  CHECK_THROWS_AS(parse_config("noise: {measurement: -1}"), ConfigError);
  CHECK_THROWS_AS(parse_config("gains: {k_q: 0}"), ConfigError);
  CHECK_THROWS_AS(parse_config("[1, 2"), ConfigError);
  CHECK_THROWS_AS(parse_config("- a\n- b"), ConfigError);
  CHECK_THROWS_AS(parse_config("prune_mc: {etas: [0]}"), ConfigError);
  CHECK_THROWS_AS(parse_config("prune_mc: {support: sometimes}"), ConfigError);
  CHECK_THROWS_AS(load_config("/nonexistent/config.yaml"), ConfigError);
  CHECK(parse_config("attack: {fraction: 0.5}").scenario.attack.channel_count == 3);
  CHECK(parse_strategy("ukf-with-oracle") == ObserverStrategy::ukf_with_oracle);
}

TEST_CASE("shipped configs parse") {
  for (const char* name : {"nominal.yaml", "prune_demo.yaml", "prune_random.yaml"}) {
    CHECK_NOTHROW(load_config(std::string(RPO_SOURCE_DIR) + "/configs/" + name));
  }
  const ConfigBundle demo = load_config(std::string(RPO_SOURCE_DIR) + "/configs/prune_demo.yaml");
  CHECK(demo.prune_mc.base.fixed_support == attack_channels(demo.scenario));
}

TEST_CASE("run log shape, determinism and attack timing") {
  const ScenarioConfig cfg = short_config();
  const RunResult a = run(cfg);
  const RunResult b = run(cfg);
  CHECK(a.log.rows.size() == static_cast<std::size_t>(cfg.steps()));
  CHECK(csv(a.log) == csv(b.log));
  ScenarioConfig other = cfg;
  other.seed = 2;
  CHECK(csv(run(other).log) != csv(a.log));
  bool any_attack = false;
  for (const LogRow& r : a.log.rows) {
    if (r.time < cfg.attack.schedule.start_time - 1e-12) {
      CHECK(r.e.isZero());
      CHECK_FALSE(r.attack_active);
    }
    if (!r.e.isZero()) {
      any_attack = true;
      for (int c = 0; c < kChannels; ++c) {
        if (r.e(c) != 0.0) CHECK(((r.attacked_mask >> c) & 1u));
      }
    }
    if (r.exclusion_event) CHECK((r.filter_mask & r.attacked_mask) == 0u);
  }
  CHECK(any_attack);
  const std::string text = csv(a.log);
  CHECK(text.rfind("time,theta,v,omega,x,y,", 0) == 0);
  CHECK(std::count(text.begin(), text.end(), '\n') == cfg.steps() + 1);
}

TEST_CASE("strategy masks") {
  ScenarioConfig cfg = short_config(6.0, 2.0);
  for (ObserverStrategy s : kAllStrategies) {
    cfg.strategy = s;
    const RunResult r = run(cfg);
    for (const LogRow& row : r.log.rows) {
      if (row.time < cfg.attack.schedule.start_time - 1e-12 || s == ObserverStrategy::ukf_only) {
        CHECK(row.filter_mask == 0x3Fu);
      } else if (s == ObserverStrategy::ukf_with_oracle) {
        CHECK(row.filter_mask == row.oracle_safe_mask);
      } else {
        CHECK((row.filter_mask & ~row.oracle_safe_mask) == 0u);
        CHECK(std::popcount(row.filter_mask) <= row.l_eta);
      }
    }
  }
  cfg.oracle_always_on = true;
  cfg.strategy = ObserverStrategy::ukf_with_oracle;
  const RunResult r = run(cfg);
  CHECK(r.log.rows.front().filter_mask == r.log.rows.front().oracle_safe_mask);
}

TEST_CASE("metrics") {
  RunLog log;
  for (int k = 0; k < 10; ++k) {
    LogRow r;
    r.time = k * 0.1;
    r.attack_active = k >= 5;
    r.attacked_mask = r.attack_active ? 0b11u : 0u;
    r.oracle_safe_mask = r.attack_active ? 0b111100u : 0x3Fu;
    r.filter_mask = r.oracle_safe_mask;
    r.exclusion_event = true;
    log.rows.push_back(r);
  }
  MetricsSummary m = metrics(log);
  CHECK(m.tracking_rmse == 0.0);
  CHECK(m.estimation_rmse_v == 0.0);
  CHECK(m.oracle_precision == 1.0);
  CHECK(m.oracle_recall == 1.0);
  CHECK(m.pruning_exclusion_rate == 1.0);
  CHECK(m.localization_precision == 1.0);
  log.rows[7].oracle_safe_mask = 0b111110u;  // channel 1 missed
  log.rows[7].position_error = 1.0;
  log.rows[7].monitor_unsafe = true;
  m = metrics(log);
  CHECK(m.oracle_recall == doctest::Approx(9.0 / 10.0));
  CHECK(m.tracking_rmse == doctest::Approx(std::sqrt(0.1)));
  CHECK(m.monitor_detection_rate == doctest::Approx(0.2));
  CHECK(m.monitor_false_alarm_rate == 0.0);
  CHECK(metrics(RunLog{}).steps == 0);

  ScenarioConfig cfg = short_config(6.0, 2.0);
  cfg.oracle = OracleStats::uniform(kChannels, 1.0, 0.5);
  cfg.strategy = ObserverStrategy::ukf_with_oracle;
  const MetricsSummary perfect = run(cfg).metrics;
  CHECK(perfect.oracle_precision == 1.0);
  CHECK(perfect.oracle_recall == 1.0);
  CHECK(perfect.localization_precision == 1.0);
}

TEST_CASE("attack-free tracking on the nominal circle") {
  ScenarioConfig cfg = short_config(60.0, 20.0);
  cfg.attack.enabled = false;
  cfg.strategy = ObserverStrategy::ukf_only;
  const RunResult r = run(cfg);
  CHECK(r.metrics.tracking_rmse < 0.05);
  CHECK(r.log.rows.back().position_error < 0.05);
}

TEST_CASE("a velocity attack drags the unprotected estimate of v") {
  ScenarioConfig cfg = short_config(40.0, 20.0);
  cfg.strategy = ObserverStrategy::ukf_only;
  cfg.attack.channels = {0, 2, 3, 4};
  const double attacked = run(cfg).metrics.estimation_rmse_v;
  cfg.attack.enabled = false;
  const double clean = run(cfg).metrics.estimation_rmse_v;
  CHECK(attacked > 5.0 * clean);
}

TEST_CASE("serial and parallel strategy sweeps agree bitwise") {
  const ScenarioConfig cfg = short_config(5.0, 2.0);
  const auto par = run_strategy_sweep(cfg, true);
  const auto ser = run_strategy_sweep(cfg, false);
  REQUIRE(par.size() == 3);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(par[i].log.strategy == kAllStrategies[i]);
    CHECK(csv(par[i].log) == csv(ser[i].log));
    ScenarioConfig single = cfg;
    single.strategy = kAllStrategies[i];
    CHECK(csv(run(single).log) == csv(par[i].log));
  }
  std::ostringstream j;
  j << metrics_json(par, cfg);
  CHECK(j.str().find("\"pruning-ukf.tracking_rmse\"") != std::string::npos);
}

TEST_CASE("numeric blow-up reports the step") {
  ScenarioConfig cfg = short_config(5.0, 2.0);
  cfg.gains = {1e6, 1e6};
  try {
    run(cfg);
    FAIL("expected a numeric error");
  } catch (const NumericError& e) {
    CHECK(std::string(e.what()).find("step ") == 0);
  }
}

TEST_CASE("invalid scenario is rejected before running") {
  ScenarioConfig cfg = short_config();
  cfg.dt = -1.0;
  CHECK_THROWS_AS(run(cfg), ConfigError);
}
