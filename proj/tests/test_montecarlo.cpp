#include <cmath>
#include <stdexcept>

#include "doctest.h"
#include "rpo/config.hpp"
#include "rpo/errors.hpp"
#include "rpo/montecarlo.hpp"
#include "rpo/pruning.hpp"

using namespace rpo;

namespace {

double choose(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

bool same(const PruneTrial& a, const PruneTrial& b) {
  return a.retained_attacked == b.retained_attacked && a.pruned_size == b.pruned_size &&
         a.oracle_retained_attacked == b.oracle_retained_attacked && a.excluded == b.excluded &&
         a.retained_mask == b.retained_mask;
}

}  // namespace

TEST_CASE("run_trials: serial and parallel agree and rethrow") {
  auto square = [](int i) { return i * i; };
  CHECK(run_trials<int>(50, Execution::serial, square) == run_trials<int>(50, Execution::parallel, square));
  CHECK(run_trials<int>(0, Execution::parallel, square).empty());
  auto bad = [](int i) -> int {
    if (i == 7) throw std::runtime_error("trial 7");
    return i;
  };
  CHECK_THROWS_AS(run_trials<int>(20, Execution::serial, bad), std::runtime_error);
  CHECK_THROWS_AS(run_trials<int>(20, Execution::parallel, bad), std::runtime_error);
}

TEST_CASE("prune Monte Carlo is identical serial and parallel") {
  PruneMcConfig cfg;
  cfg.trials = 3000;
  cfg.seed = 9;
  cfg.support_period = 4;
  const PruneMcResult s = prune_monte_carlo(cfg, Execution::serial);
  const PruneMcResult p = prune_monte_carlo(cfg, Execution::parallel);
  REQUIRE(s.trials.size() == p.trials.size());
  bool all = true;
  for (std::size_t i = 0; i < s.trials.size(); ++i) all = all && same(s.trials[i], p.trials[i]);
  CHECK(all);
  CHECK(s.l_eta == p.l_eta);
  cfg.seed = 10;
  CHECK(prune_monte_carlo(cfg).exclusion_rate() != doctest::Approx(s.exclusion_rate()).epsilon(1e-12));
}

TEST_CASE("random-support exclusion rate matches the hypergeometric closed form") {
  PruneMcConfig cfg;
  cfg.trials = 20000;
  cfg.seed = 4;
  const PruneMcResult r = prune_monte_carlo(cfg);
  const int l = r.l_eta;
  CHECK(l == reliable_count(poisson_binomial_pmf(cfg.oracle.p), cfg.eta));
  // equal scores: the top-l set is {0..l-1}; each attacked channel inside it survives the oracle w.p. 0.4
  double expected = 0.0;
  for (int h = 0; h <= cfg.attacked; ++h) {
    const double ph = choose(l, h) * choose(cfg.channels - l, cfg.attacked - h) / choose(cfg.channels, cfg.attacked);
    expected += ph * std::pow(0.6, h);
  }
  const double sigma = std::sqrt(expected * (1 - expected) / cfg.trials);
  CHECK(std::abs(r.exclusion_rate() - expected) < 4 * sigma);
  const double raw = std::pow(0.6, cfg.attacked);
  CHECK(std::abs(r.oracle_exclusion_rate() - raw) < 4 * std::sqrt(raw * (1 - raw) / cfg.trials));
  for (const PruneTrial& t : r.trials) {
    CHECK(t.pruned_size <= l);
    CHECK(t.retained_attacked <= t.oracle_retained_attacked);
    CHECK(t.excluded == (t.retained_mask == 0));
  }
}

TEST_CASE("fixed support outside the top-l set is always excluded") {
  PruneMcConfig cfg;
  cfg.channels = 6;
  cfg.attacked = 2;
  cfg.oracle = OracleStats::uniform(6, 0.6, 0.5);
  cfg.fixed_support = {4, 5};
  cfg.trials = 1000;
  for (double eta : {0.5, 0.8, 0.9}) {
    cfg.eta = eta;
    const PruneMcResult r = prune_monte_carlo(cfg);
    CHECK(r.l_eta <= 4);
    CHECK(r.exclusion_rate() == 1.0);
    CHECK(r.distinct_retained() == 0);
  }
  cfg.eta = 0.1;
  const PruneMcResult r = prune_monte_carlo(cfg);
  CHECK(r.l_eta == 5);
  CHECK(r.distinct_retained() == 1);  // only channel 4 can enter the top five
  CHECK(r.exclusion_rate() == doctest::Approx(0.6).epsilon(0.1));
}

TEST_CASE("prune Monte Carlo input checks") {
  PruneMcConfig cfg;
  cfg.trials = 1;
  cfg.channels = 6;
  CHECK_THROWS_AS(prune_monte_carlo(cfg), std::invalid_argument);
  cfg = PruneMcConfig{};
  cfg.attacked = 13;
  CHECK_THROWS_AS(prune_monte_carlo(cfg), std::invalid_argument);
  cfg = PruneMcConfig{};
  cfg.support_period = 0;
  CHECK_THROWS_AS(prune_monte_carlo(cfg), std::invalid_argument);
}

TEST_CASE("config support keyword attacker follows the scenario attacker") {
  const ConfigBundle b = parse_config(R"(
attack: {channels: [1, 3]}
prune_mc: {channels: 6, attacked: 2, support: attacker, trials: 10}
)");
  CHECK(b.prune_mc.base.fixed_support == std::vector<int>{1, 3});
  CHECK_THROWS_AS(parse_config("prune_mc: {channels: 12, support: attacker}"), ConfigError);
}

TEST_CASE("linear loop trials are identical serial and parallel") {
  LinearLoopConfig cfg;
  cfg.trials = 6;
  cfg.steps = 300;
  cfg.ramp_steps = 100;
  cfg.seed = 5;
  const LinearLoopResult s = linear_loop_trials(cfg, Execution::serial);
  const LinearLoopResult p = linear_loop_trials(cfg, Execution::parallel);
  REQUIRE(s.trials.size() == 6);
  for (std::size_t i = 0; i < 6; ++i) {
    CHECK(s.trials[i].alarms == p.trials[i].alarms);
    CHECK(s.trials[i].windows == p.trials[i].windows);
    CHECK(s.trials[i].final_alarm == p.trials[i].final_alarm);
    CHECK(s.trials[i].achieved_shift == p.trials[i].achieved_shift);
  }
  CHECK(s.designed_shift == p.designed_shift);
}

TEST_CASE("linear loop: attack-free baseline rarely alarms, null-space attack shifts v") {
  LinearLoopConfig cfg;
  cfg.trials = 20;
  cfg.steps = 500;
  cfg.ramp_steps = 200;
  cfg.attack = false;
  const LinearLoopResult clean = linear_loop_trials(cfg);
  CHECK(clean.alarm_rate() < 0.02);
  CHECK(clean.mean_achieved_shift().norm() < 0.01);

  cfg.attack = true;
  const LinearLoopResult att = linear_loop_trials(cfg);
  CHECK(att.branch == AttackBranch::null_space);
  CHECK(att.residual < 1e-12);
  CHECK(att.stealth_rate() >= 0.9);
  CHECK(att.mean_achieved_shift()(1) == doctest::Approx(cfg.target_shift).epsilon(0.05));
  CHECK(std::abs(att.mean_achieved_shift()(0)) < 0.01);
}
