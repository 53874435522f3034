// rpo: closed-loop runs, pruning Monte Carlo, PMF and attack inspection.

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "rpo/config.hpp"
#include "rpo/errors.hpp"
#include "rpo/montecarlo.hpp"
#include "rpo/pruning.hpp"
#include "rpo/report.hpp"
#include "rpo/scenario.hpp"

namespace {

constexpr const char* kOutEnv = "RPO_OUT_DIR";

std::string default_out_dir() {
  if (const char* env = std::getenv(kOutEnv); env && *env) return env;
  return "out";
}

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  std::string item;
  std::istringstream ss(text);
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      throw rpo::ConfigError("not a number: '" + item + "'");
    }
    if (used != item.size()) throw rpo::ConfigError("not a number: '" + item + "'");
    out.push_back(v);
  }
  if (out.empty()) throw rpo::ConfigError("empty probability list");
  return out;
}

std::string join(const std::vector<int>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + std::to_string(v[i]);
  return s;
}

int cmd_run(const std::string& path, const std::optional<std::uint64_t>& seed, const std::string& out_dir,
            const std::string& strategy, bool sweep) {
  rpo::ScenarioConfig cfg = rpo::load_config(path).scenario;
  if (seed) cfg.seed = *seed;
  if (!strategy.empty()) cfg.strategy = rpo::parse_strategy(strategy);
  std::vector<rpo::RunResult> results;
  if (sweep) {
    results = rpo::run_strategy_sweep(cfg);
  } else {
    results.push_back(rpo::run(cfg));
  }
  const auto files = rpo::write_run_outputs(out_dir, results, cfg);
  std::cout << "strategy,tracking_rmse,tracking_rmse_post_attack,estimation_rmse_v,monitor_detection_rate\n";
  for (const auto& r : results) {
    const auto& m = r.metrics;
    std::cout << m.strategy << ',' << rpo::format_double(m.tracking_rmse) << ','
              << rpo::format_double(m.tracking_rmse_post_attack) << ','
              << rpo::format_double(m.estimation_rmse_v) << ',' << rpo::format_double(m.monitor_detection_rate)
              << '\n';
  }
  std::cerr << "wrote " << files.size() << " files to " << out_dir << '\n';
  return 0;
}

int cmd_prune_mc(const std::string& path, bool per_trial) {
  const rpo::PruneMcSettings mc = rpo::load_config(path).prune_mc;
  std::vector<rpo::PruneMcResult> results;
  for (double eta : mc.etas) {
    rpo::PruneMcConfig c = mc.base;
    c.eta = eta;
    results.push_back(rpo::prune_monte_carlo(c));
  }
  if (per_trial) {
    std::cout << "eta,trial,retained_attacked,pruned_size,oracle_retained_attacked,excluded\n";
    for (std::size_t i = 0; i < results.size(); ++i) {
      for (std::size_t t = 0; t < results[i].trials.size(); ++t) {
        const auto& tr = results[i].trials[t];
        std::cout << rpo::format_double(mc.etas[i]) << ',' << t << ',' << tr.retained_attacked << ','
                  << tr.pruned_size << ',' << tr.oracle_retained_attacked << ',' << int(tr.excluded) << '\n';
      }
    }
  } else {
    rpo::write_prune_csv(std::cout, mc.etas, results);
  }
  return 0;
}

int cmd_pmf(const std::string& list) {
  const auto p = parse_list(list);
  const rpo::VectorXd r = rpo::poisson_binomial_pmf(Eigen::Map<const rpo::VectorXd>(p.data(), p.size()));
  for (Eigen::Index i = 0; i < r.size(); ++i) std::cout << (i ? " " : "") << rpo::format_double(r(i));
  std::cout << '\n';
  return 0;
}

int cmd_attack(const std::string& path, int trials) {
  const rpo::ScenarioConfig cfg = rpo::load_config(path).scenario;
  rpo::LinearLoopConfig lc;
  lc.robot = cfg.robot;
  lc.operating_point = rpo::nominal_state(cfg, cfg.attack.schedule.start_time);
  lc.dt = cfg.dt;
  lc.process_cov = rpo::lift_process_cov(cfg.process_cov, cfg.dt);
  lc.meas_cov = cfg.meas_cov;
  lc.initial_covariance = cfg.initial.covariance;
  lc.ukf = cfg.ukf;
  lc.monitor_horizon = cfg.monitor.horizon;
  lc.k_sigma = cfg.monitor.k_sigma;
  lc.channels = rpo::attack_channels(cfg);
  lc.attack_horizon = cfg.attack.horizon;
  lc.alpha = cfg.attack.alpha;
  lc.target_shift = rpo::attack_target_shift(cfg);
  lc.trials = trials;
  lc.seed = cfg.seed;
  const rpo::LinearLoopResult res = rpo::linear_loop_trials(lc);

  const auto vec = [](const rpo::VectorXd& v) {
    std::string s;
    for (Eigen::Index i = 0; i < v.size(); ++i) s += (i ? " " : "") + rpo::format_double(v(i));
    return s;
  };
  std::cout << "operating_point: " << vec(lc.operating_point) << '\n'
            << "channels: " << join(lc.channels) << '\n'
            << "branch: " << rpo::to_string(res.branch) << '\n'
            << "attack_head: " << vec(res.attack_head) << '\n'
            << "designed_shift: " << vec(res.designed_shift) << '\n'
            << "residual: " << rpo::format_double(res.residual) << '\n'
            << "alpha: " << rpo::format_double(res.alpha) << '\n'
            << "stealth_margin: " << rpo::format_double(res.alpha - res.residual) << '\n'
            << "eps_v: " << rpo::format_double(res.eps_v) << '\n'
            << "achieved_shift: " << vec(res.mean_achieved_shift()) << '\n'
            << "stealth_rate: " << rpo::format_double(res.stealth_rate()) << '\n'
            << "monitor_verdict: " << (res.stealth_rate() >= 0.95 ? "safe" : "unsafe") << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Pruning-based secure state estimation for a differential-drive robot"};
  app.require_subcommand(1);

  std::string run_config, out_dir = default_out_dir(), strategy;
  std::optional<std::uint64_t> seed;
  bool sweep = false;
  auto* run = app.add_subcommand("run", "closed-loop simulation");
  run->add_option("config", run_config, "scenario file")->required();
  run->add_option("--seed", seed, "override the configured seed");
  run->add_option("--out", out_dir, std::string("output directory (default $") + kOutEnv + " or ./out)");
  run->add_option("--strategy", strategy, "ukf-only | ukf-with-oracle | pruning-ukf");
  run->add_flag("--sweep", sweep, "run all three strategies");

  std::string mc_config;
  bool per_trial = false;
  auto* mc = app.add_subcommand("prune-mc", "Monte Carlo check of the pruning exclusion guarantee");
  mc->add_option("config", mc_config, "scenario file")->required();
  mc->add_flag("--per-trial", per_trial, "one CSV row per trial");

  std::string plist;
  auto* pmf = app.add_subcommand("pmf", "Poisson-Binomial PMF of comma-separated probabilities");
  pmf->add_option("p-list", plist, "e.g. 0.5,0.5")->required();

  std::string attack_config;
  int trials = 200;
  auto* attack = app.add_subcommand("attack", "synthesize an attack and test it on the linearized loop");
  attack->add_option("config", attack_config, "scenario file")->required();
  attack->add_option("--trials", trials, "noisy trials")->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (*run) return cmd_run(run_config, seed, out_dir, strategy, sweep);
    if (*mc) return cmd_prune_mc(mc_config, per_trial);
    if (*pmf) return cmd_pmf(plist);
    if (*attack) return cmd_attack(attack_config, trials);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 1;
}
