#include "rpo/config.hpp"

#include <yaml-cpp/yaml.h>

#include <cmath>
#include <fstream>
#include <sstream>

#include "rpo/errors.hpp"

namespace rpo {

namespace {

template <class T>
void read(const YAML::Node& node, const char* key, T& out) {
  if (const YAML::Node v = node[key]) {
    try {
      out = v.as<T>();
    } catch (const YAML::Exception& e) {
      throw ConfigError(std::string("config key '") + key + "': " + e.what());
    }
  }
}

// Scalar or list; a scalar is broadcast to `size` entries.
VectorXd read_vector(const YAML::Node& v, const char* key, Eigen::Index size) {
  try {
    if (v.IsScalar()) return VectorXd::Constant(size, v.as<double>());
    const auto values = v.as<std::vector<double>>();
    if (static_cast<Eigen::Index>(values.size()) != size) {
      throw ConfigError(std::string("config key '") + key + "' must have " + std::to_string(size) + " entries");
    }
    return Eigen::Map<const VectorXd>(values.data(), size);
  } catch (const YAML::Exception& e) {
    throw ConfigError(std::string("config key '") + key + "': " + e.what());
  }
}

// Diagonal variances (scalar or list) or a full square matrix given as a list of rows.
MatrixXd read_covariance(const YAML::Node& v, const char* key, Eigen::Index size) {
  if (v.IsSequence() && v.size() > 0 && v[0].IsSequence()) {
    MatrixXd m(size, size);
    if (static_cast<Eigen::Index>(v.size()) != size) throw ConfigError(std::string(key) + ": wrong row count");
    for (Eigen::Index r = 0; r < size; ++r) m.row(r) = read_vector(v[r], key, size).transpose();
    return m;
  }
  return read_vector(v, key, size).asDiagonal();
}

bool is_auto(const YAML::Node& v) { return v && v.IsScalar() && v.Scalar() == "auto"; }

}  // namespace

ConfigBundle parse_config(const std::string& text) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::Exception& e) {
    throw ConfigError(std::string("config parse error: ") + e.what());
  }
  if (!root || root.IsNull()) root = YAML::Node(YAML::NodeType::Map);
  if (!root.IsMap()) throw ConfigError("config root must be a mapping");

  ConfigBundle bundle;
  ScenarioConfig& s = bundle.scenario;

  read(root, "seed", s.seed);
  if (const auto v = root["strategy"]) s.strategy = parse_strategy(v.as<std::string>());

  if (const auto sim = root["simulation"]) {
    read(sim, "dt", s.dt);
    read(sim, "duration", s.duration);
  }
  if (const auto r = root["robot"]) {
    read(r, "mass", s.robot.mass);
    read(r, "inertia", s.robot.inertia);
    read(r, "offset", s.robot.offset);
    read(r, "wheel_radius", s.robot.wheel_radius);
    read(r, "half_track", s.robot.half_track);
  }
  if (const auto g = root["gains"]) {
    read(g, "k_q", s.gains.k_q);
    read(g, "k_e", s.gains.k_e);
  }
  if (const auto t = root["trajectory"]) {
    if (const auto k = t["kind"]) s.trajectory.kind = parse_trajectory_kind(k.as<std::string>());
    read(t, "radius", s.trajectory.radius);
    read(t, "rate", s.trajectory.rate);
    read(t, "speed", s.trajectory.speed);
    read(t, "heading", s.trajectory.heading);
    if (const auto c = t["center"]) s.trajectory.center = read_vector(c, "trajectory.center", 2);
  }
  s.trajectory.body_offset = s.robot.offset;

  if (const auto i = root["initial"]) {
    read(i, "theta_offset", s.initial.theta_offset);
    if (const auto v = i["position_offset"]) s.initial.position_offset = read_vector(v, "initial.position_offset", 2);
    if (const auto v = i["velocity_offset"]) s.initial.velocity_offset = read_vector(v, "initial.velocity_offset", 2);
    if (const auto v = i["covariance"]) s.initial.covariance = read_vector(v, "initial.covariance", 3);
  }
  if (const auto n = root["noise"]) {
    if (const auto v = n["process"]) s.process_cov = read_covariance(v, "noise.process", 2);
    if (const auto v = n["measurement"]) s.meas_cov = read_covariance(v, "noise.measurement", kChannels);
  }
  if (const auto a = root["attack"]) {
    read(a, "enabled", s.attack.enabled);
    read(a, "start_time", s.attack.schedule.start_time);
    if (const auto m = a["mode"]) s.attack.schedule.mode = parse_schedule_mode(m.as<std::string>());
    read(a, "ramp_window", s.attack.schedule.ramp_window);
    read(a, "horizon", s.attack.horizon);
    read(a, "count", s.attack.channel_count);
    if (const auto f = a["fraction"]) {
      const double rho = f.as<double>();
      if (!(rho >= 0.0 && rho <= 1.0)) throw ConfigError("attack.fraction must be in [0, 1]");
      s.attack.channel_count = static_cast<int>(std::lround(rho * kChannels));
    }
    if (const auto c = a["channels"]) s.attack.channels = c.as<std::vector<int>>();
    if (const auto v = a["alpha"]; v && !is_auto(v)) s.attack.alpha = v.as<double>();
    if (const auto v = a["gamma"]; v && !is_auto(v)) s.attack.gamma = v.as<double>();
    if (const auto v = a["target_shift"]; v && !is_auto(v)) s.attack.target_shift = v.as<double>();
  }
  if (const auto o = root["oracle"]) {
    if (const auto v = o["p"]) s.oracle.p = read_vector(v, "oracle.p", kChannels);
    if (const auto v = o["s"]) s.oracle.s = read_vector(v, "oracle.s", kChannels);
    read(o, "always_on", s.oracle_always_on);
  }
  if (const auto p = root["pruning"]) read(p, "eta", s.eta);
  if (const auto m = root["monitor"]) {
    read(m, "horizon", s.monitor.horizon);
    read(m, "k_sigma", s.monitor.k_sigma);
  }
  if (const auto u = root["ukf"]) {
    read(u, "alpha", s.ukf.alpha);
    read(u, "beta", s.ukf.beta);
    read(u, "kappa", s.ukf.kappa);
  }
  s.validate();

  PruneMcSettings& mc = bundle.prune_mc;
  mc.base.seed = s.seed;
  mc.base.eta = s.eta;
  if (const auto p = root["prune_mc"]) {
    read(p, "channels", mc.base.channels);
    read(p, "attacked", mc.base.attacked);
    read(p, "trials", mc.base.trials);
    read(p, "support_period", mc.base.support_period);
    read(p, "seed", mc.base.seed);
    double pv = 0.6, sv = 0.5;
    read(p, "p", pv);
    read(p, "s", sv);
    if (mc.base.channels < 1) throw ConfigError("prune_mc.channels must be >= 1");
    mc.base.oracle = OracleStats::uniform(mc.base.channels, pv, sv);
    if (const auto sup = p["support"]) {
      if (sup.IsSequence()) {
        mc.base.fixed_support = sup.as<std::vector<int>>();
      } else if (sup.Scalar() == "attacker") {
        if (mc.base.channels != kChannels) throw ConfigError("prune_mc.support 'attacker' needs 6 channels");
        mc.base.fixed_support = attack_channels(s);
      } else if (sup.Scalar() != "random") {
        throw ConfigError("prune_mc.support must be 'random', 'attacker' or a list");
      }
    }
    if (const auto e = p["etas"]) mc.etas = e.as<std::vector<double>>();
  } else {
    mc.etas = {s.eta};
  }
  for (double eta : mc.etas) {
    if (!(eta > 0.0 && eta < 1.0)) throw ConfigError("prune_mc.etas entries must be in (0, 1)");
  }
  if (mc.base.trials < 1) throw ConfigError("prune_mc.trials must be >= 1");
  for (int c : mc.base.fixed_support) {
    if (c < 0 || c >= mc.base.channels) throw ConfigError("prune_mc.support index out of range");
  }
  return bundle;
}

ConfigBundle load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

}  // namespace rpo
