#include "rpo/report.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <limits>
#include <cstdio>
#include "json.hpp"
#include <sstream>
#include <stdexcept>

namespace rpo {

std::string format_double(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

namespace {

template <class V>
void put(std::ostream& out, const V& v) {
  for (Eigen::Index i = 0; i < v.size(); ++i) out << ',' << format_double(v(i));
}

std::ofstream open_out(const std::filesystem::path& p) {
  std::ofstream f(p);
  if (!f) throw std::runtime_error("cannot write '" + p.string() + "'");
  return f;
}

struct Series {
  std::string label;
  std::string color;
  std::vector<double> x, y;
};

// Minimal line chart.
std::string svg_chart(const std::string& title, const std::string& xlabel, const std::string& ylabel,
                      const std::vector<Series>& series, bool equal_axes = false) {
  constexpr double W = 640, H = 420, L = 60, R = 20, T = 36, B = 48;
  double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
  for (const auto& s : series) {
    for (double v : s.x) if (std::isfinite(v)) { x0 = std::min(x0, v); x1 = std::max(x1, v); }
    for (double v : s.y) if (std::isfinite(v)) { y0 = std::min(y0, v); y1 = std::max(y1, v); }
  }
  if (!std::isfinite(x0)) { x0 = 0; x1 = 1; y0 = 0; y1 = 1; }
  if (x1 - x0 < 1e-12) { x0 -= 0.5; x1 += 0.5; }
  if (y1 - y0 < 1e-12) { y0 -= 0.5; y1 += 0.5; }
  const double pad = 0.05 * (y1 - y0);
  y0 -= pad;
  y1 += pad;
  double sx = (W - L - R) / (x1 - x0), sy = (H - T - B) / (y1 - y0);
  if (equal_axes) sx = sy = std::min(sx, sy);
  auto px = [&](double x) { return L + (x - x0) * sx; };
  auto py = [&](double y) { return H - B - (y - y0) * sy; };

  std::ostringstream o;
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\">\n"
    << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
    << "<text x=\"" << W / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">" << title << "</text>\n"
    << "<rect x=\"" << L << "\" y=\"" << T << "\" width=\"" << W - L - R << "\" height=\"" << H - T - B
    << "\" fill=\"none\" stroke=\"#444\"/>\n"
    << "<text x=\"" << W / 2 << "\" y=\"" << H - 10 << "\" text-anchor=\"middle\" font-size=\"12\">" << xlabel
    << "</text>\n"
    << "<text x=\"14\" y=\"" << H / 2 << "\" text-anchor=\"middle\" font-size=\"12\" transform=\"rotate(-90 14 "
    << H / 2 << ")\">" << ylabel << "</text>\n";
  for (int k = 0; k <= 4; ++k) {
    const double xv = x0 + (x1 - x0) * k / 4.0, yv = y0 + (y1 - y0) * k / 4.0;
    char xb[32], yb[32];
    std::snprintf(xb, sizeof xb, "%.3g", xv);
    std::snprintf(yb, sizeof yb, "%.3g", yv);
    o << "<text x=\"" << px(xv) << "\" y=\"" << H - B + 14 << "\" text-anchor=\"middle\" font-size=\"10\">" << xb
      << "</text>\n<text x=\"" << L - 4 << "\" y=\"" << py(yv) + 3 << "\" text-anchor=\"end\" font-size=\"10\">"
      << yb << "</text>\n";
  }
  int row = 0;
  for (const auto& s : series) {
    o << "<polyline fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"1.2\" points=\"";
    const std::size_t n = std::min(s.x.size(), s.y.size());
    const std::size_t stride = std::max<std::size_t>(1, n / 2000);
    for (std::size_t i = 0; i < n; i += stride) {
      if (std::isfinite(s.x[i]) && std::isfinite(s.y[i])) o << px(s.x[i]) << ',' << py(s.y[i]) << ' ';
    }
    o << "\"/>\n<text x=\"" << L + 8 << "\" y=\"" << T + 14 + 14 * row << "\" font-size=\"11\" fill=\"" << s.color
      << "\">" << s.label << "</text>\n";
    ++row;
  }
  o << "</svg>\n";
  return o.str();
}

const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};

Series column(const RunLog& log, const std::string& label, const char* color,
              const std::function<double(const LogRow&)>& f) {
  Series s{label, color, {}, {}};
  for (const auto& r : log.rows) {
    s.x.push_back(r.time);
    s.y.push_back(f(r));
  }
  return s;
}

}  // namespace

void write_run_csv(std::ostream& out, const RunLog& log) {
  out << "time,theta,v,omega,x,y,theta_d,zd_x,zd_y,theta_hat,v_hat,omega_hat,x_hat,y_hat,"
         "y0,y1,y2,y3,y4,y5,e0,e1,e2,e3,e4,e5,attacked_mask,oracle_safe_mask,filter_mask,"
         "attack_active,monitor_unsafe,monitor_suspect_mask,exclusion_event,l_eta,tau_r,tau_l,position_error\n";
  for (const auto& r : log.rows) {
    out << format_double(r.time);
    put(out, r.truth);
    put(out, r.pose);
    out << ',' << format_double(r.theta_d);
    put(out, r.z_d);
    put(out, r.estimate);
    put(out, r.pose_estimate);
    put(out, r.y);
    put(out, r.e);
    out << ',' << r.attacked_mask << ',' << r.oracle_safe_mask << ',' << r.filter_mask << ','
        << int(r.attack_active) << ',' << int(r.monitor_unsafe) << ',' << r.monitor_suspect_mask << ','
        << int(r.exclusion_event) << ',' << r.l_eta;
    put(out, r.tau);
    out << ',' << format_double(r.position_error) << '\n';
  }
}

std::string metrics_json(const std::vector<RunResult>& results, const ScenarioConfig& config) {
  nlohmann::ordered_json j;
  j["seed"] = config.seed;
  j["dt"] = config.dt;
  j["duration"] = config.duration;
  j["trajectory"] = std::string(to_string(config.trajectory.kind));
  j["attack_enabled"] = config.attack.enabled;
  j["attack_start"] = config.attack.schedule.start_time;
  j["eta"] = config.eta;
  for (const auto& res : results) {
    const auto& m = res.metrics;
    const std::string k = m.strategy + ".";
    std::string channels;
    for (int c : res.log.attacked_channels) channels += (channels.empty() ? "" : ",") + std::to_string(c);
    j[k + "attacked_channels"] = channels;
    j[k + "steps"] = m.steps;
    j[k + "tracking_rmse"] = m.tracking_rmse;
    j[k + "tracking_rmse_post_attack"] = m.tracking_rmse_post_attack;
    j[k + "estimation_rmse_theta"] = m.estimation_rmse_theta;
    j[k + "estimation_rmse_v"] = m.estimation_rmse_v;
    j[k + "estimation_rmse_omega"] = m.estimation_rmse_omega;
    j[k + "monitor_false_alarm_rate"] = m.monitor_false_alarm_rate;
    j[k + "monitor_detection_rate"] = m.monitor_detection_rate;
    j[k + "oracle_precision"] = m.oracle_precision;
    j[k + "oracle_recall"] = m.oracle_recall;
    j[k + "pruning_exclusion_rate"] = m.pruning_exclusion_rate;
    j[k + "localization_precision"] = m.localization_precision;
  }
  return j.dump(2) + "\n";
}

std::vector<std::filesystem::path> write_run_outputs(const std::filesystem::path& dir,
                                                     const std::vector<RunResult>& results,
                                                     const ScenarioConfig& config) {
  std::filesystem::create_directories(dir);
  std::vector<std::filesystem::path> written;
  const bool single = results.size() == 1;
  for (const auto& res : results) {
    const auto name = single ? std::string("run.csv")
                             : "run_" + std::string(to_string(res.log.strategy)) + ".csv";
    auto f = open_out(dir / name);
    write_run_csv(f, res.log);
    written.push_back(dir / name);
  }
  {
    auto f = open_out(dir / "metrics.json");
    f << metrics_json(results, config);
    written.push_back(dir / "metrics.json");
  }

  std::vector<Series> path, vel, omega, err, alarm;
  if (!results.empty()) {
    const auto& log0 = results.front().log;
    Series ref{"reference", "#888888", {}, {}};
    for (const auto& r : log0.rows) {
      ref.x.push_back(r.z_d(0));
      ref.y.push_back(r.z_d(1));
    }
    path.push_back(ref);
    vel.push_back(column(log0, "true v (" + std::string(to_string(log0.strategy)) + ")", "#000000",
                         [](const LogRow& r) { return r.truth(1); }));
  }
  for (std::size_t k = 0; k < results.size(); ++k) {
    const auto& log = results[k].log;
    const char* c = kColors[k % 6];
    const std::string tag(to_string(log.strategy));
    Series p{tag, c, {}, {}};
    for (const auto& r : log.rows) {
      p.x.push_back(r.pose(0));
      p.y.push_back(r.pose(1));
    }
    path.push_back(p);
    vel.push_back(column(log, "v_hat " + tag, c, [](const LogRow& r) { return r.estimate(1); }));
    omega.push_back(column(log, "omega_hat - omega " + tag, c,
                           [](const LogRow& r) { return r.estimate(2) - r.truth(2); }));
    err.push_back(column(log, tag, c, [](const LogRow& r) { return r.position_error; }));
    alarm.push_back(column(log, tag, c, [k](const LogRow& r) { return r.monitor_unsafe ? 1.0 + 0.05 * k : 0.05 * k; }));
  }
  const std::pair<std::string, std::string> plots[] = {
      {"path.svg", svg_chart("Path", "x [m]", "y [m]", path, true)},
      {"velocity.svg", svg_chart("Linear velocity", "t [s]", "v [m/s]", vel)},
      {"omega.svg", svg_chart("Angular velocity estimation error", "t [s]", "[rad/s]", omega)},
      {"tracking_error.svg", svg_chart("Tracking error", "t [s]", "|z - z_d| [m]", err)},
      {"monitor.svg", svg_chart("Monitor alarm", "t [s]", "unsafe", alarm)},
  };
  for (const auto& [name, body] : plots) {
    auto f = open_out(dir / name);
    f << body;
    written.push_back(dir / name);
  }
  return written;
}

void write_prune_csv(std::ostream& out, const std::vector<double>& etas,
                     const std::vector<PruneMcResult>& results) {
  out << "eta,l_eta,trials,exclusion_rate,oracle_exclusion_rate,retained_attacked_total,distinct_retained\n";
  for (std::size_t i = 0; i < results.size(); ++i) {
    const auto& r = results[i];
    out << format_double(etas[i]) << ',' << r.l_eta << ',' << r.trials.size() << ','
        << format_double(r.exclusion_rate()) << ',' << format_double(r.oracle_exclusion_rate()) << ','
        << r.retained_total() << ',' << r.distinct_retained() << '\n';
  }
}

}  // namespace rpo
