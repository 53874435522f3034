#include "rpo/oracle.hpp"

#include <stdexcept>

#include "rpo/errors.hpp"

namespace rpo {

OracleStats OracleStats::uniform(int channels, double p, double s) {
  OracleStats stats{VectorXd::Constant(channels, p), VectorXd::Constant(channels, s)};
  stats.validate();
  return stats;
}

void OracleStats::validate() const {
  if (p.size() != s.size()) throw ConfigError("oracle: p and s must have equal length");
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    if (!(p(i) >= 0.0 && p(i) <= 1.0)) throw ConfigError("oracle: p must lie in [0, 1]");
    if (!(s(i) >= 0.0 && s(i) <= 1.0)) throw ConfigError("oracle: s must lie in [0, 1]");
  }
}

std::vector<int> OracleReport::safe_set() const {
  std::vector<int> out;
  for (Eigen::Index i = 0; i < q_hat.size(); ++i) {
    if (q_hat(i) == 1) out.push_back(static_cast<int>(i));
  }
  return out;
}

VectorXi safe_indicator(const std::vector<int>& attacked_support, int channels) {
  VectorXi q = VectorXi::Ones(channels);
  for (int i : attacked_support) {
    if (i < 0 || i >= channels) throw std::out_of_range("safe_indicator: index out of range");
    q(i) = 0;
  }
  return q;
}

OracleReport simulate(const VectorXi& q, const OracleStats& stats, Rng& rng) {
  if (q.size() != stats.p.size()) throw std::invalid_argument("oracle: dimension mismatch");
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  OracleReport report;
  report.q_hat.resize(q.size());
  report.s = stats.s;
  for (Eigen::Index i = 0; i < q.size(); ++i) {
    const bool agree = unit(rng) < stats.p(i);
    report.q_hat(i) = agree ? q(i) : 1 - q(i);
  }
  return report;
}

}  // namespace rpo
