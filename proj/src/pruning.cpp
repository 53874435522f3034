#include "rpo/pruning.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace rpo {

VectorXd poisson_binomial_pmf(const VectorXd& p) {
  const Eigen::Index m = p.size();
  VectorXd r = VectorXd::Zero(m + 1);
  r(0) = 1.0;
  // convolve with [1 - p_i, p_i], in place from the top
  for (Eigen::Index i = 0; i < m; ++i) {
    const double pi = p(i);
    if (!(pi >= 0.0 && pi <= 1.0)) throw std::invalid_argument("poisson_binomial_pmf: p outside [0, 1]");
    for (Eigen::Index k = i + 1; k >= 1; --k) r(k) = r(k) * (1.0 - pi) + r(k - 1) * pi;
    r(0) *= 1.0 - pi;
  }
  return r;
}

int reliable_count(const VectorXd& pmf, double eta) {
  if (!(eta > 0.0 && eta < 1.0)) throw std::invalid_argument("reliable_count: eta must be in (0, 1)");
  const Eigen::Index m = pmf.size() - 1;
  // Pr(sum >= k) = 1 - sum_{i<k} r(i)
  double below = 0.0;
  int best = 0;
  for (Eigen::Index k = 1; k <= m; ++k) {
    below += pmf(k - 1);
    if (1.0 - below >= eta) best = static_cast<int>(k);
  }
  return best;
}

PrunedSupport prune(const OracleReport& report, const VectorXd& p, int l_eta, double eta) {
  const Eigen::Index m = p.size();
  if (report.q_hat.size() != m || report.s.size() != m) {
    throw std::invalid_argument("prune: dimension mismatch");
  }
  std::vector<int> order(static_cast<std::size_t>(m));
  std::iota(order.begin(), order.end(), 0);
  const VectorXd score = p.cwiseProduct(report.s);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return score(a) > score(b); });

  PrunedSupport out;
  out.eta = eta;
  out.l_eta = std::clamp(l_eta, 0, static_cast<int>(m));
  for (int i = 0; i < out.l_eta; ++i) {
    const int c = order[static_cast<std::size_t>(i)];
    if (report.q_hat(c) == 1) out.indices.push_back(c);
  }
  std::sort(out.indices.begin(), out.indices.end());
  return out;
}

}  // namespace rpo
