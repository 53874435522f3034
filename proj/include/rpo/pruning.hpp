#pragma once

#include <vector>

#include "rpo/oracle.hpp"

namespace rpo {

/// r(k) = Pr(sum eps = k), k = 0..m, for independent eps_i ~ Bernoulli(p_i).
VectorXd poisson_binomial_pmf(const VectorXd& p);

/// Largest k with Pr(sum eps >= k) >= eta; 0 when no k >= 1 qualifies.
/// Throws std::invalid_argument unless 0 < eta < 1.
int reliable_count(const VectorXd& pmf, double eta);

struct PrunedSupport {
  std::vector<int> indices;  // ascending channel indices
  double eta = 0.0;
  int l_eta = 0;

  bool empty() const { return indices.empty(); }
};

/// Intersect the oracle's safe set with the l_eta channels of highest p_i * s_i
/// (descending, ties to the lower index). An empty result means no trusted channel survives.
PrunedSupport prune(const OracleReport& report, const VectorXd& p, int l_eta, double eta = 0.0);

}  // namespace rpo
