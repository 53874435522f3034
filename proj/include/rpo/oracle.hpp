#pragma once

#include <vector>

#include "rpo/rng.hpp"
#include "rpo/types.hpp"

namespace rpo {

/// Per-channel agreement (true-positive) rates p and confidences s.
struct OracleStats {
  VectorXd p;
  VectorXd s;

  static OracleStats uniform(int channels, double p, double s);
  void validate() const;
};

/// q_hat(i) = 1 when the oracle believes channel i is safe.
struct OracleReport {
  VectorXi q_hat;
  VectorXd s;

  std::vector<int> safe_set() const;
};

/// q(i) = 1 iff i is not attacked.
VectorXi safe_indicator(const std::vector<int>& attacked_support, int channels);

/// Draw eps_i ~ Bernoulli(p_i); report q_i where eps_i = 1 and 1 - q_i otherwise.
OracleReport simulate(const VectorXi& q, const OracleStats& stats, Rng& rng);

}  // namespace rpo
