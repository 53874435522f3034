#pragma once

#include <cstdint>
#include <random>

#include "rpo/types.hpp"

namespace rpo {

using Rng = std::mt19937_64;

/// Independent stream for (seed, stream, index); used to give every trial/worker its own RNG.
inline Rng derive_rng(std::uint64_t seed, std::uint64_t stream, std::uint64_t index = 0) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(index),
                    static_cast<std::uint32_t>(index >> 32)};
  return Rng(seq);
}

/// Zero-mean Gaussian sampler for a fixed PSD covariance.
class GaussianSampler {
 public:
  GaussianSampler() = default;
  explicit GaussianSampler(const MatrixXd& cov) {
    Eigen::SelfAdjointEigenSolver<MatrixXd> eig(cov);
    factor_ = eig.eigenvectors() * eig.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal();
  }

  VectorXd operator()(Rng& rng) const {
    std::normal_distribution<double> normal(0.0, 1.0);
    VectorXd n(factor_.cols());
    for (Eigen::Index i = 0; i < n.size(); ++i) n(i) = normal(rng);
    return factor_ * n;
  }

  Eigen::Index dim() const { return factor_.rows(); }

 private:
  MatrixXd factor_;
};

}  // namespace rpo
