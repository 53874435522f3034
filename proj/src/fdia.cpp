#include "rpo/fdia.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "rpo/errors.hpp"
#include "rpo/measurement.hpp"

namespace rpo {

namespace {

constexpr double kRankTol = 1e-10;
constexpr double kNullTol = 1e-9;
constexpr double kRegularization = 1e-12;

MatrixXd select_rows(const MatrixXd& m, const std::vector<int>& rows) {
  MatrixXd out(static_cast<Eigen::Index>(rows.size()), m.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) out.row(static_cast<Eigen::Index>(i)) = m.row(rows[i]);
  return out;
}

void canonical_sign(VectorXd& v) {
  Eigen::Index idx = 0;
  v.cwiseAbs().maxCoeff(&idx);
  if (v(idx) < 0.0) v = -v;
}

}  // namespace

std::string_view to_string(AttackBranch branch) {
  switch (branch) {
    case AttackBranch::none: return "none";
    case AttackBranch::null_space: return "null_space";
    case AttackBranch::generalized_eigen: return "generalized_eigen";
  }
  return "?";
}

Linearization linearize(const Vec3& x0, const RobotParams& p, double ts) {
  if (!(ts > 0.0)) throw std::invalid_argument("linearize: sample time must be > 0");
  const double v0 = x0(1), w0 = x0(2);
  const double inertia = p.mass * p.offset * p.offset + p.inertia;

  Mat3 jac = Mat3::Zero();
  jac(0, 2) = 1.0;
  jac(1, 2) = 2.0 * p.offset * w0;
  jac(2, 1) = -p.mass * p.offset * w0 / inertia;
  jac(2, 2) = -p.mass * p.offset * v0 / inertia;

  Linearization lin;
  lin.a = Mat3::Identity() + ts * jac;
  lin.b.setZero();
  lin.b.bottomRows<2>() = ts * mass_matrix(p).inverse() * input_matrix(p);
  lin.c = measurement_jacobian(x0, p);
  return lin;
}

LinearizedModel stack(const Linearization& lin, int horizon, double ts) {
  if (horizon < 0) throw std::invalid_argument("stack: horizon must be >= 0");
  const int ny = static_cast<int>(lin.c.rows());
  const int nx = static_cast<int>(lin.a.rows());
  const int nu = static_cast<int>(lin.b.cols());

  LinearizedModel model;
  model.a = lin.a;
  model.b = lin.b;
  model.c = lin.c;
  model.sample_time = ts;
  model.horizon = horizon;
  model.h.resize((horizon + 1) * ny, nx);
  model.g = MatrixXd::Zero((horizon + 1) * ny, horizon * nu);

  // markov[j] = C A^j
  std::vector<MatrixXd> markov;
  MatrixXd ca = lin.c;
  for (int j = 0; j <= horizon; ++j) {
    model.h.middleRows(j * ny, ny) = ca;
    markov.push_back(ca);
    ca = ca * lin.a;
  }
  for (int row = 1; row <= horizon; ++row) {
    for (int col = 0; col < row; ++col) {
      model.g.block(row * ny, col * nu, ny, nu) = ts * markov[row - 1 - col] * lin.b;
    }
  }
  return model;
}

SvdSplit svd_split(const MatrixXd& h) {
  const Eigen::Index m = h.rows();
  const Eigen::Index n = h.cols();
  if (m < n) throw RankDeficientError("svd_split: H has fewer rows than columns");
  Eigen::JacobiSVD<MatrixXd> svd(h, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const VectorXd& sv = svd.singularValues();
  if (sv(n - 1) <= kRankTol) {
    throw RankDeficientError("svd_split: H is rank deficient (sigma_min = " + std::to_string(sv(n - 1)) + ")");
  }
  SvdSplit split;
  split.u1 = svd.matrixU().leftCols(n);
  split.u2 = svd.matrixU().rightCols(m - n);
  split.singular_values = sv;
  split.vt = svd.matrixV().transpose();
  return split;
}

AttackResult generate_attack(const SvdSplit& split, const AttackConfig& config) {
  const Eigen::Index m = split.u1.rows();
  if (!(config.alpha >= 0.0)) throw std::invalid_argument("generate_attack: alpha must be >= 0");
  if (!(config.gamma > 0.0) || !std::isfinite(config.gamma)) {
    throw std::invalid_argument("generate_attack: gamma must be finite and > 0");
  }
  for (int r : config.support) {
    if (r < 0 || r >= m) throw std::out_of_range("generate_attack: support index out of range");
  }

  AttackResult result;
  result.e = VectorXd::Zero(m);
  if (config.support.empty()) return result;

  const MatrixXd u1t = select_rows(split.u1, config.support);
  const MatrixXd u2t = select_rows(split.u2, config.support);
  const Eigen::Index t = u1t.rows();
  const MatrixXd a = u1t * u1t.transpose();
  const MatrixXd b = u2t * u2t.transpose();

  VectorXd local;

  // Null space of U2_T^T: attack directions with zero residual.
  {
    Eigen::JacobiSVD<MatrixXd> svd(u2t.transpose(), Eigen::ComputeFullV);
    const VectorXd& sv = svd.singularValues();
    Eigen::Index rank = 0;
    for (Eigen::Index i = 0; i < sv.size(); ++i) {
      if (sv(i) > kNullTol) ++rank;
    }
    const Eigen::Index nullity = t - rank;
    if (nullity > 0) {
      const MatrixXd basis = svd.matrixV().rightCols(nullity);
      Eigen::SelfAdjointEigenSolver<MatrixXd> eig(basis.transpose() * a * basis);
      VectorXd dir = basis * eig.eigenvectors().col(nullity - 1);
      const double energy = dir.dot(a * dir) / dir.squaredNorm();
      if (energy > kNullTol) {
        local = dir.normalized() * config.gamma;
        result.branch = AttackBranch::null_space;
      }
    }
  }

  if (result.branch == AttackBranch::none) {
    const MatrixXd b_reg = b + kRegularization * MatrixXd::Identity(t, t);
    Eigen::GeneralizedSelfAdjointEigenSolver<MatrixXd> geig(a, b_reg);
    const VectorXd dir = geig.eigenvectors().col(t - 1);
    const double lambda = geig.eigenvalues()(t - 1);
    const double residual_unit = dir.dot(b * dir);
    if (!(lambda > kNullTol) || !(residual_unit > 0.0) || config.alpha == 0.0) return result;
    local = dir * std::sqrt(config.alpha / residual_unit);
    const double norm = local.norm();
    if (norm > config.gamma) local *= config.gamma / norm;
    result.branch = AttackBranch::generalized_eigen;
  }

  canonical_sign(local);
  for (std::size_t i = 0; i < config.support.size(); ++i) {
    result.e(config.support[i]) = local(static_cast<Eigen::Index>(i));
  }
  result.objective = (split.u1.transpose() * result.e).squaredNorm();
  result.residual = (split.u2.transpose() * result.e).squaredNorm();
  return result;
}

VectorXd state_shift(const SvdSplit& split, const VectorXd& e) {
  const VectorXd coeff = (split.u1.transpose() * e).cwiseQuotient(split.singular_values);
  return split.vt.transpose() * coeff;
}

std::vector<int> stacked_support(const std::vector<int>& channels, int horizon, int channel_count) {
  std::vector<int> rows;
  for (int j = 0; j <= horizon; ++j) {
    for (int c : channels) {
      if (c < 0 || c >= channel_count) throw std::out_of_range("stacked_support: channel out of range");
      rows.push_back(j * channel_count + c);
    }
  }
  std::sort(rows.begin(), rows.end());
  return rows;
}

std::vector<int> select_channels(const SvdSplit& split, int count, int horizon, double alpha,
                                 double gamma, int channel_count) {
  if (count <= 0) return {};
  if (count > channel_count) throw std::invalid_argument("select_channels: count exceeds channels");

  const auto objective = [&](const std::vector<int>& channels) {
    return generate_attack(split, {stacked_support(channels, horizon, channel_count), alpha, gamma})
        .objective;
  };
  const auto better = [](double candidate, double best) {
    return candidate > best * (1.0 + 1e-9) + 1e-300;
  };

  // Number of subsets C(channel_count, count); fall back to greedy when it is large.
  double subsets = 1.0;
  for (int i = 0; i < count; ++i) subsets = subsets * (channel_count - i) / (i + 1);

  std::vector<int> best;
  double best_value = -1.0;
  if (subsets <= 5000.0) {
    std::vector<bool> mask(static_cast<std::size_t>(channel_count), false);
    std::fill(mask.begin(), mask.begin() + count, true);
    do {
      std::vector<int> channels;
      for (int i = 0; i < channel_count; ++i) {
        if (mask[static_cast<std::size_t>(i)]) channels.push_back(i);
      }
      const double value = objective(channels);
      if (best.empty() || better(value, best_value)) {
        best = channels;
        best_value = value;
      }
    } while (std::prev_permutation(mask.begin(), mask.end()));
    return best;
  }

  for (int k = 0; k < count; ++k) {
    int pick = -1;
    double pick_value = -1.0;
    for (int c = 0; c < channel_count; ++c) {
      if (std::find(best.begin(), best.end(), c) != best.end()) continue;
      std::vector<int> trial = best;
      trial.push_back(c);
      std::sort(trial.begin(), trial.end());
      const double value = objective(trial);
      if (pick < 0 || better(value, pick_value)) {
        pick = c;
        pick_value = value;
      }
    }
    best.push_back(pick);
    std::sort(best.begin(), best.end());
  }
  return best;
}

ScheduleMode parse_schedule_mode(std::string_view name) {
  if (name == "constant") return ScheduleMode::constant;
  if (name == "ramp") return ScheduleMode::ramp;
  if (name == "recompute") return ScheduleMode::recompute;
  throw ConfigError("unknown attack schedule mode '" + std::string(name) + "'");
}

std::string_view to_string(ScheduleMode mode) {
  switch (mode) {
    case ScheduleMode::constant: return "constant";
    case ScheduleMode::ramp: return "ramp";
    case ScheduleMode::recompute: return "recompute";
  }
  return "?";
}

double attack_envelope(double t, const ScheduleConfig& config) {
  if (t < config.start_time) return 0.0;
  const bool ramped = config.mode == ScheduleMode::ramp ||
                      (config.mode == ScheduleMode::recompute && config.ramp_window > 0.0);
  if (!ramped || config.ramp_window <= 0.0) return 1.0;
  return std::min(1.0, (t - config.start_time) / config.ramp_window);
}

VectorXd attack_schedule(double t, const VectorXd& base_e, const ScheduleConfig& config) {
  return attack_envelope(t, config) * base_e;
}

StealthyAttacker::StealthyAttacker(const RobotParams& params, AttackerSettings settings)
    : params_(params), settings_(std::move(settings)) {
  rows_ = stacked_support(settings_.channels, settings_.horizon);
}

StealthyAttacker::Synthesis StealthyAttacker::synthesize(const Vec3& operating_point) {
  const LinearizedModel model =
      stack(linearize(operating_point, params_, settings_.sample_time), settings_.horizon,
            settings_.sample_time);
  const SvdSplit split = svd_split(model.h);

  double gamma = settings_.gamma;
  if (gamma <= 0.0) {
    const AttackResult unit = generate_attack(split, {rows_, settings_.alpha, 1.0});
    Synthesis out;
    if (unit.branch == AttackBranch::none) return out;
    const double per_unit = state_shift(split, unit.e / unit.e.norm()).norm();
    if (!(per_unit > 0.0)) return out;
    gamma = settings_.target_shift / per_unit;
  }

  AttackResult res = generate_attack(split, {rows_, settings_.alpha, gamma});
  Synthesis out;
  out.branch = res.branch;
  out.gamma = gamma;
  if (res.branch == AttackBranch::none) return out;

  VectorXd shift = state_shift(split, res.e);
  if (last_shift_ && shift.dot(*last_shift_) < 0.0) {
    res.e = -res.e;
    shift = -shift;
  }
  last_shift_ = shift;

  out.stacked = res.e;
  out.head = res.e.head<kChannels>();
  out.shift = shift;
  out.objective = res.objective;
  out.residual = res.residual;
  return out;
}

}  // namespace rpo
