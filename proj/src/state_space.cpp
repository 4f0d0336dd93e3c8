#include "rebound/state_space.hpp"

#include <cmath>
#include <numbers>

#include "rebound/errors.hpp"

namespace rebound {

namespace {

Eigen::MatrixXd symmetrized(const Eigen::MatrixXd& m) { return 0.5 * (m + m.transpose()); }

// G = P (P+Q)^-1; jitters once if the predicted covariance is numerically
// singular.
Eigen::MatrixXd backward_gain(const Eigen::MatrixXd& P, const Eigen::MatrixXd& Q) {
  const Eigen::MatrixXd P_pred = symmetrized(P + Q);
  Eigen::LLT<Eigen::MatrixXd> llt(P_pred);
  if (llt.info() != Eigen::Success) {
    const double jitter = 1e-12 * (1.0 + P_pred.trace() / P_pred.rows());
    llt.compute(P_pred + jitter * Eigen::MatrixXd::Identity(P_pred.rows(), P_pred.cols()));
    if (llt.info() != Eigen::Success) {
      throw estimation_error("kalman: filtered covariance not positive definite");
    }
  }
  return llt.solve(P).transpose();
}

}  // namespace

void StateSpaceModel::validate() const {
  if (obs_matrix.empty()) throw estimation_error("state space: no observations");
  if (obs_cov.size() != obs_matrix.size()) {
    throw estimation_error("state space: obs_cov length mismatch");
  }
  const int n = state_dim();
  const int k = obs_dim();
  for (size_t t = 0; t < obs_matrix.size(); ++t) {
    if (obs_matrix[t].rows() != k || obs_matrix[t].cols() != n || obs_cov[t].rows() != k ||
        obs_cov[t].cols() != k) {
      throw estimation_error("state space: inconsistent dimensions at t=" + std::to_string(t + 1));
    }
  }
  if (state_cov.rows() != n || state_cov.cols() != n || init_cov.rows() != n ||
      init_cov.cols() != n) {
    throw estimation_error("state space: state covariance dimension mismatch");
  }
}

CarterKohnSampler::CarterKohnSampler(const StateSpaceModel& model, const Eigen::MatrixXd& obs) {
  model.validate();
  T_ = model.T();
  n_ = model.state_dim();
  if (static_cast<int>(obs.rows()) != T_ || static_cast<int>(obs.cols()) != model.obs_dim()) {
    throw estimation_error("kalman: observation matrix shape does not match model");
  }

  filt_mean_.reserve(static_cast<size_t>(T_));
  std::vector<Eigen::MatrixXd> filt_cov;
  filt_cov.reserve(static_cast<size_t>(T_));

  Eigen::VectorXd m = model.init_mean;
  Eigen::MatrixXd P = symmetrized(model.init_cov);
  const double log2pi = std::log(2.0 * std::numbers::pi);

  for (int t = 0; t < T_; ++t) {
    const Eigen::MatrixXd& Z = model.obs_matrix[static_cast<size_t>(t)];
    const Eigen::MatrixXd P_pred = symmetrized(P + model.state_cov);
    const Eigen::MatrixXd PZt = P_pred * Z.transpose();
    const Eigen::MatrixXd F = symmetrized(Z * PZt + model.obs_cov[static_cast<size_t>(t)]);
    Eigen::LLT<Eigen::MatrixXd> llt(F);
    if (llt.info() != Eigen::Success) {
      throw estimation_error("kalman: innovation covariance not positive definite at t=" +
                             std::to_string(t + 1));
    }
    const Eigen::VectorXd v = obs.row(t).transpose() - Z * m;
    const Eigen::VectorXd Finv_v = llt.solve(v);
    const double logdet = llt.matrixL().toDenseMatrix().diagonal().array().log().sum() * 2.0;
    loglik_ += -0.5 * (Z.rows() * log2pi + logdet + v.dot(Finv_v));

    const Eigen::MatrixXd gain = llt.solve(PZt.transpose()).transpose();  // P_pred Z' F^-1
    m += gain * v;
    P = symmetrized(P_pred - gain * PZt.transpose());
    filt_mean_.push_back(m);
    filt_cov.push_back(P);
  }

  // Draw-independent backward quantities.
  gain_.resize(static_cast<size_t>(T_ > 0 ? T_ - 1 : 0));
  cond_transform_.resize(static_cast<size_t>(T_ > 0 ? T_ - 1 : 0));
  for (int t = 0; t < T_ - 1; ++t) {
    const Eigen::MatrixXd& Pt = filt_cov[static_cast<size_t>(t)];
    const Eigen::MatrixXd G = backward_gain(Pt, model.state_cov);
    gain_[static_cast<size_t>(t)] = G;
    cond_transform_[static_cast<size_t>(t)] = covariance_transform(symmetrized(Pt - G * Pt));
  }
  last_transform_ = covariance_transform(filt_cov.back());
}

Eigen::MatrixXd CarterKohnSampler::draw(Rng& rng) const {
  Eigen::MatrixXd path(T_, n_);
  path.row(T_ - 1) =
      (filt_mean_.back() + last_transform_ * std_normal_vec(n_, rng)).transpose();
  for (int t = T_ - 2; t >= 0; --t) {
    const Eigen::VectorXd& m = filt_mean_[static_cast<size_t>(t)];
    const Eigen::VectorXd mean =
        m + gain_[static_cast<size_t>(t)] * (path.row(t + 1).transpose() - m);
    path.row(t) =
        (mean + cond_transform_[static_cast<size_t>(t)] * std_normal_vec(n_, rng)).transpose();
  }
  return path;
}

Eigen::MatrixXd CarterKohnSampler::smoothed_means() const {
  Eigen::MatrixXd sm(T_, n_);
  sm.row(T_ - 1) = filt_mean_.back().transpose();
  for (int t = T_ - 2; t >= 0; --t) {
    const Eigen::VectorXd& m = filt_mean_[static_cast<size_t>(t)];
    sm.row(t) =
        (m + gain_[static_cast<size_t>(t)] * (sm.row(t + 1).transpose() - m)).transpose();
  }
  return sm;
}

double kalman_loglik(const StateSpaceModel& model, const Eigen::MatrixXd& obs) {
  return CarterKohnSampler(model, obs).loglik();
}

Eigen::MatrixXd rts_smoothed_means(const StateSpaceModel& model, const Eigen::MatrixXd& obs) {
  return CarterKohnSampler(model, obs).smoothed_means();
}

Eigen::MatrixXd carter_kohn_draw(const StateSpaceModel& model, const Eigen::MatrixXd& obs,
                                 Rng& rng) {
  return CarterKohnSampler(model, obs).draw(rng);
}

}  // namespace rebound
