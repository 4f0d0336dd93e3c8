#pragma once

#include <Eigen/Dense>
#include <vector>

#include "rebound/distributions.hpp"

namespace rebound {

/// Linear Gaussian state space with a random-walk (identity-transition)
/// state:
///   x_t = x_{t-1} + w_t,   w_t ~ N(0, Q)
///   y_t = Z_t x_t + v_t,   v_t ~ N(0, H_t)          t = 1..T
/// with x_0 ~ N(init_mean, init_cov) carrying no observation.
struct StateSpaceModel {
  std::vector<Eigen::MatrixXd> obs_matrix;  // Z_t, each k x n
  std::vector<Eigen::MatrixXd> obs_cov;     // H_t, each k x k
  Eigen::MatrixXd state_cov;                // Q, n x n
  Eigen::VectorXd init_mean;
  Eigen::MatrixXd init_cov;

  int T() const { return static_cast<int>(obs_matrix.size()); }
  int state_dim() const { return static_cast<int>(init_mean.size()); }
  int obs_dim() const { return static_cast<int>(obs_matrix.front().rows()); }
  void validate() const;
};

/// Forward filter run once; backward quantities (gains, conditional
/// covariance factors) are draw-independent and precomputed, so repeated
/// sampling passes cost one matrix-vector product and n normals per step.
class CarterKohnSampler {
 public:
  CarterKohnSampler(const StateSpaceModel& model, const Eigen::MatrixXd& obs);

  double loglik() const { return loglik_; }
  /// One exact draw from p(x_1..T | y_1..T), T x n.
  Eigen::MatrixXd draw(Rng& rng) const;
  /// Smoothed means E[x_t | y_1..T], T x n.
  Eigen::MatrixXd smoothed_means() const;

 private:
  int T_ = 0;
  int n_ = 0;
  double loglik_ = 0.0;
  std::vector<Eigen::VectorXd> filt_mean_;
  std::vector<Eigen::MatrixXd> gain_;            // G_t = P_t (P_t + Q)^-1, t < T-1
  std::vector<Eigen::MatrixXd> cond_transform_;  // factor of P_t - G_t P_t
  Eigen::MatrixXd last_transform_;               // factor of P_{T-1|T-1}
};

/// Exact Gaussian log-likelihood by prediction-error decomposition.
/// `obs` is T x k, row t = y_t'.
double kalman_loglik(const StateSpaceModel& model, const Eigen::MatrixXd& obs);

/// Smoothed state means E[x_t | y_1..T], T x n.
Eigen::MatrixXd rts_smoothed_means(const StateSpaceModel& model, const Eigen::MatrixXd& obs);

/// One exact draw from the joint smoothing distribution.
Eigen::MatrixXd carter_kohn_draw(const StateSpaceModel& model, const Eigen::MatrixXd& obs,
                                 Rng& rng);

}  // namespace rebound
