// Independent oracles used by the unit and acceptance suites. These
// deliberately avoid the library's solver paths: plain normal equations with
// hand-rolled Gaussian elimination, dense joint-Gaussian algebra instead of
// Kalman recursions, and companion-matrix powers instead of the moving
// average recursion.
#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace oracles {

// Solve A x = b by Gaussian elimination with partial pivoting.
inline Eigen::VectorXd gaussian_solve(Eigen::MatrixXd a, Eigen::VectorXd b) {
  const int n = static_cast<int>(a.rows());
  for (int col = 0; col < n; ++col) {
    int pivot = col;
    for (int r = col + 1; r < n; ++r) {
      if (std::abs(a(r, col)) > std::abs(a(pivot, col))) pivot = r;
    }
    if (a(pivot, col) == 0.0) throw std::runtime_error("oracle: singular system");
    if (pivot != col) {
      a.row(pivot).swap(a.row(col));
      std::swap(b(pivot), b(col));
    }
    for (int r = col + 1; r < n; ++r) {
      const double f = a(r, col) / a(col, col);
      a.row(r).tail(n - col) -= f * a.row(col).tail(n - col);
      b(r) -= f * b(col);
    }
  }
  Eigen::VectorXd x(n);
  for (int r = n - 1; r >= 0; --r) {
    double acc = b(r);
    for (int c = r + 1; c < n; ++c) acc -= a(r, c) * x(c);
    x(r) = acc / a(r, r);
  }
  return x;
}

// Flat least-squares residuals via normal equations.
inline Eigen::VectorXd least_squares_residuals(const Eigen::MatrixXd& X,
                                               const Eigen::VectorXd& y) {
  const Eigen::MatrixXd xtx = X.transpose() * X;
  const Eigen::VectorXd xty = X.transpose() * y;
  const Eigen::VectorXd coef = gaussian_solve(xtx, xty);
  return y - X * coef;
}

// Regression-filter cycle: residual of s_t on a constant and
// (s_{t-h}, ..., s_{t-h-p+1}).
inline std::vector<double> hamilton_cycle(const std::vector<double>& s, int h, int p) {
  const int skip = h + p - 1;
  const int n = static_cast<int>(s.size()) - skip;
  Eigen::MatrixXd X(n, p + 1);
  Eigen::VectorXd y(n);
  for (int i = 0; i < n; ++i) {
    const int t = skip + i;
    y(i) = s[static_cast<size_t>(t)];
    X(i, 0) = 1.0;
    for (int j = 0; j < p; ++j) X(i, j + 1) = s[static_cast<size_t>(t - h - j)];
  }
  const Eigen::VectorXd resid = least_squares_residuals(X, y);
  return std::vector<double>(resid.data(), resid.data() + n);
}

// Dense joint-Gaussian treatment of the identity-transition state space:
// states x_1..x_T stacked have mean 1 (x) m0 and Cov(x_s, x_t) =
// P0 + Q*min(s,t); observations add block-diagonal noise.
struct DenseStateSpace {
  Eigen::VectorXd mean_y;
  Eigen::MatrixXd cov_y;
  Eigen::MatrixXd cov_xy;   // stacked states vs stacked observations
  Eigen::VectorXd mean_x;
};

inline DenseStateSpace dense_joint(const std::vector<Eigen::MatrixXd>& obs_matrix,
                                   const std::vector<Eigen::MatrixXd>& obs_cov,
                                   const Eigen::MatrixXd& state_cov,
                                   const Eigen::VectorXd& init_mean,
                                   const Eigen::MatrixXd& init_cov) {
  const int T = static_cast<int>(obs_matrix.size());
  const int n = static_cast<int>(init_mean.size());
  const int k = static_cast<int>(obs_matrix.front().rows());

  Eigen::MatrixXd cov_xx(T * n, T * n);
  for (int s = 0; s < T; ++s) {
    for (int t = 0; t < T; ++t) {
      cov_xx.block(s * n, t * n, n, n) = init_cov + (std::min(s, t) + 1) * state_cov;
    }
  }
  Eigen::MatrixXd Z = Eigen::MatrixXd::Zero(T * k, T * n);
  Eigen::MatrixXd H = Eigen::MatrixXd::Zero(T * k, T * k);
  for (int t = 0; t < T; ++t) {
    Z.block(t * k, t * n, k, n) = obs_matrix[static_cast<size_t>(t)];
    H.block(t * k, t * k, k, k) = obs_cov[static_cast<size_t>(t)];
  }
  DenseStateSpace out;
  out.mean_x = init_mean.replicate(T, 1);
  out.mean_y = Z * out.mean_x;
  out.cov_y = Z * cov_xx * Z.transpose() + H;
  out.cov_xy = cov_xx * Z.transpose();
  return out;
}

inline double dense_loglik(const DenseStateSpace& d, const Eigen::VectorXd& y_stacked) {
  const int n = static_cast<int>(y_stacked.size());
  const Eigen::VectorXd r = y_stacked - d.mean_y;
  const Eigen::LLT<Eigen::MatrixXd> llt(d.cov_y);
  const double logdet = llt.matrixL().toDenseMatrix().diagonal().array().log().sum() * 2.0;
  return -0.5 * (n * std::log(2.0 * std::numbers::pi) + logdet + r.dot(llt.solve(r)));
}

inline Eigen::VectorXd dense_smoothed_means(const DenseStateSpace& d,
                                            const Eigen::VectorXd& y_stacked) {
  const Eigen::VectorXd r = y_stacked - d.mean_y;
  return d.mean_x + d.cov_xy * Eigen::LLT<Eigen::MatrixXd>(d.cov_y).solve(r);
}

// IRF via companion-matrix powers applied to the stacked impact vector.
inline Eigen::MatrixXd companion_power_irf(const std::vector<Eigen::MatrixXd>& lag_coeffs,
                                           const Eigen::VectorXd& impact_col, int horizon) {
  const int p = static_cast<int>(lag_coeffs.size());
  const int K = static_cast<int>(lag_coeffs.front().rows());
  Eigen::MatrixXd comp = Eigen::MatrixXd::Zero(K * p, K * p);
  for (int i = 0; i < p; ++i) comp.block(0, i * K, K, K) = lag_coeffs[static_cast<size_t>(i)];
  if (p > 1) {
    comp.block(K, 0, K * (p - 1), K * (p - 1)) =
        Eigen::MatrixXd::Identity(K * (p - 1), K * (p - 1));
  }
  Eigen::VectorXd stacked = Eigen::VectorXd::Zero(K * p);
  stacked.head(K) = impact_col;
  Eigen::MatrixXd resp(K, horizon + 1);
  for (int h = 0; h <= horizon; ++h) {
    resp.col(h) = stacked.head(K);
    stacked = comp * stacked;
  }
  return resp;
}

}  // namespace oracles
