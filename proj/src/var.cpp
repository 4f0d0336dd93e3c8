#include "rebound/var.hpp"

#include <cmath>
#include <numbers>

#include "rebound/distributions.hpp"
#include "rebound/errors.hpp"

namespace rebound {

namespace {

// Design row at time t: [1?, y_{t-1}', ..., y_{t-p}'].
void fill_design_row(const Eigen::MatrixXd& data, const VarSpec& spec, int t,
                     Eigen::MatrixXd& X, int row) {
  int c = 0;
  if (spec.intercept) X(row, c++) = 1.0;
  for (int lag = 1; lag <= spec.p; ++lag) {
    for (int k = 0; k < spec.K; ++k) X(row, c++) = data(t - lag, k);
  }
}

}  // namespace

VarEstimate ols_var_fit_matrix(const Eigen::MatrixXd& data, const VarSpec& spec, int t0) {
  const int T = static_cast<int>(data.rows());
  const int K = spec.K;
  if (static_cast<int>(data.cols()) != K) throw estimation_error("ols_var_fit: K mismatch");
  const int start = t0 < 0 ? spec.p : t0;
  if (start < spec.p) throw estimation_error("ols_var_fit: t0 smaller than lag order");
  const int n = T - start;
  const int m = spec.coeffs_per_eq();
  if (n <= m) {
    throw estimation_error("ols_var_fit: " + std::to_string(n) +
                           " observations cannot identify " + std::to_string(m) +
                           " coefficients per equation");
  }

  Eigen::MatrixXd X(n, m);
  Eigen::MatrixXd Y(n, K);
  for (int i = 0; i < n; ++i) {
    fill_design_row(data, spec, start + i, X, i);
    Y.row(i) = data.row(start + i);
  }

  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(X);
  qr.setThreshold(1e-10);
  if (qr.rank() < m) {
    throw estimation_error("ols_var_fit: singular regressor cross-product");
  }
  const Eigen::MatrixXd B = qr.solve(Y);  // m x K
  const Eigen::MatrixXd resid = Y - X * B;
  Eigen::MatrixXd omega = resid.transpose() * resid / static_cast<double>(n);
  omega = 0.5 * (omega + omega.transpose());

  VarEstimate est;
  est.spec = spec;
  est.t_effective = n;
  est.intercept = Eigen::VectorXd::Zero(K);
  int c = 0;
  if (spec.intercept) {
    est.intercept = B.row(0).transpose();
    c = 1;
  }
  est.lag_coeffs.reserve(static_cast<size_t>(spec.p));
  for (int lag = 1; lag <= spec.p; ++lag) {
    est.lag_coeffs.push_back(B.middleRows(c, K).transpose());  // K x K
    c += K;
  }

  est.resid_cov = omega;
  Eigen::LLT<Eigen::MatrixXd> llt(omega);
  if (llt.info() == Eigen::Success) {
    const double logdet =
        llt.matrixL().toDenseMatrix().diagonal().array().log().sum() * 2.0;
    est.log_likelihood = -0.5 * n * (K * std::log(2.0 * std::numbers::pi) + logdet + K);
  } else {
    est.log_likelihood = -std::numeric_limits<double>::infinity();
  }
  return est;
}

VarEstimate ols_var_fit(const Dataset& data, const VarSpec& spec) {
  if (data.T() <= spec.K * spec.p + 1 + spec.K) {
    throw estimation_error("ols_var_fit: sample too short for K=" + std::to_string(spec.K) +
                           ", p=" + std::to_string(spec.p));
  }
  return ols_var_fit_matrix(data.matrix(), spec, -1);
}

LagSelection select_lag(const Dataset& data, int p_max, bool intercept) {
  if (p_max < 1) throw estimation_error("select_lag: p_max must be >= 1");
  LagSelection sel;
  double best_aic = std::numeric_limits<double>::infinity();
  double best_bic = std::numeric_limits<double>::infinity();
  const int K = data.K();
  for (int p = 1; p <= p_max; ++p) {
    VarSpec spec{K, p, intercept};
    const VarEstimate est = ols_var_fit_matrix(data.matrix(), spec, p_max);
    const double T = static_cast<double>(est.t_effective);
    const double m = static_cast<double>(K * spec.coeffs_per_eq());
    Eigen::LLT<Eigen::MatrixXd> llt(est.resid_cov);
    if (llt.info() != Eigen::Success) {
      throw estimation_error("select_lag: residual covariance not positive definite at p=" +
                             std::to_string(p));
    }
    const double logdet =
        llt.matrixL().toDenseMatrix().diagonal().array().log().sum() * 2.0;
    const double aic = logdet + 2.0 * m / T;
    const double bic = logdet + m * std::log(T) / T;
    sel.table.push_back({p, aic, bic});
    if (aic < best_aic) {
      best_aic = aic;
      sel.p_aic = p;
    }
    if (bic < best_bic) {
      best_bic = bic;
      sel.p_bic = p;
    }
  }
  return sel;
}

ImpactMatrix cholesky_impact(const Eigen::MatrixXd& cov) {
  if (cov.rows() != cov.cols()) throw estimation_error("cholesky_impact: non-square input");
  if ((cov - cov.transpose()).cwiseAbs().maxCoeff() > 1e-10 * (1.0 + cov.cwiseAbs().maxCoeff())) {
    throw estimation_error("cholesky_impact: input not symmetric");
  }
  Eigen::LLT<Eigen::MatrixXd> llt(0.5 * (cov + cov.transpose()));
  if (llt.info() != Eigen::Success) {
    throw estimation_error("cholesky_impact: covariance not positive definite");
  }
  ImpactMatrix out{llt.matrixL()};
  if ((out.L.diagonal().array() <= 0.0).any()) {
    throw estimation_error("cholesky_impact: covariance not positive definite");
  }
  return out;
}

Eigen::MatrixXd irf_constant(const VarEstimate& est, const ImpactMatrix& impact, int horizon,
                             const ShockSpec& shock) {
  const int K = est.spec.K;
  const int p = est.spec.p;
  if (horizon < 0) throw estimation_error("irf: horizon must be >= 0");
  if (shock.variable < 1 || shock.variable > K) {
    throw estimation_error("irf: shock variable index out of range");
  }
  Eigen::MatrixXd resp(K, horizon + 1);
  resp.col(0) = shock.sign * shock.size * impact.L.col(shock.variable - 1);
  for (int h = 1; h <= horizon; ++h) {
    Eigen::VectorXd r = Eigen::VectorXd::Zero(K);
    for (int i = 1; i <= std::min(h, p); ++i) {
      r += est.lag_coeffs[static_cast<size_t>(i - 1)] * resp.col(h - i);
    }
    resp.col(h) = r;
  }
  return resp;
}

Eigen::MatrixXd companion_matrix(const std::vector<Eigen::MatrixXd>& lag_coeffs) {
  const int p = static_cast<int>(lag_coeffs.size());
  const int K = static_cast<int>(lag_coeffs.front().rows());
  Eigen::MatrixXd c = Eigen::MatrixXd::Zero(K * p, K * p);
  for (int i = 0; i < p; ++i) c.block(0, i * K, K, K) = lag_coeffs[static_cast<size_t>(i)];
  if (p > 1) {
    c.block(K, 0, K * (p - 1), K * (p - 1)) =
        Eigen::MatrixXd::Identity(K * (p - 1), K * (p - 1));
  }
  return c;
}

double spectral_radius(const Eigen::MatrixXd& m) {
  return m.eigenvalues().cwiseAbs().maxCoeff();
}

Dataset simulate_var_with_impact(const std::vector<Eigen::MatrixXd>& lag_coeffs,
                                 const Eigen::VectorXd& intercept, const Eigen::MatrixXd& impact,
                                 int T, std::uint64_t seed, bool allow_unstable, Period start) {
  const int K = static_cast<int>(impact.rows());
  const int p = static_cast<int>(lag_coeffs.size());
  if (!allow_unstable && spectral_radius(companion_matrix(lag_coeffs)) >= 1.0) {
    throw estimation_error("simulate_var: unstable parameters (companion spectral radius >= 1)");
  }
  constexpr int kBurnIn = 200;
  Rng rng(seed);
  Eigen::MatrixXd path = Eigen::MatrixXd::Zero(kBurnIn + T + p, K);
  for (int t = p; t < kBurnIn + T + p; ++t) {
    Eigen::VectorXd y = intercept + impact * std_normal_vec(K, rng);
    for (int i = 1; i <= p; ++i) {
      y += lag_coeffs[static_cast<size_t>(i - 1)] * path.row(t - i).transpose();
    }
    path.row(t) = y.transpose();
  }
  return Dataset::from_matrix(path.bottomRows(T), start);
}

Dataset simulate_var(const VarEstimate& params, int T, std::uint64_t seed, bool allow_unstable,
                     Period start) {
  const ImpactMatrix impact = cholesky_impact(params.resid_cov);
  return simulate_var_with_impact(params.lag_coeffs, params.intercept, impact.L, T, seed,
                                  allow_unstable, start);
}

}  // namespace rebound
