#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "rebound/time_series.hpp"

namespace rebound {

struct VarSpec {
  int K = 1;
  int p = 1;
  bool intercept = true;

  int coeffs_per_eq() const { return K * p + (intercept ? 1 : 0); }
  int n_beta() const { return K * coeffs_per_eq(); }
  int n_alpha() const { return K * (K - 1) / 2; }
};

struct VarEstimate {
  VarSpec spec;
  std::vector<Eigen::MatrixXd> lag_coeffs;  // A_1..A_p, each K x K
  Eigen::VectorXd intercept;                // zero vector when disabled
  Eigen::MatrixXd resid_cov;                // Omega, symmetric PSD
  double log_likelihood = 0.0;
  int t_effective = 0;
};

/// Equation-by-equation least squares on p lags (optionally a constant);
/// Omega = residual cross-product / (T - p).
VarEstimate ols_var_fit(const Dataset& data, const VarSpec& spec);

/// Same fit on a raw T x K matrix; `t0` discards extra leading observations
/// so candidate lag orders can share a common sample.
VarEstimate ols_var_fit_matrix(const Eigen::MatrixXd& data, const VarSpec& spec, int t0 = -1);

struct LagSelection {
  struct Row {
    int p;
    double aic;
    double bic;
  };
  int p_aic = 1;
  int p_bic = 1;
  std::vector<Row> table;
};

/// AIC/BIC over p = 1..p_max, every candidate evaluated on the common sample
/// implied by p_max.
LagSelection select_lag(const Dataset& data, int p_max, bool intercept = true);

/// Lower-triangular factor with positive diagonal; L L^T = cov.
struct ImpactMatrix {
  Eigen::MatrixXd L;
};

ImpactMatrix cholesky_impact(const Eigen::MatrixXd& cov);

/// Structural shock: 1-based variable index, sign, size in standard
/// deviations. Defaults encode a negative one-SD shock to the second
/// variable (energy use in the (y, e, pr) ordering).
struct ShockSpec {
  int variable = 2;
  double sign = -1.0;
  double size = 1.0;
};

/// Moving-average responses, K x (H+1): column h is the response h periods
/// after impact. Intercepts play no role.
Eigen::MatrixXd irf_constant(const VarEstimate& est, const ImpactMatrix& impact, int horizon,
                             const ShockSpec& shock);

/// Companion form of the lag polynomial (Kp x Kp).
Eigen::MatrixXd companion_matrix(const std::vector<Eigen::MatrixXd>& lag_coeffs);

double spectral_radius(const Eigen::MatrixXd& m);

/// Gaussian simulation with a 200-observation burn-in. Parameters must be
/// stable unless `allow_unstable`.
Dataset simulate_var(const VarEstimate& params, int T, std::uint64_t seed,
                     bool allow_unstable = false,
                     Period start = Period{2000, 1, Frequency::monthly});

/// Simulation from an explicit impact factor (L with L L^T = Omega). Used
/// where the caller already owns the factorization.
Dataset simulate_var_with_impact(const std::vector<Eigen::MatrixXd>& lag_coeffs,
                                 const Eigen::VectorXd& intercept, const Eigen::MatrixXd& impact,
                                 int T, std::uint64_t seed, bool allow_unstable = false,
                                 Period start = Period{2000, 1, Frequency::monthly});

}  // namespace rebound
