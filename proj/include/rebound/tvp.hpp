#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <vector>

#include "rebound/errors.hpp"
#include "rebound/state_space.hpp"
#include "rebound/var.hpp"

namespace rebound {

/// A recoverable single-sweep failure (stationarity rejection budget
/// exhausted); the Gibbs driver retries the sweep with fresh randomness and
/// aborts after 10 consecutive failures.
struct sweep_error : estimation_error {
  using estimation_error::estimation_error;
};

/// Prior tightness of the random-walk innovation covariances.
struct TvpScales {
  double k_q = 0.01;
  double k_s = 0.1;
  double k_w = 0.01;
};

/// Priors calibrated on a training window: state initial conditions from a
/// constant-VAR fit, inverse-Wishart scales proportional to the squared
/// tightness constants times the training covariances.
struct TvpPriors {
  int train_length = 40;  // tau

  Eigen::VectorXd beta0_mean;
  Eigen::MatrixXd beta0_cov;
  Eigen::VectorXd alpha0_mean;   // stacked by equation: (2,1), (3,1), (3,2), ...
  Eigen::MatrixXd alpha0_cov;    // block diagonal by equation
  Eigen::VectorXd logvol0_mean;  // K
  Eigen::MatrixXd logvol0_cov;

  Eigen::MatrixXd q_prior_scale;
  double q_prior_dof = 0.0;
  std::vector<Eigen::MatrixXd> s_prior_scale;  // one block per equation 2..K
  std::vector<double> s_prior_dof;
  Eigen::MatrixXd w_prior_scale;
  double w_prior_dof = 0.0;
};

TvpPriors init_priors(const Dataset& data, const VarSpec& spec, int tau,
                      const TvpScales& scales = {});

struct McmcSettings {
  int n_draws = 55000;
  int burn_in = 5000;
  int thin = 10;
  std::uint64_t seed = 0;
  bool stationarity_rejection = true;
  int max_rejections = 100;

  int retained() const { return (n_draws - burn_in) / thin; }
  void validate() const;
};

struct TvpDraw {
  Eigen::MatrixXd beta;    // T_est x n_beta
  Eigen::MatrixXd alpha;   // T_est x n_alpha
  Eigen::MatrixXd logvol;  // T_est x K
  Eigen::MatrixXd q;       // n_beta x n_beta
  Eigen::MatrixXd s;       // n_alpha x n_alpha, block diagonal
  Eigen::MatrixXd w;       // K x K
};

struct TvpPosterior {
  VarSpec spec;
  Period est_start;  // period of the first estimation-sample observation
  int t_est = 0;
  std::vector<TvpDraw> draws;
};

/// Coefficient-row layout: per equation [intercept?, A_1 row, ..., A_p row],
/// equations stacked. These helpers are the single source of truth for it.
std::vector<Eigen::MatrixXd> beta_row_lag_coeffs(const Eigen::VectorXd& beta_row,
                                                 const VarSpec& spec);
Eigen::VectorXd beta_row_intercept(const Eigen::VectorXd& beta_row, const VarSpec& spec);

/// Unit-lower-triangular B_t from a stacked alpha row.
Eigen::MatrixXd build_unit_lower(const Eigen::VectorXd& alpha_row, int K);

/// Lagged design matrix rows t0..T-1 of `data`: [1?, y_{t-1}', ..., y_{t-p}'].
Eigen::MatrixXd lag_design(const Eigen::MatrixXd& data, const VarSpec& spec, int t0);

/// Coefficient-path draw given volatilities and contemporaneous relations.
/// With stationarity rejection on, redraws the whole path while any per-t
/// companion spectral radius is >= 1; exhausting the budget fails the sweep.
Eigen::MatrixXd draw_beta(const Eigen::MatrixXd& Y, const Eigen::MatrixXd& X,
                          const Eigen::MatrixXd& alpha_path, const Eigen::MatrixXd& logvol_path,
                          const Eigen::MatrixXd& q, const TvpPriors& priors, const VarSpec& spec,
                          bool stationarity_rejection, int max_rejections, Rng& rng);

/// Contemporaneous-relation paths drawn equation by equation (rows of B_t
/// evolve independently; earlier-ordered residuals act as regressors).
Eigen::MatrixXd draw_alpha(const Eigen::MatrixXd& resid, const Eigen::MatrixXd& logvol_path,
                           const std::vector<Eigen::MatrixXd>& s_blocks, const TvpPriors& priors,
                           Rng& rng);

struct SigmaDraw {
  Eigen::MatrixXd logvol;       // T_est x K
  Eigen::MatrixXi indicators;   // T_est x K, mixture components in 1..7
};

/// Log-volatility step: square-and-log transform of the orthogonalized
/// residuals, auxiliary-mixture state-space draw given the incoming
/// indicators, then indicators refreshed conditionally on the new path
/// (the corrected sweep ordering).
SigmaDraw draw_sigma(const Eigen::MatrixXd& orth_resid, const Eigen::MatrixXd& w,
                     const TvpPriors& priors, const Eigen::MatrixXi& indicators, Rng& rng);

/// Indicator draw alone, exposed for initialization before the first sweep.
Eigen::MatrixXi draw_mixture_indicators(const Eigen::MatrixXd& ystar,
                                        const Eigen::MatrixXd& logvol_path, Rng& rng);

struct HyperDraw {
  Eigen::MatrixXd q;
  std::vector<Eigen::MatrixXd> s_blocks;
  Eigen::MatrixXd w;
};

/// Inverse-Wishart updates from the state-path increments; S blockwise.
HyperDraw draw_hyper(const Eigen::MatrixXd& beta_path, const Eigen::MatrixXd& alpha_path,
                     const Eigen::MatrixXd& logvol_path, const TvpPriors& priors, Rng& rng);

using ProgressSink = std::function<void(int done, int total)>;

/// Full Gibbs run. The estimation sample is everything after the training
/// window; sweep order is beta, alpha, volatilities+indicators,
/// hyperparameters. Deterministic given the seed.
TvpPosterior gibbs_run(const Dataset& data, const VarSpec& spec, const TvpPriors& priors,
                       const McmcSettings& settings, const ProgressSink& progress = {});

/// Offset used in the squared-residual log transform.
inline constexpr double kLogVolOffset = 0.001;

/// Mixture approximation of a log chi-square(1) innovation: component
/// probabilities, means (before the -1.2704 recentering), and variances.
struct LogChi2Mixture {
  static constexpr int kComponents = 7;
  static const double probability[kComponents];
  static const double mean[kComponents];
  static const double variance[kComponents];
  static constexpr double kMeanShift = 1.2704;
};

}  // namespace rebound
