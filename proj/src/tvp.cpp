#include "rebound/tvp.hpp"

#include <cmath>
#include <numbers>

#include "rebound/errors.hpp"

namespace rebound {

const double LogChi2Mixture::probability[LogChi2Mixture::kComponents] = {
    0.00730, 0.10556, 0.00002, 0.04395, 0.34001, 0.24566, 0.25750};
const double LogChi2Mixture::mean[LogChi2Mixture::kComponents] = {
    -10.12999, -3.97281, -8.56686, 2.77786, 0.61942, 1.79518, -1.08819};
const double LogChi2Mixture::variance[LogChi2Mixture::kComponents] = {
    5.79596, 2.61369, 5.17950, 0.16735, 0.64009, 0.34023, 1.26261};

namespace {

constexpr double kVarianceFloor = 1e-12;

Eigen::MatrixXd symmetrized(const Eigen::MatrixXd& m) { return 0.5 * (m + m.transpose()); }

// Per-t standard deviations of the orthogonalized shocks, floored.
Eigen::VectorXd vol_scale(const Eigen::VectorXd& logvol_row) {
  Eigen::VectorXd s(logvol_row.size());
  for (int i = 0; i < logvol_row.size(); ++i) {
    s(i) = std::sqrt(std::max(std::exp(2.0 * logvol_row(i)), kVarianceFloor));
  }
  return s;
}

Eigen::MatrixXd blkdiag(const std::vector<Eigen::MatrixXd>& blocks, int dim) {
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(dim, dim);
  int at = 0;
  for (const auto& b : blocks) {
    out.block(at, at, b.rows(), b.cols()) = b;
    at += static_cast<int>(b.rows());
  }
  return out;
}

}  // namespace

std::vector<Eigen::MatrixXd> beta_row_lag_coeffs(const Eigen::VectorXd& beta_row,
                                                 const VarSpec& spec) {
  const int K = spec.K;
  const int m = spec.coeffs_per_eq();
  const int skip = spec.intercept ? 1 : 0;
  std::vector<Eigen::MatrixXd> coeffs(static_cast<size_t>(spec.p),
                                      Eigen::MatrixXd::Zero(K, K));
  for (int i = 0; i < K; ++i) {
    for (int lag = 0; lag < spec.p; ++lag) {
      for (int k = 0; k < K; ++k) {
        coeffs[static_cast<size_t>(lag)](i, k) = beta_row(i * m + skip + lag * K + k);
      }
    }
  }
  return coeffs;
}

Eigen::VectorXd beta_row_intercept(const Eigen::VectorXd& beta_row, const VarSpec& spec) {
  Eigen::VectorXd c = Eigen::VectorXd::Zero(spec.K);
  if (spec.intercept) {
    const int m = spec.coeffs_per_eq();
    for (int i = 0; i < spec.K; ++i) c(i) = beta_row(i * m);
  }
  return c;
}

Eigen::MatrixXd build_unit_lower(const Eigen::VectorXd& alpha_row, int K) {
  Eigen::MatrixXd b = Eigen::MatrixXd::Identity(K, K);
  int at = 0;
  for (int i = 1; i < K; ++i) {
    for (int j = 0; j < i; ++j) b(i, j) = alpha_row(at++);
  }
  return b;
}

Eigen::MatrixXd lag_design(const Eigen::MatrixXd& data, const VarSpec& spec, int t0) {
  const int T = static_cast<int>(data.rows());
  const int m = spec.coeffs_per_eq();
  if (t0 < spec.p) throw estimation_error("lag_design: t0 smaller than lag order");
  Eigen::MatrixXd X(T - t0, m);
  for (int t = t0; t < T; ++t) {
    int c = 0;
    if (spec.intercept) X(t - t0, c++) = 1.0;
    for (int lag = 1; lag <= spec.p; ++lag) {
      for (int k = 0; k < spec.K; ++k) X(t - t0, c++) = data(t - lag, k);
    }
  }
  return X;
}

void McmcSettings::validate() const {
  if (burn_in < 0 || n_draws <= burn_in) {
    throw config_error("mcmc: need n_draws > burn_in >= 0");
  }
  if (thin < 1) throw config_error("mcmc: thin must be >= 1");
  if (max_rejections < 1) throw config_error("mcmc: max_rejections must be >= 1");
}

TvpPriors init_priors(const Dataset& data, const VarSpec& spec, int tau,
                      const TvpScales& scales) {
  const int K = spec.K;
  const int p = spec.p;
  if (tau < K * p + K + 2) {
    throw estimation_error("init_priors: training window " + std::to_string(tau) +
                           " shorter than K*p + K + 2");
  }
  if (data.T() <= tau + p) {
    throw estimation_error("init_priors: dataset does not extend past the training window");
  }
  if (tau - p <= spec.coeffs_per_eq()) {
    throw estimation_error("init_priors: training window too short to fit the VAR");
  }
  if (!(scales.k_q > 0.0 && scales.k_s > 0.0 && scales.k_w > 0.0)) {
    throw estimation_error("init_priors: tightness scales must be positive");
  }

  const Dataset training = data.head(tau);
  const VarEstimate fit = ols_var_fit(training, spec);
  const int m = spec.coeffs_per_eq();
  const int n_beta = spec.n_beta();
  const int n_alpha = spec.n_alpha();
  const int n_obs = tau - p;

  TvpPriors pr;
  pr.train_length = tau;

  // Coefficient prior: OLS point estimates, 4x the asymptotic covariance.
  pr.beta0_mean.resize(n_beta);
  for (int i = 0; i < K; ++i) {
    int c = i * m;
    if (spec.intercept) pr.beta0_mean(c++) = fit.intercept(i);
    for (int lag = 0; lag < p; ++lag) {
      for (int k = 0; k < K; ++k) {
        pr.beta0_mean(c++) = fit.lag_coeffs[static_cast<size_t>(lag)](i, k);
      }
    }
  }
  const Eigen::MatrixXd X = lag_design(training.matrix(), spec, p);
  const Eigen::MatrixXd xtx = X.transpose() * X;
  Eigen::LLT<Eigen::MatrixXd> xtx_llt(xtx);
  if (xtx_llt.info() != Eigen::Success) {
    throw estimation_error("init_priors: training regressors are collinear");
  }
  const Eigen::MatrixXd xtx_inv = xtx_llt.solve(Eigen::MatrixXd::Identity(m, m));
  Eigen::MatrixXd v_beta(n_beta, n_beta);  // Omega (x) (X'X)^-1, equation-major
  for (int i = 0; i < K; ++i) {
    for (int j = 0; j < K; ++j) {
      v_beta.block(i * m, j * m, m, m) = fit.resid_cov(i, j) * xtx_inv;
    }
  }
  v_beta = symmetrized(v_beta);
  pr.beta0_cov = 4.0 * v_beta;
  pr.q_prior_scale = (scales.k_q * scales.k_q) * static_cast<double>(tau) * v_beta;
  pr.q_prior_dof = std::max(static_cast<double>(tau), static_cast<double>(n_beta + 2));

  // Contemporaneous relations: per-equation triangular regressions on the
  // training residuals give both the prior means and their uncertainty.
  Eigen::MatrixXd resid(n_obs, K);
  {
    Eigen::MatrixXd B(m, K);  // column i = regressor coefficients of equation i
    for (int i = 0; i < K; ++i) {
      int c = 0;
      if (spec.intercept) B(c++, i) = fit.intercept(i);
      for (int lag = 0; lag < p; ++lag) {
        for (int k = 0; k < K; ++k) B(c++, i) = fit.lag_coeffs[static_cast<size_t>(lag)](i, k);
      }
    }
    resid = training.matrix().bottomRows(n_obs) - X * B;
  }

  pr.alpha0_mean = Eigen::VectorXd::Zero(n_alpha);
  pr.alpha0_cov = Eigen::MatrixXd::Zero(n_alpha, n_alpha);
  Eigen::VectorXd ortho_var(K);  // orthogonalized residual variances
  ortho_var(0) = resid.col(0).squaredNorm() / n_obs;
  int at = 0;
  for (int i = 1; i < K; ++i) {
    const Eigen::MatrixXd Z = -resid.leftCols(i);
    const Eigen::VectorXd y = resid.col(i);
    Eigen::LLT<Eigen::MatrixXd> ztz(Eigen::MatrixXd(Z.transpose() * Z));
    if (ztz.info() != Eigen::Success) {
      throw estimation_error("init_priors: degenerate training residuals for equation " +
                             std::to_string(i + 1));
    }
    const Eigen::VectorXd a_hat = ztz.solve(Z.transpose() * y);
    const Eigen::VectorXd e = y - Z * a_hat;
    const double s2 = e.squaredNorm() / std::max(n_obs - i, 1);
    const Eigen::MatrixXd v_a = s2 * ztz.solve(Eigen::MatrixXd::Identity(i, i));
    pr.alpha0_mean.segment(at, i) = a_hat;
    pr.alpha0_cov.block(at, at, i, i) = 4.0 * symmetrized(v_a);
    pr.s_prior_scale.push_back((scales.k_s * scales.k_s) * static_cast<double>(i + 1) *
                               symmetrized(v_a));
    pr.s_prior_dof.push_back(static_cast<double>(i + 1));
    ortho_var(i) = e.squaredNorm() / n_obs;
    at += i;
  }

  pr.logvol0_mean.resize(K);
  for (int i = 0; i < K; ++i) {
    pr.logvol0_mean(i) = 0.5 * std::log(std::max(ortho_var(i), kVarianceFloor));
  }
  pr.logvol0_cov = Eigen::MatrixXd::Identity(K, K);

  pr.w_prior_scale =
      (scales.k_w * scales.k_w) * static_cast<double>(K + 1) * Eigen::MatrixXd::Identity(K, K);
  pr.w_prior_dof = static_cast<double>(K + 1);
  return pr;
}

Eigen::MatrixXd draw_beta(const Eigen::MatrixXd& Y, const Eigen::MatrixXd& X,
                          const Eigen::MatrixXd& alpha_path, const Eigen::MatrixXd& logvol_path,
                          const Eigen::MatrixXd& q, const TvpPriors& priors, const VarSpec& spec,
                          bool stationarity_rejection, int max_rejections, Rng& rng) {
  const int T = static_cast<int>(Y.rows());
  const int K = spec.K;
  const int m = spec.coeffs_per_eq();
  const int n_beta = spec.n_beta();

  StateSpaceModel model;
  model.state_cov = q;
  model.init_mean = priors.beta0_mean;
  model.init_cov = priors.beta0_cov;
  model.obs_matrix.reserve(static_cast<size_t>(T));
  model.obs_cov.reserve(static_cast<size_t>(T));
  const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(K, K);
  for (int t = 0; t < T; ++t) {
    Eigen::MatrixXd Z = Eigen::MatrixXd::Zero(K, n_beta);
    for (int i = 0; i < K; ++i) Z.block(i, i * m, 1, m) = X.row(t);
    model.obs_matrix.push_back(std::move(Z));

    const Eigen::MatrixXd b = build_unit_lower(alpha_path.row(t).transpose(), K);
    const Eigen::MatrixXd b_inv = b.triangularView<Eigen::Lower>().solve(eye);
    const Eigen::MatrixXd impact = b_inv * vol_scale(logvol_path.row(t).transpose()).asDiagonal();
    model.obs_cov.push_back(symmetrized(impact * impact.transpose()));
  }

  const CarterKohnSampler ck(model, Y);
  for (int attempt = 0; attempt < std::max(1, max_rejections); ++attempt) {
    Eigen::MatrixXd path = ck.draw(rng);
    if (!path.allFinite()) {
      throw estimation_error("draw_beta: non-finite coefficient path");
    }
    if (!stationarity_rejection) return path;
    bool stable = true;
    for (int t = 0; t < T && stable; ++t) {
      const auto coeffs = beta_row_lag_coeffs(path.row(t).transpose(), spec);
      stable = spectral_radius(companion_matrix(coeffs)) < 1.0;
    }
    if (stable) return path;
  }
  throw sweep_error("draw_beta: stationarity rejection budget of " +
                    std::to_string(max_rejections) + " draws exhausted");
}

Eigen::MatrixXd draw_alpha(const Eigen::MatrixXd& resid, const Eigen::MatrixXd& logvol_path,
                           const std::vector<Eigen::MatrixXd>& s_blocks, const TvpPriors& priors,
                           Rng& rng) {
  const int T = static_cast<int>(resid.rows());
  const int K = static_cast<int>(resid.cols());
  Eigen::MatrixXd out(T, K * (K - 1) / 2);
  int at = 0;
  for (int i = 1; i < K; ++i) {
    StateSpaceModel model;
    model.state_cov = s_blocks[static_cast<size_t>(i - 1)];
    model.init_mean = priors.alpha0_mean.segment(at, i);
    model.init_cov = priors.alpha0_cov.block(at, at, i, i);
    model.obs_matrix.reserve(static_cast<size_t>(T));
    model.obs_cov.reserve(static_cast<size_t>(T));
    for (int t = 0; t < T; ++t) {
      model.obs_matrix.push_back(-resid.row(t).head(i));
      Eigen::MatrixXd h(1, 1);
      h(0, 0) = std::max(std::exp(2.0 * logvol_path(t, i)), kVarianceFloor);
      model.obs_cov.push_back(std::move(h));
    }
    const CarterKohnSampler ck(model, resid.col(i));
    out.middleCols(at, i) = ck.draw(rng);
    at += i;
  }
  return out;
}

Eigen::MatrixXi draw_mixture_indicators(const Eigen::MatrixXd& ystar,
                                        const Eigen::MatrixXd& logvol_path, Rng& rng) {
  const int T = static_cast<int>(ystar.rows());
  const int K = static_cast<int>(ystar.cols());
  Eigen::MatrixXi s(T, K);
  double w[LogChi2Mixture::kComponents];
  for (int t = 0; t < T; ++t) {
    for (int i = 0; i < K; ++i) {
      for (int j = 0; j < LogChi2Mixture::kComponents; ++j) {
        const double mu =
            2.0 * logvol_path(t, i) + LogChi2Mixture::mean[j] - LogChi2Mixture::kMeanShift;
        const double v2 = LogChi2Mixture::variance[j];
        const double z = ystar(t, i) - mu;
        w[j] = LogChi2Mixture::probability[j] / std::sqrt(v2) * std::exp(-0.5 * z * z / v2);
      }
      s(t, i) = 1 + sample_categorical(w, LogChi2Mixture::kComponents, rng);
    }
  }
  return s;
}

SigmaDraw draw_sigma(const Eigen::MatrixXd& orth_resid, const Eigen::MatrixXd& w,
                     const TvpPriors& priors, const Eigen::MatrixXi& indicators, Rng& rng) {
  const int T = static_cast<int>(orth_resid.rows());
  const int K = static_cast<int>(orth_resid.cols());
  Eigen::MatrixXd ystar(T, K);
  for (int t = 0; t < T; ++t) {
    for (int i = 0; i < K; ++i) {
      ystar(t, i) = std::log(orth_resid(t, i) * orth_resid(t, i) + kLogVolOffset);
    }
  }

  StateSpaceModel model;
  model.state_cov = w;
  model.init_mean = priors.logvol0_mean;
  model.init_cov = priors.logvol0_cov;
  model.obs_matrix.assign(static_cast<size_t>(T), 2.0 * Eigen::MatrixXd::Identity(K, K));
  model.obs_cov.reserve(static_cast<size_t>(T));
  Eigen::MatrixXd adjusted(T, K);
  for (int t = 0; t < T; ++t) {
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(K, K);
    for (int i = 0; i < K; ++i) {
      const int j = indicators(t, i) - 1;
      h(i, i) = LogChi2Mixture::variance[j];
      adjusted(t, i) = ystar(t, i) - (LogChi2Mixture::mean[j] - LogChi2Mixture::kMeanShift);
    }
    model.obs_cov.push_back(std::move(h));
  }

  SigmaDraw out;
  out.logvol = CarterKohnSampler(model, adjusted).draw(rng);
  // Corrected ordering: indicators refreshed conditionally on the new path.
  out.indicators = draw_mixture_indicators(ystar, out.logvol, rng);
  return out;
}

HyperDraw draw_hyper(const Eigen::MatrixXd& beta_path, const Eigen::MatrixXd& alpha_path,
                     const Eigen::MatrixXd& logvol_path, const TvpPriors& priors, Rng& rng) {
  const int T = static_cast<int>(beta_path.rows());
  if (T < 2) throw estimation_error("draw_hyper: need at least two state rows");
  const double dof_add = static_cast<double>(T - 1);

  HyperDraw out;
  {
    Eigen::MatrixXd scale = priors.q_prior_scale;
    for (int t = 0; t + 1 < T; ++t) {
      const Eigen::VectorXd d = (beta_path.row(t + 1) - beta_path.row(t)).transpose();
      scale.noalias() += d * d.transpose();
    }
    out.q = sample_inverse_wishart(priors.q_prior_dof + dof_add, symmetrized(scale), rng);
  }
  int at = 0;
  for (size_t b = 0; b < priors.s_prior_scale.size(); ++b) {
    const int dim = static_cast<int>(priors.s_prior_scale[b].rows());
    Eigen::MatrixXd scale = priors.s_prior_scale[b];
    for (int t = 0; t + 1 < T; ++t) {
      const Eigen::VectorXd d =
          (alpha_path.row(t + 1).segment(at, dim) - alpha_path.row(t).segment(at, dim))
              .transpose();
      scale.noalias() += d * d.transpose();
    }
    out.s_blocks.push_back(
        sample_inverse_wishart(priors.s_prior_dof[b] + dof_add, symmetrized(scale), rng));
    at += dim;
  }
  {
    Eigen::MatrixXd scale = priors.w_prior_scale;
    for (int t = 0; t + 1 < T; ++t) {
      const Eigen::VectorXd d = (logvol_path.row(t + 1) - logvol_path.row(t)).transpose();
      scale.noalias() += d * d.transpose();
    }
    out.w = sample_inverse_wishart(priors.w_prior_dof + dof_add, symmetrized(scale), rng);
  }
  return out;
}

namespace {

// Reduced-form residuals Y_t - X_t beta_t.
Eigen::MatrixXd tvp_residuals(const Eigen::MatrixXd& Y, const Eigen::MatrixXd& X,
                              const Eigen::MatrixXd& beta_path, const VarSpec& spec) {
  const int T = static_cast<int>(Y.rows());
  const int K = spec.K;
  const int m = spec.coeffs_per_eq();
  Eigen::MatrixXd u(T, K);
  for (int t = 0; t < T; ++t) {
    for (int i = 0; i < K; ++i) {
      u(t, i) = Y(t, i) - X.row(t).dot(beta_path.row(t).segment(i * m, m));
    }
  }
  return u;
}

Eigen::MatrixXd orthogonalize(const Eigen::MatrixXd& resid, const Eigen::MatrixXd& alpha_path) {
  const int T = static_cast<int>(resid.rows());
  const int K = static_cast<int>(resid.cols());
  Eigen::MatrixXd e(T, K);
  for (int t = 0; t < T; ++t) {
    const Eigen::MatrixXd b = build_unit_lower(alpha_path.row(t).transpose(), K);
    e.row(t) = (b * resid.row(t).transpose()).transpose();
  }
  return e;
}

}  // namespace

TvpPosterior gibbs_run(const Dataset& data, const VarSpec& spec, const TvpPriors& priors,
                       const McmcSettings& settings, const ProgressSink& progress) {
  settings.validate();
  const int tau = priors.train_length;
  const int p = spec.p;
  if (data.K() != spec.K) throw estimation_error("gibbs: dataset width does not match spec");
  if (data.T() <= tau + p + 10) {
    throw estimation_error("gibbs: dataset length " + std::to_string(data.T()) +
                           " too short for training window " + std::to_string(tau) +
                           " plus " + std::to_string(p + 10) + " observations");
  }

  const int K = spec.K;
  const int n_alpha = spec.n_alpha();
  const Eigen::MatrixXd segment = data.matrix().bottomRows(data.T() - tau);
  const Eigen::MatrixXd X = lag_design(segment, spec, p);
  const Eigen::MatrixXd Y = segment.bottomRows(segment.rows() - p);
  const int T = static_cast<int>(Y.rows());

  Rng rng(settings.seed);

  // Current sweep state, initialized at the prior means.
  Eigen::MatrixXd beta_path = priors.beta0_mean.transpose().replicate(T, 1);
  Eigen::MatrixXd alpha_path = priors.alpha0_mean.transpose().replicate(T, 1);
  Eigen::MatrixXd logvol_path = priors.logvol0_mean.transpose().replicate(T, 1);
  auto prior_mean_iw = [](const Eigen::MatrixXd& scale, double dof) {
    const double denom = std::max(dof - static_cast<double>(scale.rows()) - 1.0, 1.0);
    return Eigen::MatrixXd(scale / denom);
  };
  Eigen::MatrixXd q = prior_mean_iw(priors.q_prior_scale, priors.q_prior_dof);
  std::vector<Eigen::MatrixXd> s_blocks;
  for (size_t b = 0; b < priors.s_prior_scale.size(); ++b) {
    s_blocks.push_back(prior_mean_iw(priors.s_prior_scale[b], priors.s_prior_dof[b]));
  }
  Eigen::MatrixXd w = prior_mean_iw(priors.w_prior_scale, priors.w_prior_dof);

  Eigen::MatrixXi indicators;
  {
    const Eigen::MatrixXd u0 = tvp_residuals(Y, X, beta_path, spec);
    const Eigen::MatrixXd e0 = orthogonalize(u0, alpha_path);
    Eigen::MatrixXd ystar(T, K);
    for (int t = 0; t < T; ++t) {
      for (int i = 0; i < K; ++i) {
        ystar(t, i) = std::log(e0(t, i) * e0(t, i) + kLogVolOffset);
      }
    }
    indicators = draw_mixture_indicators(ystar, logvol_path, rng);
  }

  TvpPosterior post;
  post.spec = spec;
  post.est_start = data.period_at(tau + p);
  post.t_est = T;
  post.draws.reserve(static_cast<size_t>(settings.retained()));

  int consecutive_failures = 0;
  int sweep = 1;
  while (sweep <= settings.n_draws) {
    try {
      beta_path = draw_beta(Y, X, alpha_path, logvol_path, q, priors, spec,
                            settings.stationarity_rejection, settings.max_rejections, rng);
      const Eigen::MatrixXd resid = tvp_residuals(Y, X, beta_path, spec);
      alpha_path = draw_alpha(resid, logvol_path, s_blocks, priors, rng);
      const Eigen::MatrixXd orth = orthogonalize(resid, alpha_path);
      SigmaDraw sd = draw_sigma(orth, w, priors, indicators, rng);
      logvol_path = std::move(sd.logvol);
      indicators = std::move(sd.indicators);
      HyperDraw hd = draw_hyper(beta_path, alpha_path, logvol_path, priors, rng);
      q = std::move(hd.q);
      s_blocks = std::move(hd.s_blocks);
      w = std::move(hd.w);
      consecutive_failures = 0;
    } catch (const sweep_error& e) {
      // Retried with fresh randomness: the stream has already advanced.
      if (++consecutive_failures >= 10) {
        throw estimation_error(std::string("gibbs: aborted after 10 consecutive sweep "
                                           "failures; last: ") +
                               e.what());
      }
      continue;
    }

    if (!alpha_path.allFinite() || !logvol_path.allFinite()) {
      throw estimation_error("gibbs: non-finite state at sweep " + std::to_string(sweep));
    }

    if (sweep > settings.burn_in && (sweep - settings.burn_in) % settings.thin == 0) {
      post.draws.push_back(TvpDraw{beta_path, alpha_path, logvol_path, q,
                                   blkdiag(s_blocks, n_alpha), w});
    }
    if (progress) progress(sweep, settings.n_draws);
    ++sweep;
  }
  return post;
}

}  // namespace rebound
