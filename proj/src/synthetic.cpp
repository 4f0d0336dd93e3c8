#include "rebound/synthetic.hpp"

#include <cmath>

#include "rebound/errors.hpp"

namespace rebound {

namespace {

bool is_zero(const Eigen::MatrixXd& m) { return m.size() == 0 || m.isZero(0.0); }

}  // namespace

void SyntheticSpec::validate() const {
  const VarSpec vs = var_spec();
  if (K < 1 || p < 1 || T < 1) throw estimation_error("synthetic: K, p, T must be positive");
  if (beta0.size() != vs.n_beta() || alpha0.size() != vs.n_alpha() || logvol0.size() != K) {
    throw estimation_error("synthetic: initial state dimensions inconsistent with (K, p)");
  }
  if (q.rows() != vs.n_beta() || q.cols() != vs.n_beta() || s.rows() != vs.n_alpha() ||
      s.cols() != vs.n_alpha() || w.rows() != K || w.cols() != K) {
    throw estimation_error("synthetic: innovation covariance dimensions inconsistent");
  }
}

SyntheticSpec default_synthetic_spec(int K, int p, int T, std::uint64_t seed) {
  SyntheticSpec spec;
  spec.K = K;
  spec.p = p;
  spec.T = T;
  spec.seed = seed;
  const VarSpec vs = spec.var_spec();
  const int m = vs.coeffs_per_eq();
  spec.beta0 = Eigen::VectorXd::Zero(vs.n_beta());
  // Own first lag 0.5, cross lags 0.1, higher lags decaying.
  for (int i = 0; i < K; ++i) {
    for (int lag = 0; lag < p; ++lag) {
      for (int k = 0; k < K; ++k) {
        const double own = (i == k) ? 0.5 : 0.1;
        spec.beta0(i * m + (spec.intercept ? 1 : 0) + lag * K + k) =
            own / static_cast<double>((lag + 1) * (lag + 1));
      }
    }
  }
  spec.alpha0 = Eigen::VectorXd::Constant(vs.n_alpha(), 0.3);
  spec.logvol0 = Eigen::VectorXd::Constant(K, std::log(0.5));
  spec.q = Eigen::MatrixXd::Zero(vs.n_beta(), vs.n_beta());
  spec.s = Eigen::MatrixXd::Zero(vs.n_alpha(), vs.n_alpha());
  spec.w = Eigen::MatrixXd::Zero(K, K);
  return spec;
}

TvpSimulation simulate_tvp(const SyntheticSpec& spec) {
  spec.validate();
  const VarSpec vs = spec.var_spec();
  const int T = spec.T;
  const int K = spec.K;

  TvpTruth truth;
  truth.beta = spec.beta0.transpose().replicate(T, 1);
  truth.alpha = spec.alpha0.transpose().replicate(T, 1);
  truth.logvol = spec.logvol0.transpose().replicate(T, 1);

  if (is_zero(spec.q) && is_zero(spec.s) && is_zero(spec.w)) {
    // Degenerate constant-parameter case: delegate so the output matches
    // simulate_var draw for draw.
    VarEstimate est;
    est.spec = vs;
    est.lag_coeffs = beta_row_lag_coeffs(spec.beta0, vs);
    est.intercept = beta_row_intercept(spec.beta0, vs);
    const Eigen::MatrixXd b = build_unit_lower(spec.alpha0, K);
    const Eigen::MatrixXd impact =
        b.triangularView<Eigen::Lower>().solve(Eigen::MatrixXd::Identity(K, K)) *
        spec.logvol0.array().exp().matrix().asDiagonal();
    Eigen::MatrixXd omega = impact * impact.transpose();
    est.resid_cov = 0.5 * (omega + omega.transpose());
    est.t_effective = T;
    return TvpSimulation{
        simulate_var(est, T, spec.seed, !spec.reject_explosive, spec.start), truth};
  }

  Rng rng(spec.seed);
  const Eigen::MatrixXd q_l = is_zero(spec.q) ? Eigen::MatrixXd() : covariance_transform(spec.q);
  const Eigen::MatrixXd s_l = is_zero(spec.s) ? Eigen::MatrixXd() : covariance_transform(spec.s);
  const Eigen::MatrixXd w_l = is_zero(spec.w) ? Eigen::MatrixXd() : covariance_transform(spec.w);

  // Random-walk truths first, then observations; zero-covariance components
  // consume no randomness so degenerate blocks stay exactly constant.
  constexpr int kRedrawBudget = 50;
  for (int t = 1; t < T; ++t) {
    if (q_l.size() > 0) {
      bool accepted = false;
      for (int attempt = 0; attempt < kRedrawBudget; ++attempt) {
        const Eigen::VectorXd cand =
            truth.beta.row(t - 1).transpose() + q_l * std_normal_vec(vs.n_beta(), rng);
        if (!spec.reject_explosive ||
            spectral_radius(companion_matrix(beta_row_lag_coeffs(cand, vs))) < 1.0) {
          truth.beta.row(t) = cand.transpose();
          accepted = true;
          break;
        }
      }
      if (!accepted) {
        throw estimation_error("simulate_tvp: persistent explosiveness at t=" +
                               std::to_string(t + 1) + " (redraw budget exhausted)");
      }
    }
    if (s_l.size() > 0) {
      truth.alpha.row(t) =
          truth.alpha.row(t - 1) + (s_l * std_normal_vec(vs.n_alpha(), rng)).transpose();
    }
    if (w_l.size() > 0) {
      truth.logvol.row(t) =
          truth.logvol.row(t - 1) + (w_l * std_normal_vec(K, rng)).transpose();
    }
  }

  // Observations: burn-in with the initial parameters, then the recorded
  // sample with the evolving ones.
  constexpr int kBurnIn = 200;
  const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(K, K);
  Eigen::MatrixXd path = Eigen::MatrixXd::Zero(kBurnIn + T + spec.p, K);
  for (int t = spec.p; t < kBurnIn + T + spec.p; ++t) {
    const int rec = t - kBurnIn - spec.p;  // recorded index, negative in burn-in
    const int tt = std::max(rec, 0);
    const auto coeffs = beta_row_lag_coeffs(truth.beta.row(tt).transpose(), vs);
    const Eigen::VectorXd c = beta_row_intercept(truth.beta.row(tt).transpose(), vs);
    const Eigen::MatrixXd b = build_unit_lower(truth.alpha.row(tt).transpose(), K);
    const Eigen::MatrixXd impact =
        b.triangularView<Eigen::Lower>().solve(eye) *
        truth.logvol.row(tt).transpose().array().exp().matrix().asDiagonal();
    Eigen::VectorXd y = c + impact * std_normal_vec(K, rng);
    for (int i = 1; i <= spec.p; ++i) {
      y += coeffs[static_cast<size_t>(i - 1)] * path.row(t - i).transpose();
    }
    path.row(t) = y.transpose();
  }
  return TvpSimulation{Dataset::from_matrix(path.bottomRows(T), spec.start), truth};
}

Eigen::VectorXd dense_local_level_smoother(double q, double r, const Eigen::VectorXd& obs,
                                           double init_mean, double init_var) {
  const int T = static_cast<int>(obs.size());
  // Cov(x_s, x_t) = P0 + q*min(s,t), states indexed 1..T; y = x + noise.
  Eigen::MatrixXd cxx(T, T);
  for (int i = 0; i < T; ++i) {
    for (int j = 0; j < T; ++j) {
      cxx(i, j) = init_var + q * static_cast<double>(std::min(i, j) + 1);
    }
  }
  Eigen::MatrixXd cyy = cxx + r * Eigen::MatrixXd::Identity(T, T);
  const Eigen::VectorXd centered = obs - Eigen::VectorXd::Constant(T, init_mean);
  return Eigen::VectorXd::Constant(T, init_mean) + cxx * cyy.ldlt().solve(centered);
}

LocalLevelOracle analytic_local_level(double q, double r, int T, std::uint64_t seed,
                                      double init_mean, double init_var) {
  if (q < 0.0 || !(r > 0.0) || T < 1) {
    throw estimation_error("analytic_local_level: need q >= 0, r > 0, T >= 1");
  }
  LocalLevelOracle out;
  out.model.obs_matrix.assign(static_cast<size_t>(T), Eigen::MatrixXd::Ones(1, 1));
  out.model.obs_cov.assign(static_cast<size_t>(T),
                           Eigen::MatrixXd::Constant(1, 1, r));
  out.model.state_cov = Eigen::MatrixXd::Constant(1, 1, q);
  out.model.init_mean = Eigen::VectorXd::Constant(1, init_mean);
  out.model.init_cov = Eigen::MatrixXd::Constant(1, 1, init_var);

  Rng rng(seed);
  Eigen::MatrixXd y(T, 1);
  double x = init_mean + std::sqrt(init_var) * std_normal(rng);
  for (int t = 0; t < T; ++t) {
    x += std::sqrt(q) * std_normal(rng);
    y(t, 0) = x + std::sqrt(r) * std_normal(rng);
  }
  out.observations = y;
  out.smoothed_mean = dense_local_level_smoother(q, r, y.col(0), init_mean, init_var);
  return out;
}

}  // namespace rebound
