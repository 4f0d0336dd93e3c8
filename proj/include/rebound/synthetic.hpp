#pragma once

#include <Eigen/Dense>
#include <cstdint>

#include "rebound/state_space.hpp"
#include "rebound/tvp.hpp"

namespace rebound {

/// Generative spec for a full TVP-SV system with known parameter paths.
/// Any innovation covariance may be exactly zero, in which case the
/// corresponding path is constant (and the generator consumes no randomness
/// for it). With all three zero the model degenerates to a constant VAR and
/// the generator delegates to simulate_var.
struct SyntheticSpec {
  int K = 3;
  int p = 2;
  int T = 200;
  bool intercept = true;
  Eigen::VectorXd beta0;    // n_beta
  Eigen::VectorXd alpha0;   // n_alpha
  Eigen::VectorXd logvol0;  // K
  Eigen::MatrixXd q;        // n_beta x n_beta
  Eigen::MatrixXd s;        // n_alpha x n_alpha
  Eigen::MatrixXd w;        // K x K
  std::uint64_t seed = 0;
  bool reject_explosive = true;
  Period start = Period{2000, 1, Frequency::monthly};

  VarSpec var_spec() const { return VarSpec{K, p, intercept}; }
  void validate() const;
};

/// A stable default parameterization to build test DGPs from.
SyntheticSpec default_synthetic_spec(int K, int p, int T, std::uint64_t seed);

struct TvpTruth {
  Eigen::MatrixXd beta;    // T x n_beta
  Eigen::MatrixXd alpha;   // T x n_alpha
  Eigen::MatrixXd logvol;  // T x K
};

struct TvpSimulation {
  Dataset data;
  TvpTruth truth;
};

TvpSimulation simulate_tvp(const SyntheticSpec& spec);

/// Local-level model (scalar random-walk state observed in noise) together
/// with generated observations and the exact smoothed means computed by
/// dense joint-Gaussian algebra -- an oracle independent of the Kalman
/// recursion.
struct LocalLevelOracle {
  StateSpaceModel model;
  Eigen::MatrixXd observations;  // T x 1
  Eigen::VectorXd smoothed_mean;
};

LocalLevelOracle analytic_local_level(double q, double r, int T, std::uint64_t seed = 0,
                                      double init_mean = 0.0, double init_var = 10.0);

/// Dense-algebra smoothed means for given observations (the same routine the
/// oracle uses).
Eigen::VectorXd dense_local_level_smoother(double q, double r, const Eigen::VectorXd& obs,
                                           double init_mean, double init_var);

}  // namespace rebound
