#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <random>

namespace rebound {

/// Single RNG stream per chain; every sampler consumes from it in a fixed
/// order so runs are reproducible from the seed alone.
using Rng = std::mt19937_64;

/// Uniform on [0, 1) with 53 random bits.
double uniform01(Rng& rng);

/// Standard normal via Box-Muller (stateless; draw count per call is fixed).
double std_normal(Rng& rng);

Eigen::VectorXd std_normal_vec(int n, Rng& rng);

/// Gamma(shape, 1), Marsaglia-Tsang.
double gamma_draw(double shape, Rng& rng);

double chi_square_draw(double dof, Rng& rng);

/// Lower-triangular-ish factor M with M*M^T = cov. Cholesky when PD; falls
/// back to an eigenvalue square root with negatives clamped to zero, so
/// exactly singular covariances (degenerate state noise) sample cleanly.
Eigen::MatrixXd covariance_transform(const Eigen::MatrixXd& cov);

Eigen::VectorXd sample_mvn(const Eigen::VectorXd& mean, const Eigen::MatrixXd& cov, Rng& rng);

/// Wishart(dof, scale) via Bartlett decomposition; dof may be non-integer.
Eigen::MatrixXd sample_wishart(double dof, const Eigen::MatrixXd& scale, Rng& rng);

/// Inverse-Wishart(dof, scale); returned matrix is symmetric PD.
Eigen::MatrixXd sample_inverse_wishart(double dof, const Eigen::MatrixXd& scale, Rng& rng);

/// Index in [0, n) drawn proportionally to non-negative weights.
int sample_categorical(const double* weights, int n, Rng& rng);

}  // namespace rebound
