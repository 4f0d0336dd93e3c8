#include "rebound/distributions.hpp"

#include <cmath>
#include <numbers>

#include "rebound/errors.hpp"

namespace rebound {

double uniform01(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

double std_normal(Rng& rng) {
  double u1 = uniform01(rng);
  while (u1 <= 0.0) u1 = uniform01(rng);
  const double u2 = uniform01(rng);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

Eigen::VectorXd std_normal_vec(int n, Rng& rng) {
  Eigen::VectorXd z(n);
  for (int i = 0; i < n; ++i) z(i) = std_normal(rng);
  return z;
}

double gamma_draw(double shape, Rng& rng) {
  if (!(shape > 0.0)) throw estimation_error("gamma_draw: shape must be positive");
  if (shape < 1.0) {
    // Boost: G(a) = G(a+1) * U^{1/a}
    const double g = gamma_draw(shape + 1.0, rng);
    double u = uniform01(rng);
    while (u <= 0.0) u = uniform01(rng);
    return g * std::pow(u, 1.0 / shape);
  }
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x, v;
    do {
      x = std_normal(rng);
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    double u = uniform01(rng);
    while (u <= 0.0) u = uniform01(rng);
    if (std::log(u) < 0.5 * x * x + d - d * v + d * std::log(v)) return d * v;
  }
}

double chi_square_draw(double dof, Rng& rng) { return 2.0 * gamma_draw(dof / 2.0, rng); }

Eigen::MatrixXd covariance_transform(const Eigen::MatrixXd& cov) {
  const Eigen::MatrixXd sym = 0.5 * (cov + cov.transpose());
  Eigen::LLT<Eigen::MatrixXd> llt(sym);
  if (llt.info() == Eigen::Success) return llt.matrixL();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sym);
  if (es.info() != Eigen::Success) {
    throw estimation_error("covariance_transform: eigendecomposition failed");
  }
  Eigen::VectorXd d = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return es.eigenvectors() * d.asDiagonal();
}

Eigen::VectorXd sample_mvn(const Eigen::VectorXd& mean, const Eigen::MatrixXd& cov, Rng& rng) {
  return mean + covariance_transform(cov) * std_normal_vec(static_cast<int>(mean.size()), rng);
}

namespace {

// Bartlett factor A: lower triangular, A_ii = sqrt(chi2(dof - i)),
// subdiagonal standard normal. Fixed traversal order for reproducibility.
Eigen::MatrixXd bartlett(double dof, int d, Rng& rng) {
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(d, d);
  for (int i = 0; i < d; ++i) {
    a(i, i) = std::sqrt(chi_square_draw(dof - i, rng));
    for (int j = 0; j < i; ++j) a(i, j) = std_normal(rng);
  }
  return a;
}

}  // namespace

Eigen::MatrixXd sample_wishart(double dof, const Eigen::MatrixXd& scale, Rng& rng) {
  const int d = static_cast<int>(scale.rows());
  if (!(dof > d - 1)) throw estimation_error("sample_wishart: dof too small for dimension");
  Eigen::LLT<Eigen::MatrixXd> llt(0.5 * (scale + scale.transpose()));
  if (llt.info() != Eigen::Success) {
    throw estimation_error("sample_wishart: scale matrix not positive definite");
  }
  const Eigen::MatrixXd la = Eigen::MatrixXd(llt.matrixL()) * bartlett(dof, d, rng);
  return la * la.transpose();
}

Eigen::MatrixXd sample_inverse_wishart(double dof, const Eigen::MatrixXd& scale, Rng& rng) {
  const int d = static_cast<int>(scale.rows());
  if (!(dof > d - 1)) {
    throw estimation_error("sample_inverse_wishart: dof too small for dimension");
  }
  Eigen::LLT<Eigen::MatrixXd> llt(0.5 * (scale + scale.transpose()));
  if (llt.info() != Eigen::Success) {
    throw estimation_error("sample_inverse_wishart: scale matrix not positive definite");
  }
  // X ~ W(dof, scale^-1) gives X^-1 ~ IW(dof, scale); with scale = L L^T and
  // Bartlett factor A, X^-1 = (L A^-T)(L A^-T)^T, so no explicit inversion of
  // the full matrix is needed.
  const Eigen::MatrixXd a = bartlett(dof, d, rng);
  const Eigen::MatrixXd ainv_t =
      a.triangularView<Eigen::Lower>().solve(Eigen::MatrixXd::Identity(d, d)).transpose();
  const Eigen::MatrixXd m = Eigen::MatrixXd(llt.matrixL()) * ainv_t;
  return m * m.transpose();
}

int sample_categorical(const double* weights, int n, Rng& rng) {
  double total = 0.0;
  for (int i = 0; i < n; ++i) total += weights[i];
  if (!(total > 0.0)) throw estimation_error("sample_categorical: non-positive weight total");
  const double u = uniform01(rng) * total;
  double acc = 0.0;
  for (int i = 0; i < n; ++i) {
    acc += weights[i];
    if (u < acc) return i;
  }
  return n - 1;
}

}  // namespace rebound
