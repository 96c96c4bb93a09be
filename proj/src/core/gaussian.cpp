#include "core/gaussian.hpp"

#include <cmath>
#include <utility>

namespace digmm {

namespace {

constexpr double kSymTol = 1e-12;
// Escalation floor and cap, both scaled by the mean diagonal entry.
constexpr double kJitterFloorScale = 1e-10;
constexpr double kJitterCapScale = 1e-3;

// Attempts a strict Cholesky factorization; a semi-definite matrix (zero or
// negative pivot) counts as failure so the caller can escalate the jitter.
bool try_llt(const Eigen::MatrixXd& a, Eigen::MatrixXd& out) {
  Eigen::LLT<Eigen::MatrixXd> llt(a);
  if (llt.info() != Eigen::Success) return false;
  Eigen::MatrixXd l = llt.matrixL();
  if ((l.diagonal().array() <= 0.0).any()) return false;
  if (!l.allFinite()) return false;
  out = std::move(l);
  return true;
}

}  // namespace

Eigen::MatrixXd cholesky_factor(const Eigen::MatrixXd& covariance,
                                double jitter) {
  require(covariance.rows() == covariance.cols(), errc::dimension_mismatch,
          "covariance matrix must be square");
  require(covariance.size() > 0, errc::dimension_mismatch,
          "covariance matrix must be non-empty");
  require(jitter >= 0.0, errc::invalid_argument, "jitter must be >= 0");
  require(all_finite(covariance), errc::non_finite_value,
          "covariance matrix must be finite");
  require(relative_asymmetry(covariance) <= kSymTol, errc::non_symmetric,
          "covariance matrix is not symmetric");

  const Eigen::Index d = covariance.rows();
  const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(d, d);

  Eigen::MatrixXd l;
  if (jitter == 0.0) {
    if (try_llt(covariance, l)) return l;
  } else {
    if (try_llt(covariance + jitter * id, l)) return l;
  }

  // Escalate from max(requested, floor) up to the cap, multiplying by 10.
  const double mean_diag = covariance.diagonal().mean();
  const double cap = kJitterCapScale * mean_diag;
  double j = std::max(jitter, kJitterFloorScale * mean_diag);
  while (j > 0.0 && j <= cap) {
    if (try_llt(covariance + j * id, l)) return l;
    j *= 10.0;
  }
  raise(errc::not_positive_definite,
        "covariance matrix is not positive definite (even at the jitter cap)");
}

GaussianComponent GaussianComponent::make(Eigen::VectorXd mean,
                                          const Eigen::MatrixXd& covariance,
                                          double jitter) {
  require(mean.size() > 0, errc::dimension_mismatch, "mean must be non-empty");
  require(covariance.rows() == mean.size() && covariance.cols() == mean.size(),
          errc::dimension_mismatch,
          "covariance shape must match the mean dimension");
  require(mean.allFinite(), errc::non_finite_value, "mean must be finite");

  GaussianComponent c;
  c.chol = cholesky_factor(covariance, jitter);
  // Store the covariance the factor actually represents so that
  // chol*chol^T reconstructs it to rounding regardless of escalation.
  c.covariance = c.chol * c.chol.transpose();
  c.mean = std::move(mean);
  const double d = static_cast<double>(c.mean.size());
  c.log_norm_const = -0.5 * d * std::log(2.0 * M_PI) -
                     c.chol.diagonal().array().log().sum();
  return c;
}

double GaussianComponent::mahalanobis_sq(const Eigen::VectorXd& x) const {
  require(x.size() == mean.size(), errc::dimension_mismatch,
          "point dimension does not match the component dimension");
  const Eigen::VectorXd y =
      chol.triangularView<Eigen::Lower>().solve(x - mean);
  return y.squaredNorm();
}

double GaussianComponent::log_pdf(const Eigen::VectorXd& x) const {
  return log_norm_const - 0.5 * mahalanobis_sq(x);
}

Eigen::MatrixXd GaussianComponent::sample(int count, Rng& rng) const {
  require(count >= 1, errc::invalid_argument, "sample count must be >= 1");
  std::normal_distribution<double> normal(0.0, 1.0);
  const Eigen::Index d = mean.size();
  Eigen::MatrixXd out(count, d);
  Eigen::VectorXd z(d);
  for (int i = 0; i < count; ++i) {
    for (Eigen::Index j = 0; j < d; ++j) z[j] = normal(rng);
    out.row(i) = (mean + chol * z).transpose();
  }
  return out;
}

}  // namespace digmm
