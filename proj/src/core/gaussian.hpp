#pragma once

#include <Eigen/Dense>

#include "core/util.hpp"

namespace digmm {

// Lower-triangular Cholesky factor L with L*L^T = covariance + jitter*I.
//
// The input must be square and symmetric to within 1e-12 relative tolerance.
// If factorization fails at the requested jitter, the jitter is escalated
// geometrically (x10 per attempt) up to a cap of 1e-3 times the mean
// diagonal; only then does the call fail with not_positive_definite.
Eigen::MatrixXd cholesky_factor(const Eigen::MatrixXd& covariance,
                                double jitter = 0.0);

// One multivariate normal component, stored with its Cholesky factor so that
// densities never form an explicit inverse or determinant.  log_norm_const
// caches -(d/2)*log(2*pi) - 0.5*log det(covariance).
struct GaussianComponent {
  Eigen::VectorXd mean;
  Eigen::MatrixXd covariance;  // symmetric positive definite (post-jitter)
  Eigen::MatrixXd chol;        // lower triangular, chol*chol^T == covariance
  double log_norm_const = 0.0;

  // Validates symmetry/positive-definiteness and derives chol and
  // log_norm_const.  When jitter escalation was needed, the stored
  // covariance is the effective (jittered) matrix, so the reconstruction
  // invariant chol*chol^T == covariance holds exactly up to rounding.
  static GaussianComponent make(Eigen::VectorXd mean,
                                const Eigen::MatrixXd& covariance,
                                double jitter = 0.0);

  int dim() const { return static_cast<int>(mean.size()); }

  // Squared Mahalanobis distance ||L^{-1}(x - mean)||^2 via forward
  // substitution.
  double mahalanobis_sq(const Eigen::VectorXd& x) const;

  // Log density.  Finite input never yields NaN; extreme inputs underflow
  // cleanly to -inf.
  double log_pdf(const Eigen::VectorXd& x) const;

  // `count` independent draws (one per row), deterministic for a given rng
  // state: x = mean + chol * z with z standard normal.
  Eigen::MatrixXd sample(int count, Rng& rng) const;
};

}  // namespace digmm
