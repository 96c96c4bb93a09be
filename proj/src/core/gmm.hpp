#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <utility>
#include <vector>

#include "core/dataset.hpp"
#include "core/gaussian.hpp"

namespace digmm {

// Mixture parameters: component list plus a weight vector on the simplex
// (every weight > 0, sum within 1e-12 of 1, all components of equal
// dimension).  Enforced on construction and re-checked when models are
// loaded from disk.
struct GmmParams {
  std::vector<GaussianComponent> components;
  Eigen::VectorXd weights;

  static GmmParams make(std::vector<GaussianComponent> components,
                        Eigen::VectorXd weights);
  void validate() const;

  int component_count() const { return static_cast<int>(components.size()); }
  int dim() const { return components.empty() ? 0 : components[0].dim(); }
};

struct EmConfig {
  int max_iters = 500;
  double rel_tol = 1e-8;
  int n_init = 5;          // independent restarts; best final likelihood wins
  double reg_covar = 1e-6; // ridge scale added as reg*(trace/d)*I per M-step
  std::uint64_t seed = 0;

  void validate() const;
};

// Fit diagnostics for the winning restart.  log_likelihoods holds one entry
// per E-step; the sequence is non-decreasing (within 1e-9 slack) between
// consecutive entries not separated by a component re-seed, whose positions
// are recorded in rescue_iterations.
struct EmTrace {
  std::vector<double> log_likelihoods;
  bool converged = false;
  int iterations = 0;  // number of M-steps executed
  int restart_index = 0;
  std::vector<int> rescue_iterations;
};

// log p(x | params): log-sum-exp over log w_j + component log-densities.
// Never NaN for finite x; underflow of every component yields -inf.
double mixture_log_pdf(const GmmParams& params, const Eigen::VectorXd& x);

// Posterior component memberships for one point, computed in log space.
// When every component underflows the posterior is undefined; the uniform
// vector is returned so EM remains well defined.
Eigen::VectorXd responsibilities(const GmmParams& params,
                                 const Eigen::VectorXd& x);

// Expectation-maximization with k-means++-style mean seeding, covariances
// initialized to the global data covariance, and uniform initial weights.
// Deterministic function of (data, m, config); labels are ignored.
// Convergence: |L_t - L_{t-1}| / (|L_{t-1}| + 1) < rel_tol.
// A component whose weight falls below 1/(10n) is re-seeded at the lowest
// mixture-density point (at most 3 times per restart, then degenerate_data).
std::pair<GmmParams, EmTrace> fit_em(const Dataset& data, int m,
                                     const EmConfig& config);

// Sum of mixture_log_pdf over all rows, in row order; 0 for an empty set.
double log_likelihood(const GmmParams& params, const Dataset& data);

// Bayesian information criterion: k*log(n) - 2*L with
// k = (m-1) + m*d + m*d*(d+1)/2 free parameters.
double bic(const GmmParams& params, const Dataset& data);

}  // namespace digmm
