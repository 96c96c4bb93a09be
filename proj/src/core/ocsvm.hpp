#pragma once

#include <Eigen/Dense>
#include <span>
#include <vector>

#include "core/feature_map.hpp"

namespace digmm {

// Dual of the linear one-class problem over mapped training points:
//
//   minimize    (1/2) a^T G a
//   subject to  0 <= a_i <= 1/(nu*n),   sum_i a_i = 1
//
// where G holds the pairwise feature inner products.  The feasible set is
// nonempty exactly when nu*n >= 1.
struct OcsvmProblem {
  Eigen::MatrixXd gram;  // n x n, symmetric PSD
  double nu = 0.5;       // in (0, 1]
  int n = 0;

  static OcsvmProblem make(Eigen::MatrixXd gram, double nu);
  void validate() const;
  double box() const { return 1.0 / (nu * n); }
};

struct OcsvmSolution {
  Eigen::VectorXd alphas;
  double rho = 0.0;
  // w* = sum_i alpha_i p(x_i); filled by recover_weight_vector (the gram
  // matrix alone cannot produce it), empty until then.
  Eigen::VectorXd weight_vector;
  std::vector<int> support_idx;  // alpha_i > 0
  std::vector<int> margin_idx;   // alpha_i strictly inside (0, 1/(nu*n))
  double objective_value = 0.0;  // primal objective at (w*, rho*)
  bool converged = true;         // false when the pass budget ran out
  long passes = 0;
  double final_violation = 0.0;
};

// Optional per-update record used by tests to audit feasibility and
// monotonicity after every pairwise step.
struct SolverTrace {
  std::vector<double> dual_objectives;
  std::vector<double> alpha_sums;
  std::vector<double> alpha_mins;
  std::vector<double> alpha_maxs;
};

// Sequential minimal optimization on maximal-violating pairs (ties broken
// toward the lowest index), each step solving the two-variable subproblem
// exactly.  Terminates when the KKT pair violation drops below tol or after
// max_passes pairwise updates (default 10*n*max(100, n)); hitting the budget
// returns the best iterate with converged = false rather than failing.
// Deterministic: identical inputs give bitwise-identical solutions.
OcsvmSolution solve_dual(const OcsvmProblem& problem, double tol = 1e-6,
                         long max_passes = -1, SolverTrace* trace = nullptr);

// Maximum violation over index pairs usable by SMO:
//   max(0, max_{a_k > 0} g_k - min_{a_i < C} g_i),  g = G a.
// Zero at the exact optimum.  `alphas` must be feasible within 1e-8.
double kkt_violation(const OcsvmProblem& problem,
                     const Eigen::VectorXd& alphas);

// Explicit weight vector for a finite-dimensional feature map.
Eigen::VectorXd recover_weight_vector(const Eigen::VectorXd& alphas,
                                      std::span<const FeatureVector> features);

// Objective of the primal problem
//   (1/2)||w||^2 + (1/(nu*n)) sum_i max(rho - <w, p_i>, 0) - rho
// evaluated verbatim at the given (w, rho).
double primal_objective(const Eigen::VectorXd& w, double rho,
                        std::span<const FeatureVector> features, double nu);
double primal_objective(const OcsvmSolution& solution,
                        std::span<const FeatureVector> features, double nu);

}  // namespace digmm
