#pragma once

#include <Eigen/Dense>

#include "core/dataset.hpp"
#include "core/gmm.hpp"
#include "core/ocsvm.hpp"

// Two anomaly detectors over a shared mixture-model front end.
//
// The boundary detector (DigmmModel) freezes a fitted mixture, maps every
// point to its vector of per-component densities, and trains a one-class
// linear boundary in that feature space.  Its decision value is
// f(x) = <w, p(x)> - rho; points with f(x) > 0 are normal and everything
// else (f(x) <= 0, including the boundary itself) is anomalous.
//
// The threshold detector (ThresholdGmmModel) scores by mixture log-density
// alone: decision value log p(x) - log_threshold, same sign convention.

namespace digmm {

enum class Verdict { normal, anomalous };

inline const char* verdict_name(Verdict v) noexcept {
  return v == Verdict::normal ? "normal" : "anomalous";
}

// Provenance of a fit, carried inside the model so a saved file records how
// it was produced.  solver_* fields are meaningful only for the boundary
// detector and stay at their defaults for the threshold detector.
struct FitMetadata {
  std::uint64_t seed = 0;
  double final_log_likelihood = 0.0;
  int em_iterations = 0;
  bool em_converged = false;
  int restart_index = 0;
  bool solver_converged = false;
  long solver_passes = 0;
  double solver_violation = 0.0;
  double solver_objective = 0.0;
};

struct DigmmModel {
  GmmParams gmm;
  double nu = 0.0;
  Eigen::VectorXd alphas;         // dual coefficients, one per training point
  Eigen::VectorXd weight_vector;  // w = sum_i alpha_i p(x_i), length m
  double rho = 0.0;
  std::vector<int> support_idx;  // alpha_i > 0
  std::vector<int> margin_idx;   // alpha_i strictly inside the box
  FitMetadata metadata;

  // Cheap structural checks (sizes, ranges); raises invariant_violation.
  void validate() const;
};

struct ThresholdGmmModel {
  GmmParams gmm;
  double log_threshold = 0.0;  // must be finite
  FitMetadata metadata;

  void validate() const;
};

struct DigmmFitConfig {
  int components = 1;
  double nu = 0.5;
  EmConfig em;
  double solver_tol = 1e-6;
  long solver_max_passes = -1;  // -1: solver default budget
};

// Fits the mixture by EM, freezes it, builds the density feature map over
// the training points, and solves the one-class dual.  Labels are ignored;
// callers wanting all-normal training filter beforehand.  Errors:
// infeasible when nu * n < 1, plus anything fit_em can raise.
DigmmModel fit_digmm(const Dataset& data, const DigmmFitConfig& config);

double decision_value(const DigmmModel& model, const Eigen::VectorXd& x);
Verdict classify(const DigmmModel& model, const Eigen::VectorXd& x);

struct ThresholdFitConfig {
  int components = 1;
  double target_fpr = 0.001;  // training-set false-positive rate, in (0, 1)
  EmConfig em;
};

// Fits the mixture by EM and places the log-density threshold at the
// target_fpr quantile of the training points' own log-densities, so about
// that fraction of the training set falls at or below the threshold.
ThresholdGmmModel fit_threshold_gmm(const Dataset& data,
                                    const ThresholdFitConfig& config);

// Fits the mixture by EM and stores the caller's log-density threshold,
// which must be finite.
ThresholdGmmModel fit_threshold_gmm(const Dataset& data, int components,
                                    const EmConfig& em, double log_threshold);

// Linearly interpolated quantile of the training log-densities.
double log_threshold_for_target_fpr(const GmmParams& params,
                                    const Eigen::MatrixXd& data,
                                    double target_fpr);

double decision_value(const ThresholdGmmModel& model, const Eigen::VectorXd& x);
Verdict classify(const ThresholdGmmModel& model, const Eigen::VectorXd& x);

}  // namespace digmm
