#include "core/detector.hpp"

#include <cmath>

#include "core/feature_map.hpp"
#include "core/util.hpp"

namespace digmm {

namespace {

FitMetadata em_metadata(const EmConfig& config, const EmTrace& trace) {
  FitMetadata md;
  md.seed = config.seed;
  md.final_log_likelihood =
      trace.log_likelihoods.empty() ? 0.0 : trace.log_likelihoods.back();
  md.em_iterations = trace.iterations;
  md.em_converged = trace.converged;
  md.restart_index = trace.restart_index;
  return md;
}

}  // namespace

void DigmmModel::validate() const {
  gmm.validate();
  require(nu > 0.0 && nu <= 1.0, errc::invariant_violation,
          "nu must lie in (0, 1]");
  const int n = static_cast<int>(alphas.size());
  require(n >= 1, errc::invariant_violation, "model must carry dual weights");
  require(all_finite(alphas), errc::invariant_violation,
          "dual weights must be finite");
  const double box = 1.0 / (nu * n);
  require((alphas.array() >= 0.0).all() &&
              (alphas.array() <= box * (1.0 + 1e-12)).all(),
          errc::invariant_violation, "dual weights must respect the box");
  require(std::abs(alphas.sum() - 1.0) <= 1e-8, errc::invariant_violation,
          "dual weights must sum to one");
  require(weight_vector.size() == gmm.component_count(),
          errc::invariant_violation,
          "weight vector length must equal the component count");
  require(all_finite(weight_vector) && std::isfinite(rho),
          errc::invariant_violation, "boundary parameters must be finite");
  for (int i : support_idx) {
    require(i >= 0 && i < n, errc::invariant_violation,
            "support index out of range");
  }
  for (int i : margin_idx) {
    require(i >= 0 && i < n, errc::invariant_violation,
            "margin index out of range");
  }
}

void ThresholdGmmModel::validate() const {
  gmm.validate();
  require(std::isfinite(log_threshold), errc::invariant_violation,
          "log threshold must be finite");
}

DigmmModel fit_digmm(const Dataset& data, const DigmmFitConfig& config) {
  const int n = data.rows();
  require(config.nu > 0.0 && config.nu <= 1.0, errc::invalid_argument,
          "nu must lie in (0, 1]");
  require(config.nu * n >= 1.0, errc::infeasible,
          "nu * n must be >= 1; use a larger nu or more training points");

  auto [params, trace] = fit_em(data, config.components, config.em);

  const Eigen::MatrixXd features = feature_matrix(params, data.points);
  std::vector<FeatureVector> rows;
  rows.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    rows.push_back(FeatureVector{features.row(i).transpose()});
  }
  const OcsvmProblem problem =
      OcsvmProblem::make(gram_matrix(rows), config.nu);
  OcsvmSolution sol =
      solve_dual(problem, config.solver_tol, config.solver_max_passes);
  sol.weight_vector = recover_weight_vector(sol.alphas, rows);

  DigmmModel model;
  model.gmm = std::move(params);
  model.nu = config.nu;
  model.alphas = std::move(sol.alphas);
  model.weight_vector = std::move(sol.weight_vector);
  model.rho = sol.rho;
  model.support_idx = std::move(sol.support_idx);
  model.margin_idx = std::move(sol.margin_idx);
  model.metadata = em_metadata(config.em, trace);
  model.metadata.solver_converged = sol.converged;
  model.metadata.solver_passes = sol.passes;
  model.metadata.solver_violation = sol.final_violation;
  model.metadata.solver_objective = sol.objective_value;
  model.validate();
  return model;
}

double decision_value(const DigmmModel& model, const Eigen::VectorXd& x) {
  const FeatureVector p = feature_vector(model.gmm, x);
  return model.weight_vector.dot(p.values) - model.rho;
}

Verdict classify(const DigmmModel& model, const Eigen::VectorXd& x) {
  return decision_value(model, x) > 0.0 ? Verdict::normal : Verdict::anomalous;
}

double log_threshold_for_target_fpr(const GmmParams& params,
                                    const Eigen::MatrixXd& data,
                                    double target_fpr) {
  require(target_fpr > 0.0 && target_fpr < 1.0, errc::invalid_argument,
          "target_fpr must lie in (0, 1)");
  require(data.rows() >= 1, errc::too_few_samples,
          "threshold selection needs at least one point");
  std::vector<double> logs(static_cast<std::size_t>(data.rows()));
  for (int i = 0; i < data.rows(); ++i) {
    logs[static_cast<std::size_t>(i)] =
        mixture_log_pdf(params, data.row(i).transpose());
  }
  return quantile(std::move(logs), target_fpr);
}

ThresholdGmmModel fit_threshold_gmm(const Dataset& data,
                                    const ThresholdFitConfig& config) {
  auto [params, trace] = fit_em(data, config.components, config.em);
  ThresholdGmmModel model;
  model.log_threshold =
      log_threshold_for_target_fpr(params, data.points, config.target_fpr);
  model.gmm = std::move(params);
  model.metadata = em_metadata(config.em, trace);
  model.validate();
  return model;
}

ThresholdGmmModel fit_threshold_gmm(const Dataset& data, int components,
                                    const EmConfig& em, double log_threshold) {
  auto [params, trace] = fit_em(data, components, em);
  ThresholdGmmModel model;
  model.log_threshold = log_threshold;
  model.gmm = std::move(params);
  model.metadata = em_metadata(em, trace);
  model.validate();
  return model;
}

double decision_value(const ThresholdGmmModel& model,
                      const Eigen::VectorXd& x) {
  return mixture_log_pdf(model.gmm, x) - model.log_threshold;
}

Verdict classify(const ThresholdGmmModel& model, const Eigen::VectorXd& x) {
  return decision_value(model, x) > 0.0 ? Verdict::normal : Verdict::anomalous;
}

}  // namespace digmm
