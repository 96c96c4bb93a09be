#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "core/dataset.hpp"
#include "core/gmm.hpp"

// Synthetic multi-peaked benchmark generator.  Normal points are drawn from
// a known Gaussian mixture; anomalies are drawn uniformly over an
// axis-aligned box and rejection-resampled until their mixture log-density
// falls below a low quantile of the normal sample's own log-densities, so
// every anomaly is a genuinely low-density point for the generating mixture.

namespace digmm {

struct ClusterSpec {
  double weight = 1.0;
  Eigen::VectorXd mean;
  Eigen::MatrixXd covariance;
};

struct ScenarioSpec {
  std::vector<ClusterSpec> clusters;
  int n_normal = 0;
  int n_anomaly = 0;
  Eigen::VectorXd box_min;  // anomaly-region bounds, one per dimension
  Eigen::VectorXd box_max;
  double density_quantile = 0.001;  // q in the rejection rule
  std::uint64_t seed = 0;

  // Raises invalid_argument unless: at least one cluster with positive
  // weight, consistent dimensions, SPD covariances, box_min < box_max with
  // the box enclosing every cluster mean, counts >= 0 (n_normal >= 1 when
  // anomalies are requested, since the rejection level comes from the
  // normal sample), and density_quantile in (0, 1).
  void validate() const;

  int dim() const { return clusters.empty() ? 0 : static_cast<int>(clusters[0].mean.size()); }

  // The generating mixture with weights normalized to sum to one.
  GmmParams mixture() const;
};

// Labels: 1 = normal (first n_normal rows), 0 = anomalous.  Deterministic
// given spec.seed.  Raises rejection_stall if the anomaly acceptance rate
// drops below 0.1% over one million uniform draws.
Dataset generate_scenario(const ScenarioSpec& spec);

// Built-in two-cluster configuration: one dense peak and one broad sparse
// cluster (peak-density ratio well above 10), with anomalies concentrated
// in the band of box where a single global density threshold cannot
// separate them from the sparse cluster's own points.
ScenarioSpec paper_like_scenario();

// JSON round-trip for scenario files.  Top-level keys: clusters (list of
// {weight, mean, covariance} with covariance row-major flat), n_normal,
// n_anomaly, box_min, box_max, density_quantile, seed.  Unknown or missing
// keys raise schema_error.
ScenarioSpec scenario_from_json(const std::string& text);
std::string scenario_to_json(const ScenarioSpec& spec);

}  // namespace digmm
