#pragma once

#include <Eigen/Dense>
#include <span>
#include <vector>

#include "core/gmm.hpp"

namespace digmm {

// Finite-dimensional map sending a point to the vector of component
// densities (p_1(x), ..., p_m(x)).  All entries are nonnegative and entry j
// never exceeds the component's peak density exp(log_norm_const_j), so any
// two mapped points subtend an angle between 0 and 90 degrees and points far
// from every component land at (or exponentially near) the origin.
struct FeatureVector {
  Eigen::VectorXd values;
};

enum class FeatureScaling {
  raw,              // plain component densities (the default)
  peak_normalized,  // entry j divided by p_j(mu_j); every entry then in [0,1]
};

// Component densities of one point.  Underflow to exact 0 is expected and
// documented behavior for points far from a component.
FeatureVector feature_vector(const GmmParams& params, const Eigen::VectorXd& x,
                             FeatureScaling scaling = FeatureScaling::raw);

// Row i = feature_vector(points.row(i)).values; convenience for batch work.
Eigen::MatrixXd feature_matrix(const GmmParams& params,
                               const Eigen::MatrixXd& points,
                               FeatureScaling scaling = FeatureScaling::raw);

// Pairwise inner products G_ik = <p_i, p_k>.  Accumulated in long double in
// a fixed index order, mirrored exactly so the result is symmetric; the
// matrix is positive semidefinite up to rounding.
Eigen::MatrixXd gram_matrix(std::span<const FeatureVector> features);

}  // namespace digmm
