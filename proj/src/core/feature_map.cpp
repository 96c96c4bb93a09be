#include "core/feature_map.hpp"

#include <cmath>

namespace digmm {

FeatureVector feature_vector(const GmmParams& params, const Eigen::VectorXd& x,
                             FeatureScaling scaling) {
  require(x.size() == params.dim(), errc::dimension_mismatch,
          "point dimension does not match the mixture dimension");
  const int m = params.component_count();
  Eigen::VectorXd v(m);
  for (int j = 0; j < m; ++j) {
    double lp = params.components[j].log_pdf(x);
    if (scaling == FeatureScaling::peak_normalized) {
      lp -= params.components[j].log_norm_const;  // divide by the peak p_j(mu_j)
    }
    v[j] = std::exp(lp);
  }
  return FeatureVector{std::move(v)};
}

Eigen::MatrixXd feature_matrix(const GmmParams& params,
                               const Eigen::MatrixXd& points,
                               FeatureScaling scaling) {
  Eigen::MatrixXd out(points.rows(), params.component_count());
  for (Eigen::Index i = 0; i < points.rows(); ++i) {
    out.row(i) =
        feature_vector(params, points.row(i).transpose(), scaling).values;
  }
  return out;
}

Eigen::MatrixXd gram_matrix(std::span<const FeatureVector> features) {
  const Eigen::Index n = static_cast<Eigen::Index>(features.size());
  require(n >= 1, errc::invalid_argument,
          "gram_matrix requires at least one feature vector");
  const Eigen::Index m = features[0].values.size();
  for (const auto& f : features) {
    require(f.values.size() == m, errc::length_mismatch,
            "all feature vectors must have equal length");
  }
  Eigen::MatrixXd g(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index k = i; k < n; ++k) {
      long double acc = 0.0L;
      for (Eigen::Index j = 0; j < m; ++j) {
        acc += static_cast<long double>(features[i].values[j]) *
               static_cast<long double>(features[k].values[j]);
      }
      const double v = static_cast<double>(acc);
      g(i, k) = v;
      g(k, i) = v;  // mirrored, so exact symmetry by construction
    }
  }
  return g;
}

}  // namespace digmm
