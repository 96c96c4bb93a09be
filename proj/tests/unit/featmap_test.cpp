#include "core/feature_map.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "core/errors.hpp"
#include "core/util.hpp"
#include "support/oracles.hpp"

namespace digmm {
namespace {

Eigen::Vector2d vec2(double a, double b) { return Eigen::Vector2d(a, b); }

GmmParams standard_single() {
  std::vector<GaussianComponent> comps;
  comps.push_back(
      GaussianComponent::make(vec2(0.0, 0.0), Eigen::Matrix2d::Identity()));
  Eigen::VectorXd weights(1);
  weights << 1.0;
  return GmmParams::make(std::move(comps), weights);
}

GmmParams two_component_mixture() {
  Eigen::Matrix2d cov1, cov2;
  cov1 << 1.0, 0.2, 0.2, 0.8;
  cov2 << 0.5, 0.0, 0.0, 2.0;
  std::vector<GaussianComponent> comps;
  comps.push_back(GaussianComponent::make(vec2(-1.0, 0.0), cov1));
  comps.push_back(GaussianComponent::make(vec2(2.0, 1.0), cov2));
  Eigen::VectorXd weights(2);
  weights << 0.35, 0.65;
  return GmmParams::make(std::move(comps), weights);
}

GmmParams random_fitted_like(std::uint64_t seed) {
  Rng rng(seed);
  std::normal_distribution<double> gauss(0.0, 2.0);
  std::vector<GaussianComponent> comps;
  const int m = 2 + static_cast<int>(seed % 3);
  Eigen::VectorXd weights(m);
  for (int j = 0; j < m; ++j) {
    const Eigen::MatrixXd cov = oracles::random_spd(2, seed * 31 + j);
    comps.push_back(GaussianComponent::make(vec2(gauss(rng), gauss(rng)), cov));
    weights[j] = 0.5 + static_cast<double>((seed + j) % 4);
  }
  weights /= weights.sum();
  return GmmParams::make(std::move(comps), weights);
}

TEST(FeatureVector, SingleStandardComponentAtOrigin) {
  const auto params = standard_single();
  const FeatureVector p = feature_vector(params, vec2(0.0, 0.0));
  ASSERT_EQ(p.values.size(), 1);
  EXPECT_NEAR(p.values[0], 1.0 / (2.0 * M_PI), 1e-12);
}

TEST(FeatureVector, FarPointUnderflowsToExactZero) {
  const auto params = two_component_mixture();
  const FeatureVector p = feature_vector(params, vec2(1e4, 1e4));
  for (Eigen::Index j = 0; j < p.values.size(); ++j) {
    EXPECT_EQ(p.values[j], 0.0);
  }
}

TEST(FeatureVector, WeightedSumMatchesMixtureDensity) {
  const auto params = two_component_mixture();
  for (const auto& x : {vec2(0.0, 0.0), vec2(-1.0, 0.5), vec2(2.5, 0.5)}) {
    const FeatureVector p = feature_vector(params, x);
    const double via_features = params.weights.dot(p.values);
    const double via_logs = std::exp(mixture_log_pdf(params, x));
    EXPECT_NEAR(via_features, via_logs, 1e-10 * via_logs);
  }
}

TEST(FeatureVector, RejectsDimensionMismatch) {
  const auto params = standard_single();
  Eigen::VectorXd x(3);
  x << 0.0, 0.0, 0.0;
  try {
    feature_vector(params, x);
    FAIL() << "expected an error";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), errc::dimension_mismatch);
  }
}

TEST(FeatureVector, EntriesNonnegativeAndBelowPeak) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto params = random_fitted_like(seed);
    Rng rng(seed + 100);
    std::normal_distribution<double> gauss(0.0, 4.0);
    for (int i = 0; i < 50; ++i) {
      const FeatureVector p =
          feature_vector(params, vec2(gauss(rng), gauss(rng)));
      for (Eigen::Index j = 0; j < p.values.size(); ++j) {
        EXPECT_GE(p.values[j], 0.0);
        EXPECT_LE(p.values[j],
                  std::exp(params.components[j].log_norm_const) * (1 + 1e-12));
      }
    }
  }
}

TEST(FeatureVector, PeakNormalizedModeBoundsEntries) {
  const auto params = two_component_mixture();
  for (int j = 0; j < params.component_count(); ++j) {
    const FeatureVector p = feature_vector(params, params.components[j].mean,
                                           FeatureScaling::peak_normalized);
    EXPECT_NEAR(p.values[j], 1.0, 1e-12);
    for (Eigen::Index k = 0; k < p.values.size(); ++k) {
      EXPECT_GE(p.values[k], 0.0);
      EXPECT_LE(p.values[k], 1.0 + 1e-12);
    }
  }
  Rng rng(55);
  std::normal_distribution<double> gauss(0.0, 3.0);
  for (int i = 0; i < 100; ++i) {
    const FeatureVector p = feature_vector(
        params, vec2(gauss(rng), gauss(rng)), FeatureScaling::peak_normalized);
    EXPECT_GE(p.values.minCoeff(), 0.0);
    EXPECT_LE(p.values.maxCoeff(), 1.0 + 1e-12);
  }
}

TEST(FeatureMatrix, RowsMatchPerPointVectors) {
  const auto params = two_component_mixture();
  Eigen::MatrixXd pts(3, 2);
  pts << 0.0, 0.0, -1.0, 0.5, 2.0, 1.0;
  const Eigen::MatrixXd mat = feature_matrix(params, pts);
  ASSERT_EQ(mat.rows(), 3);
  ASSERT_EQ(mat.cols(), 2);
  for (int i = 0; i < 3; ++i) {
    const FeatureVector p = feature_vector(params, pts.row(i).transpose());
    EXPECT_TRUE(mat.row(i).transpose() == p.values);
  }
}

TEST(GramMatrix, SingleVectorDotProduct) {
  std::vector<FeatureVector> features;
  Eigen::VectorXd v(2);
  v << 0.1, 0.2;
  features.push_back(FeatureVector{v});
  const Eigen::MatrixXd gram = gram_matrix(features);
  ASSERT_EQ(gram.rows(), 1);
  EXPECT_NEAR(gram(0, 0), 0.05, 1e-15);
}

TEST(GramMatrix, OffDiagonalNonnegative) {
  const auto params = two_component_mixture();
  Rng rng(9);
  std::normal_distribution<double> gauss(0.0, 2.0);
  std::vector<FeatureVector> features;
  for (int i = 0; i < 20; ++i) {
    features.push_back(feature_vector(params, vec2(gauss(rng), gauss(rng))));
  }
  const Eigen::MatrixXd gram = gram_matrix(features);
  EXPECT_GE(gram.minCoeff(), 0.0);
  EXPECT_NEAR((gram - gram.transpose()).cwiseAbs().maxCoeff(), 0.0, 0.0);
}

TEST(GramMatrix, MatchesBruteForceDoubleLoop) {
  Rng rng(13);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<FeatureVector> features;
  for (int i = 0; i < 3; ++i) {
    Eigen::VectorXd v(4);
    for (int j = 0; j < 4; ++j) v[j] = unit(rng);
    features.push_back(FeatureVector{v});
  }
  const Eigen::MatrixXd gram = gram_matrix(features);
  for (int i = 0; i < 3; ++i) {
    for (int k = 0; k < 3; ++k) {
      double dot = 0.0;
      for (int j = 0; j < 4; ++j) {
        dot += features[i].values[j] * features[k].values[j];
      }
      EXPECT_NEAR(gram(i, k), dot, 1e-14);
    }
  }
}

TEST(GramMatrix, RejectsLengthMismatch) {
  std::vector<FeatureVector> features;
  Eigen::VectorXd a(2), b(3);
  a << 0.1, 0.2;
  b << 0.1, 0.2, 0.3;
  features.push_back(FeatureVector{a});
  features.push_back(FeatureVector{b});
  try {
    gram_matrix(features);
    FAIL() << "expected an error";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), errc::length_mismatch);
  }
}

TEST(FeatureGeometry, PairwiseCosinesWithinQuarterTurn) {
  for (std::uint64_t seed = 0; seed < 4; ++seed) {
    const auto params = random_fitted_like(seed);
    Rng rng(seed + 500);
    std::normal_distribution<double> gauss(0.0, 3.0);
    std::vector<FeatureVector> features;
    while (features.size() < 25) {
      const FeatureVector p =
          feature_vector(params, vec2(gauss(rng), gauss(rng)));
      if (p.values.norm() > 0.0) features.push_back(p);
    }
    for (std::size_t i = 0; i < features.size(); ++i) {
      for (std::size_t k = i + 1; k < features.size(); ++k) {
        const double cosine =
            features[i].values.dot(features[k].values) /
            (features[i].values.norm() * features[k].values.norm());
        EXPECT_GE(cosine, -1e-12);
        EXPECT_LE(cosine, 1.0 + 1e-12);
      }
    }
  }
}

TEST(FeatureGeometry, GramPositiveSemidefinite) {
  for (std::uint64_t seed = 0; seed < 4; ++seed) {
    const auto params = random_fitted_like(seed + 20);
    Rng rng(seed + 900);
    std::normal_distribution<double> gauss(0.0, 3.0);
    std::vector<FeatureVector> features;
    for (int i = 0; i < 30; ++i) {
      features.push_back(feature_vector(params, vec2(gauss(rng), gauss(rng))));
    }
    const Eigen::MatrixXd gram = gram_matrix(features);
    const Eigen::MatrixXd sym = 0.5 * (gram + gram.transpose());
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(sym);
    EXPECT_GE(eig.eigenvalues().minCoeff(), -1e-9);
  }
}

}  // namespace
}  // namespace digmm
