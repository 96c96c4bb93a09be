#include "core/ocsvm.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <vector>

#include "core/errors.hpp"
#include "core/util.hpp"
#include "support/oracles.hpp"

namespace digmm {
namespace {

std::vector<FeatureVector> random_features(int n, int m, std::uint64_t seed) {
  Rng rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<FeatureVector> features;
  for (int i = 0; i < n; ++i) {
    Eigen::VectorXd v(m);
    for (int j = 0; j < m; ++j) v[j] = unit(rng);
    features.push_back(FeatureVector{v});
  }
  return features;
}

TEST(OcsvmProblem, RejectsInfeasibleNu) {
  const Eigen::MatrixXd gram = oracles::random_spd(2, 1);
  try {
    OcsvmProblem::make(gram, 0.3);  // nu*n = 0.6 < 1
    FAIL() << "expected an error";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), errc::infeasible);
  }
}

TEST(OcsvmProblem, RejectsAsymmetricGram) {
  Eigen::MatrixXd gram(2, 2);
  gram << 1.0, 0.5, 0.2, 1.0;
  try {
    OcsvmProblem::make(gram, 1.0);
    FAIL() << "expected an error";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), errc::non_symmetric);
  }
}

TEST(SolveDual, SinglePointIsFullyDetermined) {
  const auto features = random_features(1, 3, 2);
  const auto problem = OcsvmProblem::make(gram_matrix(features), 1.0);
  OcsvmSolution sol = solve_dual(problem);
  ASSERT_EQ(sol.alphas.size(), 1);
  EXPECT_EQ(sol.alphas[0], 1.0);
  sol.weight_vector = recover_weight_vector(sol.alphas, features);
  EXPECT_TRUE(sol.weight_vector == features[0].values);
  // rho = <w, p_1>, so the training point sits exactly on the boundary.
  EXPECT_NEAR(sol.rho, sol.weight_vector.dot(features[0].values), 1e-12);
  EXPECT_NEAR(sol.weight_vector.dot(features[0].values) - sol.rho, 0.0, 1e-12);
}

TEST(SolveDual, TwoIdenticalPointsAtFullNuPinTheBox) {
  Eigen::VectorXd v(2);
  v << 0.3, 0.4;
  std::vector<FeatureVector> features = {FeatureVector{v}, FeatureVector{v}};
  const auto problem = OcsvmProblem::make(gram_matrix(features), 1.0);
  const OcsvmSolution sol = solve_dual(problem);
  EXPECT_NEAR(sol.alphas[0], 0.5, 1e-12);
  EXPECT_NEAR(sol.alphas[1], 0.5, 1e-12);
}

TEST(SolveDual, MatchesProjectedGradientOracleOnRandomInstances) {
  for (std::uint64_t seed = 0; seed < 8; ++seed) {
    const Eigen::MatrixXd gram = oracles::random_spd(6, 40 + seed);
    const auto problem = OcsvmProblem::make(gram, 0.5);
    const OcsvmSolution sol = solve_dual(problem, 1e-6);
    const auto oracle = oracles::solve_dual_pg(gram, 0.5, 1e-10);
    ASSERT_LE(oracle.kkt_violation, 1e-10);
    const double dual_obj = 0.5 * sol.alphas.dot(gram * sol.alphas);
    EXPECT_NEAR(dual_obj, oracle.objective, 1e-6);
  }
}

TEST(SolveDual, MatchesExhaustiveActiveSetOracle) {
  // Both the iterative oracle and an exact enumeration agree with the
  // solver, including on rank-deficient Gram matrices from a genuinely
  // low-dimensional feature map.
  for (std::uint64_t seed = 0; seed < 4; ++seed) {
    const auto features = random_features(7, 2, 70 + seed);
    const Eigen::MatrixXd gram = gram_matrix(features);
    const auto problem = OcsvmProblem::make(gram, 0.4);
    const OcsvmSolution sol = solve_dual(problem, 1e-8);
    const auto exact = oracles::solve_dual_enum(gram, 0.4);
    const double dual_obj = 0.5 * sol.alphas.dot(gram * sol.alphas);
    EXPECT_NEAR(dual_obj, exact.objective, 1e-6);
    EXPECT_GE(dual_obj, exact.objective - 1e-9);  // exact value is a floor
  }
}

TEST(SolveDual, OracleAgreementAcrossNuRange) {
  for (const double nu : {0.3, 0.5, 1.0}) {
    for (const int n : {4, 6, 8}) {
      const std::uint64_t seed = static_cast<std::uint64_t>(n * 100 + nu * 10);
      const Eigen::MatrixXd gram = oracles::random_spd(n, seed);
      const auto problem = OcsvmProblem::make(gram, nu);
      const OcsvmSolution sol = solve_dual(problem, 1e-6);
      const auto oracle = oracles::solve_dual_pg(gram, nu, 1e-10);
      const double dual_obj = 0.5 * sol.alphas.dot(gram * sol.alphas);
      EXPECT_NEAR(dual_obj, oracle.objective, 1e-6)
          << "n=" << n << " nu=" << nu;
    }
  }
}

TEST(KktViolation, SmallAtReturnedSolution) {
  const Eigen::MatrixXd gram = oracles::random_spd(10, 3);
  const auto problem = OcsvmProblem::make(gram, 0.5);
  const OcsvmSolution sol = solve_dual(problem, 1e-6);
  EXPECT_LT(kkt_violation(problem, sol.alphas), 1e-6);
  EXPECT_TRUE(sol.converged);
}

TEST(KktViolation, PositiveAtPerturbedPoint) {
  // For gram diag(2, 1) with nu = 0.5 the optimum is alpha = (1/3, 2/3)
  // (equal gradients 2/3).  The perturbed point (1/2, 1/2) has gradients
  // (1, 1/2), a pairwise violation of exactly 1/2.
  Eigen::MatrixXd gram(2, 2);
  gram << 2.0, 0.0, 0.0, 1.0;
  const auto problem = OcsvmProblem::make(gram, 0.5);
  Eigen::VectorXd perturbed(2);
  perturbed << 0.5, 0.5;
  EXPECT_NEAR(kkt_violation(problem, perturbed), 0.5, 1e-12);
  Eigen::VectorXd optimal(2);
  optimal << 1.0 / 3.0, 2.0 / 3.0;
  EXPECT_NEAR(kkt_violation(problem, optimal), 0.0, 1e-12);
}

TEST(KktViolation, OracleOptimumBeatsUniform) {
  const Eigen::MatrixXd gram = oracles::random_spd(5, 8);
  const auto problem = OcsvmProblem::make(gram, 0.5);
  const auto oracle = oracles::solve_dual_pg(gram, 0.5, 1e-10);
  const Eigen::VectorXd uniform = Eigen::VectorXd::Constant(5, 0.2);
  EXPECT_LT(kkt_violation(problem, oracle.alphas),
            kkt_violation(problem, uniform));
}

TEST(KktViolation, RejectsInfeasiblePoint) {
  const Eigen::MatrixXd gram = oracles::random_spd(2, 9);
  const auto problem = OcsvmProblem::make(gram, 1.0);
  Eigen::VectorXd alphas(2);
  alphas << 1.0, 1.0;  // sum = 2
  try {
    kkt_violation(problem, alphas);
    FAIL() << "expected an error";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), errc::infeasible_point);
  }
}

TEST(PrimalObjective, ZeroAtZero) {
  const auto features = random_features(4, 2, 11);
  EXPECT_EQ(primal_objective(Eigen::VectorXd::Zero(2), 0.0, features, 0.5),
            0.0);
}

TEST(PrimalObjective, StrongDualityAtSinglePoint) {
  const auto features = random_features(1, 3, 12);
  const auto problem = OcsvmProblem::make(gram_matrix(features), 1.0);
  OcsvmSolution sol = solve_dual(problem);
  sol.weight_vector = recover_weight_vector(sol.alphas, features);
  const double primal = primal_objective(sol, features, 1.0);
  const double dual = 0.5 * sol.alphas.dot(problem.gram * sol.alphas);
  // The dual is a maximization of -(1/2) a^T G a, so the gap is their sum.
  EXPECT_NEAR(primal + dual, 0.0, 1e-6);
}

TEST(PrimalObjective, SolverBeatsRandomProbes) {
  const auto features = random_features(6, 3, 13);
  const auto problem = OcsvmProblem::make(gram_matrix(features), 0.5);
  OcsvmSolution sol = solve_dual(problem, 1e-8);
  sol.weight_vector = recover_weight_vector(sol.alphas, features);
  const double at_solution = primal_objective(sol, features, 0.5);
  Rng rng(99);
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (int probe = 0; probe < 100; ++probe) {
    Eigen::VectorXd w(3);
    for (int j = 0; j < 3; ++j) w[j] = sol.weight_vector[j] + 0.3 * gauss(rng);
    const double rho = sol.rho + 0.3 * gauss(rng);
    EXPECT_LE(at_solution, primal_objective(w, rho, features, 0.5) + 1e-6);
  }
}

TEST(SolveDual, DualityGapBoundedByTolerance) {
  for (std::uint64_t seed = 0; seed < 4; ++seed) {
    const auto features = random_features(12, 3, 200 + seed);
    const auto problem = OcsvmProblem::make(gram_matrix(features), 0.5);
    const double tol = 1e-6;
    OcsvmSolution sol = solve_dual(problem, tol);
    sol.weight_vector = recover_weight_vector(sol.alphas, features);
    const double primal = primal_objective(sol, features, 0.5);
    const double dual = 0.5 * sol.alphas.dot(problem.gram * sol.alphas);
    const double gap = primal + dual;
    EXPECT_GE(gap, -1e-10);
    EXPECT_LE(gap, 10.0 * tol * (1.0 + std::abs(sol.objective_value)));
  }
}

TEST(SolveDual, MarginPointsSitOnTheBoundary) {
  const auto features = random_features(20, 3, 14);
  const auto problem = OcsvmProblem::make(gram_matrix(features), 0.3);
  const OcsvmSolution sol = solve_dual(problem, 1e-8);
  const Eigen::VectorXd boundary_values = problem.gram * sol.alphas;
  for (const int i : sol.margin_idx) {
    EXPECT_LE(std::abs(boundary_values[i] - sol.rho),
              1e-6 * std::max(1.0, std::abs(sol.rho)));
  }
  EXPECT_FALSE(sol.margin_idx.empty());
}

TEST(SolveDual, NuPropertyOnTrainingSet) {
  const int n = 200;
  Rng rng(15);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<FeatureVector> features;
  for (int i = 0; i < n; ++i) {
    Eigen::VectorXd v(3);
    for (int j = 0; j < 3; ++j) v[j] = std::exp(-0.5 * std::pow(gauss(rng), 2));
    features.push_back(FeatureVector{v});
  }
  for (const double nu : {0.1, 0.3, 0.5}) {
    const auto problem = OcsvmProblem::make(gram_matrix(features), nu);
    OcsvmSolution sol = solve_dual(problem, 1e-8);
    const Eigen::VectorXd values = problem.gram * sol.alphas;
    int below = 0;
    for (int i = 0; i < n; ++i) {
      if (values[i] < sol.rho) ++below;
    }
    EXPECT_LE(static_cast<double>(below) / n, nu + 2.0 / n) << "nu=" << nu;
    EXPECT_GE(static_cast<double>(sol.support_idx.size()) / n, nu - 2.0 / n)
        << "nu=" << nu;
  }
}

TEST(SolveDual, FeasibleAndMonotoneThroughoutTheRun) {
  const Eigen::MatrixXd gram = oracles::random_spd(30, 16);
  const auto problem = OcsvmProblem::make(gram, 0.2);
  SolverTrace trace;
  const OcsvmSolution sol = solve_dual(problem, 1e-6, -1, &trace);
  (void)sol;
  ASSERT_FALSE(trace.dual_objectives.empty());
  const double box = problem.box();
  for (std::size_t t = 0; t < trace.dual_objectives.size(); ++t) {
    EXPECT_NEAR(trace.alpha_sums[t], 1.0, 1e-10);
    EXPECT_GE(trace.alpha_mins[t], -1e-12);
    EXPECT_LE(trace.alpha_maxs[t], box + 1e-12);
    if (t > 0) {
      EXPECT_LE(trace.dual_objectives[t],
                trace.dual_objectives[t - 1] + 1e-12);
    }
  }
}

TEST(SolveDual, BitwiseDeterministic) {
  const Eigen::MatrixXd gram = oracles::random_spd(15, 17);
  const auto problem = OcsvmProblem::make(gram, 0.4);
  const OcsvmSolution a = solve_dual(problem, 1e-7);
  const OcsvmSolution b = solve_dual(problem, 1e-7);
  EXPECT_TRUE(a.alphas == b.alphas);
  EXPECT_EQ(a.rho, b.rho);
  EXPECT_EQ(a.passes, b.passes);
  EXPECT_EQ(a.support_idx, b.support_idx);
  EXPECT_EQ(a.margin_idx, b.margin_idx);
}

TEST(RecoverWeightVector, WeightsAreAlphaCombination) {
  const auto features = random_features(5, 2, 18);
  const auto problem = OcsvmProblem::make(gram_matrix(features), 0.5);
  const OcsvmSolution sol = solve_dual(problem, 1e-8);
  const Eigen::VectorXd w = recover_weight_vector(sol.alphas, features);
  Eigen::VectorXd expected = Eigen::VectorXd::Zero(2);
  for (int i = 0; i < 5; ++i) {
    expected += sol.alphas[i] * features[i].values;
  }
  EXPECT_NEAR((w - expected).cwiseAbs().maxCoeff(), 0.0, 1e-14);
}

}  // namespace
}  // namespace digmm
