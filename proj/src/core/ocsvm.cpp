#include "core/ocsvm.hpp"

#include <cmath>
#include <limits>
#include <utility>

namespace digmm {

namespace {

constexpr double kGramSymTol = 1e-10;
constexpr double kFeasTol = 1e-8;
// Relative band that separates "at a box bound" from "strictly inside" when
// recovering rho; solver steps snap clipped coordinates to exact bounds, so
// this only filters near-bound stragglers out of the margin average.
constexpr double kMarginBand = 1e-8;

double dual_objective(const Eigen::VectorXd& alphas,
                      const Eigen::VectorXd& g) {
  return 0.5 * alphas.dot(g);
}

}  // namespace

OcsvmProblem OcsvmProblem::make(Eigen::MatrixXd gram, double nu) {
  OcsvmProblem p;
  p.gram = std::move(gram);
  p.nu = nu;
  p.n = static_cast<int>(p.gram.rows());
  p.validate();
  return p;
}

void OcsvmProblem::validate() const {
  require(gram.rows() >= 1 && gram.rows() == gram.cols(),
          errc::dimension_mismatch, "gram matrix must be square and non-empty");
  require(n == static_cast<int>(gram.rows()), errc::dimension_mismatch,
          "problem size must match the gram matrix");
  require(all_finite(gram), errc::non_finite_value,
          "gram matrix must be finite");
  require((gram - gram.transpose()).cwiseAbs().maxCoeff() <= kGramSymTol,
          errc::non_symmetric, "gram matrix must be symmetric");
  require(nu > 0.0 && nu <= 1.0, errc::invalid_argument,
          "nu must lie in (0, 1]");
}

double kkt_violation(const OcsvmProblem& problem,
                     const Eigen::VectorXd& alphas) {
  problem.validate();
  const int n = problem.n;
  require(static_cast<int>(alphas.size()) == n, errc::length_mismatch,
          "alpha length must equal the problem size");
  const double c = problem.box();
  const bool box_ok = (alphas.array() >= -kFeasTol).all() &&
                      (alphas.array() <= c + kFeasTol).all();
  const bool sum_ok = std::abs(alphas.sum() - 1.0) <= kFeasTol;
  require(box_ok && sum_ok, errc::infeasible_point,
          "alphas are not feasible for the dual constraints");

  const Eigen::VectorXd g = problem.gram * alphas;
  double up_min = std::numeric_limits<double>::infinity();
  double down_max = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < n; ++i) {
    if (alphas[i] < c && g[i] < up_min) up_min = g[i];
    if (alphas[i] > 0.0 && g[i] > down_max) down_max = g[i];
  }
  if (!std::isfinite(up_min) || !std::isfinite(down_max)) return 0.0;
  return std::max(0.0, down_max - up_min);
}

OcsvmSolution solve_dual(const OcsvmProblem& problem, double tol,
                         long max_passes, SolverTrace* trace) {
  problem.validate();
  require(tol > 0.0, errc::invalid_argument, "tol must be > 0");
  const int n = problem.n;
  require(problem.nu * n >= 1.0, errc::infeasible,
          "nu*n must be >= 1 for the dual constraints to be feasible");
  if (max_passes < 0) {
    max_passes = 10L * n * std::max(100L, static_cast<long>(n));
  }

  const Eigen::MatrixXd& gram = problem.gram;
  const double c = problem.box();

  // Uniform start is always feasible: 1/n <= 1/(nu*n) because nu <= 1.
  Eigen::VectorXd alphas = Eigen::VectorXd::Constant(n, 1.0 / n);
  Eigen::VectorXd g = gram * alphas;

  auto record = [&]() {
    if (!trace) return;
    trace->dual_objectives.push_back(dual_objective(alphas, g));
    trace->alpha_sums.push_back(alphas.sum());
    trace->alpha_mins.push_back(alphas.minCoeff());
    trace->alpha_maxs.push_back(alphas.maxCoeff());
  };
  record();

  OcsvmSolution sol;
  sol.converged = false;
  long pass = 0;
  for (; pass < max_passes; ++pass) {
    // Maximal-violating pair; strict comparisons keep the lowest index on
    // ties, which makes the whole trajectory deterministic.
    int up = -1, down = -1;
    double up_min = std::numeric_limits<double>::infinity();
    double down_max = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < n; ++i) {
      if (alphas[i] < c && g[i] < up_min) { up_min = g[i]; up = i; }
      if (alphas[i] > 0.0 && g[i] > down_max) { down_max = g[i]; down = i; }
    }
    if (up < 0 || down < 0 || down_max - up_min < tol) {
      sol.converged = true;
      break;
    }

    // Exact minimization of the two-variable subproblem along
    // (e_up - e_down), clipped to the box; curvature <= 0 (possible since G
    // is only PSD) means the objective decreases all the way to the clip.
    const double curvature =
        gram(up, up) + gram(down, down) - 2.0 * gram(up, down);
    const double room_up = c - alphas[up];
    const double room_down = alphas[down];
    double step = std::min(room_up, room_down);
    if (curvature > 0.0) {
      step = std::min(step, (down_max - up_min) / curvature);
    }

    if (step == room_up && step <= room_down) {
      alphas[down] -= step;
      alphas[up] = c;  // exact bound, no residue
    } else if (step == room_down) {
      alphas[up] += step;
      alphas[down] = 0.0;  // exact bound, no residue
    } else {
      alphas[up] += step;
      alphas[down] -= step;
    }
    g.noalias() += step * (gram.col(up) - gram.col(down));
    record();
  }
  sol.passes = pass;

  // Final violation from the cached gradient (bitwise the same as a fresh
  // kkt_violation call, which recomputes g = G a).
  {
    double up_min = std::numeric_limits<double>::infinity();
    double down_max = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < n; ++i) {
      if (alphas[i] < c && g[i] < up_min) up_min = g[i];
      if (alphas[i] > 0.0 && g[i] > down_max) down_max = g[i];
    }
    sol.final_violation =
        (std::isfinite(up_min) && std::isfinite(down_max))
            ? std::max(0.0, down_max - up_min)
            : 0.0;
  }

  // Support and margin sets, then rho.  Margin points satisfy <w, p_i> = rho
  // at the optimum, so their mean gradient recovers rho; without margin
  // points any value between the upper-bound block and the zero block is
  // optimal and the midpoint is the canonical choice.
  for (int i = 0; i < n; ++i) {
    if (alphas[i] > 0.0) sol.support_idx.push_back(i);
    if (alphas[i] >= c * kMarginBand && alphas[i] <= c * (1.0 - kMarginBand)) {
      sol.margin_idx.push_back(i);
    }
  }
  if (!sol.margin_idx.empty()) {
    double acc = 0.0;
    for (int i : sol.margin_idx) acc += g[i];
    sol.rho = acc / static_cast<double>(sol.margin_idx.size());
  } else {
    double upper_max = -std::numeric_limits<double>::infinity();
    double zero_min = std::numeric_limits<double>::infinity();
    for (int i = 0; i < n; ++i) {
      if (alphas[i] > c * (1.0 - kMarginBand)) {
        upper_max = std::max(upper_max, g[i]);
      } else {
        zero_min = std::min(zero_min, g[i]);
      }
    }
    if (std::isfinite(upper_max) && std::isfinite(zero_min)) {
      sol.rho = 0.5 * (upper_max + zero_min);
    } else if (std::isfinite(upper_max)) {
      sol.rho = upper_max;  // nu == 1: every alpha sits at the box bound
    } else {
      sol.rho = zero_min;
    }
  }

  sol.objective_value = 0.5 * alphas.dot(g) - sol.rho;
  {
    double hinge = 0.0;
    for (int i = 0; i < n; ++i) hinge += std::max(sol.rho - g[i], 0.0);
    sol.objective_value += hinge / (problem.nu * n);
  }

  sol.alphas = std::move(alphas);
  return sol;
}

Eigen::VectorXd recover_weight_vector(
    const Eigen::VectorXd& alphas, std::span<const FeatureVector> features) {
  require(static_cast<std::size_t>(alphas.size()) == features.size(),
          errc::length_mismatch,
          "alpha length must equal the number of feature vectors");
  require(!features.empty(), errc::invalid_argument,
          "weight recovery requires at least one feature vector");
  Eigen::VectorXd w = Eigen::VectorXd::Zero(features[0].values.size());
  for (std::size_t i = 0; i < features.size(); ++i) {
    require(features[i].values.size() == w.size(), errc::length_mismatch,
            "all feature vectors must have equal length");
    w.noalias() += alphas[static_cast<Eigen::Index>(i)] * features[i].values;
  }
  return w;
}

double primal_objective(const Eigen::VectorXd& w, double rho,
                        std::span<const FeatureVector> features, double nu) {
  require(nu > 0.0 && nu <= 1.0, errc::invalid_argument,
          "nu must lie in (0, 1]");
  require(!features.empty(), errc::invalid_argument,
          "primal objective requires at least one feature vector");
  const double n = static_cast<double>(features.size());
  double hinge = 0.0;
  for (const auto& f : features) {
    require(f.values.size() == w.size(), errc::length_mismatch,
            "feature length must match the weight vector");
    hinge += std::max(rho - w.dot(f.values), 0.0);
  }
  return 0.5 * w.squaredNorm() + hinge / (nu * n) - rho;
}

double primal_objective(const OcsvmSolution& solution,
                        std::span<const FeatureVector> features, double nu) {
  require(solution.weight_vector.size() > 0, errc::invalid_argument,
          "solution has no materialized weight vector");
  return primal_objective(solution.weight_vector, solution.rho, features, nu);
}

}  // namespace digmm
