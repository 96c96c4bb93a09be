#include "support/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace oracles {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

double gaussian_log_pdf(const Eigen::VectorXd& mean,
                        const Eigen::MatrixXd& cov, const Eigen::VectorXd& x) {
  const auto d = static_cast<double>(mean.size());
  const Eigen::VectorXd diff = x - mean;
  const double quad = diff.dot(cov.inverse() * diff);
  return -0.5 * (d * std::log(2.0 * M_PI) + std::log(cov.determinant()) + quad);
}

double mixture_log_pdf(const std::vector<double>& weights,
                       const std::vector<Eigen::VectorXd>& means,
                       const std::vector<Eigen::MatrixXd>& covs,
                       const Eigen::VectorXd& x) {
  double density = 0.0;
  for (std::size_t j = 0; j < weights.size(); ++j) {
    density += weights[j] * std::exp(gaussian_log_pdf(means[j], covs[j], x));
  }
  return std::log(density);
}

Eigen::VectorXd project_box_simplex(const Eigen::VectorXd& v, double box) {
  const auto clamped_sum = [&](double lambda) {
    double s = 0.0;
    for (Eigen::Index i = 0; i < v.size(); ++i) {
      s += std::clamp(v[i] - lambda, 0.0, box);
    }
    return s;
  };
  // clamped_sum is continuous and non-increasing in lambda; bracket the
  // level set {sum == 1} and bisect to machine precision.
  double lo = v.minCoeff() - box - 1.0;  // sum = n*box >= 1 here
  double hi = v.maxCoeff();              // sum = 0 here
  for (int iter = 0; iter < 200; ++iter) {
    const double mid = 0.5 * (lo + hi);
    if (clamped_sum(mid) >= 1.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  const double lambda = 0.5 * (lo + hi);
  Eigen::VectorXd out(v.size());
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    out[i] = std::clamp(v[i] - lambda, 0.0, box);
  }
  return out;
}

double dual_kkt_violation(const Eigen::MatrixXd& gram,
                          const Eigen::VectorXd& alphas, double box) {
  const Eigen::VectorXd g = gram * alphas;
  double up = kInf;     // min gradient over coordinates free to increase
  double down = -kInf;  // max gradient over coordinates free to decrease
  for (Eigen::Index i = 0; i < alphas.size(); ++i) {
    if (alphas[i] < box) up = std::min(up, g[i]);
    if (alphas[i] > 0.0) down = std::max(down, g[i]);
  }
  if (!std::isfinite(up) || !std::isfinite(down)) return 0.0;
  return std::max(0.0, down - up);
}

DualSolution solve_dual_pg(const Eigen::MatrixXd& gram, double nu,
                           double kkt_tol, int max_iters) {
  const auto n = gram.rows();
  const double box = 1.0 / (nu * static_cast<double>(n));
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gram);
  const double lipschitz = std::max(eig.eigenvalues().maxCoeff(), 1e-12);
  const double step = 1.0 / lipschitz;

  Eigen::VectorXd a = project_box_simplex(
      Eigen::VectorXd::Constant(n, 1.0 / static_cast<double>(n)), box);
  Eigen::VectorXd y = a;
  double t = 1.0;
  double prev_obj = kInf;

  DualSolution result;
  result.kkt_violation = dual_kkt_violation(gram, a, box);
  int iter = 0;
  while (result.kkt_violation > kkt_tol && iter < max_iters) {
    Eigen::VectorXd next = project_box_simplex(y - step * (gram * y), box);
    double obj = 0.5 * next.dot(gram * next);
    if (obj > prev_obj) {
      // Momentum overshot; restart from the last plain gradient point.
      y = a;
      t = 1.0;
      next = project_box_simplex(y - step * (gram * y), box);
      obj = 0.5 * next.dot(gram * next);
    }
    const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
    y = next + ((t - 1.0) / t_next) * (next - a);
    a = next;
    t = t_next;
    prev_obj = obj;
    ++iter;
    result.kkt_violation = dual_kkt_violation(gram, a, box);
  }
  result.alphas = a;
  result.objective = 0.5 * a.dot(gram * a);
  result.iterations = iter;
  return result;
}

DualSolution solve_dual_enum(const Eigen::MatrixXd& gram, double nu) {
  const int n = static_cast<int>(gram.rows());
  if (n > 12) throw std::invalid_argument("solve_dual_enum: n too large");
  const double box = 1.0 / (nu * static_cast<double>(n));
  const double tol = 1e-9;

  DualSolution best;
  best.objective = kInf;

  long assignments = 1;
  for (int i = 0; i < n; ++i) assignments *= 3;

  for (long code = 0; code < assignments; ++code) {
    // Decode each coordinate's status: 0 = zero, 1 = at box, 2 = free.
    std::vector<int> status(n);
    long rest = code;
    for (int i = 0; i < n; ++i) {
      status[i] = static_cast<int>(rest % 3);
      rest /= 3;
    }
    std::vector<int> free_idx;
    double fixed_sum = 0.0;
    for (int i = 0; i < n; ++i) {
      if (status[i] == 1) fixed_sum += box;
      if (status[i] == 2) free_idx.push_back(i);
    }
    const int f = static_cast<int>(free_idx.size());

    Eigen::VectorXd a = Eigen::VectorXd::Zero(n);
    for (int i = 0; i < n; ++i) {
      if (status[i] == 1) a[i] = box;
    }
    double lambda;
    if (f == 0) {
      if (std::abs(fixed_sum - 1.0) > tol) continue;
      // All coordinates pinned; any multiplier between the bound gradients
      // certifies optimality, so pick the midpoint of the feasible band.
      const Eigen::VectorXd g = gram * a;
      double lambda_lo = -kInf, lambda_hi = kInf;
      for (int i = 0; i < n; ++i) {
        if (status[i] == 1) lambda_lo = std::max(lambda_lo, g[i]);
        if (status[i] == 0) lambda_hi = std::min(lambda_hi, g[i]);
      }
      if (lambda_lo > lambda_hi + tol) continue;
      lambda = 0.0;
    } else {
      // Stationarity on the free block: G_FF a_F - lambda 1 = -G_FB a_B,
      // plus the budget row sum(a_F) = 1 - fixed_sum.
      Eigen::MatrixXd sys = Eigen::MatrixXd::Zero(f + 1, f + 1);
      Eigen::VectorXd rhs(f + 1);
      for (int r = 0; r < f; ++r) {
        for (int c = 0; c < f; ++c) sys(r, c) = gram(free_idx[r], free_idx[c]);
        sys(r, f) = -1.0;
        double cross = 0.0;
        for (int i = 0; i < n; ++i) {
          if (status[i] == 1) cross += gram(free_idx[r], i) * box;
        }
        rhs[r] = -cross;
      }
      for (int c = 0; c < f; ++c) sys(f, c) = 1.0;
      rhs[f] = 1.0 - fixed_sum;
      const Eigen::VectorXd sol = sys.fullPivLu().solve(rhs);
      if ((sys * sol - rhs).cwiseAbs().maxCoeff() > tol) continue;
      for (int r = 0; r < f; ++r) {
        const double v = sol[r];
        if (v < -tol || v > box + tol) goto next_assignment;
        a[free_idx[r]] = std::clamp(v, 0.0, box);
      }
      lambda = sol[f];
      {
        const Eigen::VectorXd g = gram * a;
        for (int i = 0; i < n; ++i) {
          if (status[i] == 0 && g[i] < lambda - tol) goto next_assignment;
          if (status[i] == 1 && g[i] > lambda + tol) goto next_assignment;
        }
      }
    }
    {
      const double obj = 0.5 * a.dot(gram * a);
      if (obj < best.objective) {
        best.alphas = a;
        best.objective = obj;
        best.kkt_violation = dual_kkt_violation(gram, a, box);
      }
    }
  next_assignment:;
  }
  if (!std::isfinite(best.objective)) {
    throw std::runtime_error("solve_dual_enum: no KKT-consistent assignment");
  }
  return best;
}

double best_balanced_accuracy(const std::vector<double>& scores,
                              const std::vector<int>& labels) {
  std::vector<double> thresholds = scores;
  thresholds.push_back(-kInf);  // everything classified normal
  double best = 0.0;
  for (const double t : thresholds) {
    double normal_right = 0.0, normal_total = 0.0;
    double anomaly_right = 0.0, anomaly_total = 0.0;
    for (std::size_t i = 0; i < scores.size(); ++i) {
      if (labels[i] == 1) {
        normal_total += 1.0;
        if (scores[i] > t) normal_right += 1.0;
      } else {
        anomaly_total += 1.0;
        if (!(scores[i] > t)) anomaly_right += 1.0;
      }
    }
    const double ba =
        0.5 * (normal_right / normal_total + anomaly_right / anomaly_total);
    best = std::max(best, ba);
  }
  return best;
}

double pairwise_auc(const std::vector<double>& scores,
                    const std::vector<int>& labels) {
  double wins = 0.0, pairs = 0.0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (labels[i] != 1) continue;
    for (std::size_t k = 0; k < scores.size(); ++k) {
      if (labels[k] != 0) continue;
      pairs += 1.0;
      if (scores[i] > scores[k]) {
        wins += 1.0;
      } else if (scores[i] == scores[k]) {
        wins += 0.5;
      }
    }
  }
  return wins / pairs;
}

Eigen::MatrixXd random_spd(int d, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  Eigen::MatrixXd a(d, d);
  for (int r = 0; r < d; ++r) {
    for (int c = 0; c < d; ++c) a(r, c) = gauss(rng);
  }
  Eigen::MatrixXd spd = a.transpose() * a / static_cast<double>(d);
  spd += 0.5 * Eigen::MatrixXd::Identity(d, d);
  return 0.5 * (spd + spd.transpose());
}

}  // namespace oracles
