#include "core/gmm.hpp"

#include <cmath>
#include <limits>
#include <utility>

namespace digmm {

namespace {

constexpr double kWeightSumTol = 1e-12;
constexpr int kMaxRescues = 3;

// Per-restart working state for EM.
struct EmState {
  std::vector<GaussianComponent> components;
  Eigen::VectorXd weights;
};

// Weighted draw from cumulative masses; deterministic walk so results do not
// depend on library internals beyond the uniform generator itself.
int pick_weighted(const Eigen::VectorXd& mass, double total, Rng& rng) {
  std::uniform_real_distribution<double> unif(0.0, total);
  const double u = unif(rng);
  double acc = 0.0;
  for (Eigen::Index j = 0; j < mass.size(); ++j) {
    acc += mass[j];
    if (u < acc) return static_cast<int>(j);
  }
  return static_cast<int>(mass.size() - 1);
}

// k-means++-style seeding: first mean uniform over rows, each further mean
// drawn with probability proportional to squared distance from the nearest
// mean chosen so far.
std::vector<int> kmeanspp_indices(const Eigen::MatrixXd& x, int m, Rng& rng) {
  const Eigen::Index n = x.rows();
  std::vector<int> chosen;
  std::uniform_int_distribution<Eigen::Index> first(0, n - 1);
  chosen.push_back(static_cast<int>(first(rng)));
  Eigen::VectorXd dist2 =
      (x.rowwise() - x.row(chosen[0])).rowwise().squaredNorm();
  while (static_cast<int>(chosen.size()) < m) {
    const double total = dist2.sum();
    int next;
    if (total > 0.0) {
      next = pick_weighted(dist2, total, rng);
    } else {
      next = static_cast<int>(first(rng));  // all points coincide
    }
    chosen.push_back(next);
    dist2 = dist2.cwiseMin(
        (x.rowwise() - x.row(next)).rowwise().squaredNorm());
  }
  return chosen;
}

Eigen::MatrixXd global_covariance(const Eigen::MatrixXd& x) {
  const Eigen::RowVectorXd mu = x.colwise().mean();
  const Eigen::MatrixXd centered = x.rowwise() - mu;
  return (centered.transpose() * centered) / static_cast<double>(x.rows());
}

Eigen::MatrixXd regularize(Eigen::MatrixXd cov, double reg_covar) {
  const Eigen::Index d = cov.rows();
  const double ridge = reg_covar * cov.trace() / static_cast<double>(d);
  cov.diagonal().array() += ridge;
  return cov;
}

double state_log_pdf(const EmState& s, const Eigen::VectorXd& x,
                     Eigen::VectorXd& scratch) {
  for (std::size_t j = 0; j < s.components.size(); ++j) {
    scratch[static_cast<Eigen::Index>(j)] =
        std::log(s.weights[static_cast<Eigen::Index>(j)]) +
        s.components[j].log_pdf(x);
  }
  return log_sum_exp(scratch);
}

}  // namespace

GmmParams GmmParams::make(std::vector<GaussianComponent> components,
                          Eigen::VectorXd weights) {
  GmmParams p;
  p.components = std::move(components);
  p.weights = std::move(weights);
  p.validate();
  return p;
}

void GmmParams::validate() const {
  require(!components.empty(), errc::invariant_violation,
          "mixture must have at least one component");
  require(weights.size() == static_cast<Eigen::Index>(components.size()),
          errc::invariant_violation,
          "weight count must equal the component count");
  require((weights.array() > 0.0).all(), errc::invariant_violation,
          "mixture weights must be strictly positive");
  require(std::abs(weights.sum() - 1.0) <= kWeightSumTol,
          errc::invariant_violation, "mixture weights must sum to 1");
  const int d = components[0].dim();
  for (const auto& c : components) {
    require(c.dim() == d, errc::invariant_violation,
            "all components must share one dimension");
  }
}

void EmConfig::validate() const {
  require(max_iters >= 1, errc::invalid_argument, "max_iters must be >= 1");
  require(rel_tol > 0.0, errc::invalid_argument, "rel_tol must be > 0");
  require(n_init >= 1, errc::invalid_argument, "n_init must be >= 1");
  require(reg_covar >= 0.0, errc::invalid_argument, "reg_covar must be >= 0");
}

double mixture_log_pdf(const GmmParams& params, const Eigen::VectorXd& x) {
  require(x.size() == params.dim(), errc::dimension_mismatch,
          "point dimension does not match the mixture dimension");
  Eigen::VectorXd t(params.component_count());
  for (int j = 0; j < params.component_count(); ++j) {
    t[j] = std::log(params.weights[j]) + params.components[j].log_pdf(x);
  }
  return log_sum_exp(t);
}

Eigen::VectorXd responsibilities(const GmmParams& params,
                                 const Eigen::VectorXd& x) {
  require(x.size() == params.dim(), errc::dimension_mismatch,
          "point dimension does not match the mixture dimension");
  const int m = params.component_count();
  Eigen::VectorXd t(m);
  for (int j = 0; j < m; ++j) {
    t[j] = std::log(params.weights[j]) + params.components[j].log_pdf(x);
  }
  const double mx = t.maxCoeff();
  if (!std::isfinite(mx)) {
    return Eigen::VectorXd::Constant(m, 1.0 / m);  // total underflow
  }
  Eigen::VectorXd g = (t.array() - mx).exp();
  return g / g.sum();
}

std::pair<GmmParams, EmTrace> fit_em(const Dataset& data, int m,
                                     const EmConfig& config) {
  config.validate();
  require(m >= 1, errc::invalid_argument, "component count must be >= 1");
  const Eigen::Index n = data.points.rows();
  const Eigen::Index d = data.points.cols();
  require(n >= m, errc::too_few_samples,
          "EM needs at least as many samples as components");

  const Eigen::MatrixXd& x = data.points;
  const Eigen::MatrixXd base_cov =
      regularize(global_covariance(x), config.reg_covar);
  const double min_weight = 1.0 / (10.0 * static_cast<double>(n));

  GmmParams best_params;
  EmTrace best_trace;
  bool have_best = false;

  for (int restart = 0; restart < config.n_init; ++restart) {
    Rng rng = substream(config.seed, static_cast<std::uint64_t>(restart));

    EmState s;
    s.weights = Eigen::VectorXd::Constant(m, 1.0 / m);
    for (int idx : kmeanspp_indices(x, m, rng)) {
      s.components.push_back(
          GaussianComponent::make(x.row(idx).transpose(), base_cov));
    }

    EmTrace trace;
    trace.restart_index = restart;
    int rescues = 0;
    bool rescued_last_step = false;

    Eigen::MatrixXd resp(n, m);
    Eigen::VectorXd scratch(m);

    for (int iter = 0;; ++iter) {
      // E-step: responsibilities and the log-likelihood at current params.
      double ll = 0.0;
      for (Eigen::Index i = 0; i < n; ++i) {
        const Eigen::VectorXd xi = x.row(i).transpose();
        for (int j = 0; j < m; ++j) {
          scratch[j] = std::log(s.weights[j]) + s.components[j].log_pdf(xi);
        }
        const double lse = log_sum_exp(scratch);
        ll += lse;
        if (std::isfinite(lse)) {
          resp.row(i) = (scratch.array() - lse).exp();
        } else {
          resp.row(i).setConstant(1.0 / m);
        }
      }
      trace.log_likelihoods.push_back(ll);

      const std::size_t t = trace.log_likelihoods.size();
      if (t >= 2 && !rescued_last_step) {
        const double prev = trace.log_likelihoods[t - 2];
        if (std::abs(ll - prev) / (std::abs(prev) + 1.0) < config.rel_tol) {
          trace.converged = true;
          break;
        }
      }
      rescued_last_step = false;
      if (iter >= config.max_iters) break;

      // M-step.
      const Eigen::VectorXd nj = resp.colwise().sum();
      s.weights = nj / static_cast<double>(n);

      // A component that lost essentially all mass is re-seeded at the point
      // the current mixture explains worst.
      int starved = -1;
      for (int j = 0; j < m; ++j) {
        if (s.weights[j] < min_weight) { starved = j; break; }
      }
      if (starved >= 0) {
        if (++rescues > kMaxRescues) {
          raise(errc::degenerate_data,
                "EM restart " + std::to_string(restart) +
                    " kept collapsing onto fewer than m points");
        }
        Eigen::Index worst = 0;
        double worst_ll = std::numeric_limits<double>::infinity();
        for (Eigen::Index i = 0; i < n; ++i) {
          const double v = state_log_pdf(s, x.row(i).transpose(), scratch);
          if (v < worst_ll) { worst_ll = v; worst = i; }
        }
        s.components[starved] =
            GaussianComponent::make(x.row(worst).transpose(), base_cov);
        const double fresh = 1.0 / static_cast<double>(n);
        const double keep = 1.0 - s.weights[starved];
        for (int j = 0; j < m; ++j) {
          s.weights[j] = (j == starved)
                             ? fresh
                             : s.weights[j] * (1.0 - fresh) / keep;
        }
        trace.rescue_iterations.push_back(static_cast<int>(t));
        rescued_last_step = true;
        ++trace.iterations;
        continue;
      }

      for (int j = 0; j < m; ++j) {
        const Eigen::VectorXd mu =
            (resp.col(j).transpose() * x).transpose() / nj[j];
        Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(d, d);
        for (Eigen::Index i = 0; i < n; ++i) {
          const Eigen::VectorXd c = x.row(i).transpose() - mu;
          cov.noalias() += resp(i, j) * (c * c.transpose());
        }
        cov /= nj[j];
        if (!(cov.trace() > 0.0) || !all_finite(cov)) {
          // Zero spread means the component collapsed onto one point; treat
          // it like starvation and re-seed on the next pass.
          s.weights[j] = 0.0;
        } else {
          s.components[j] =
              GaussianComponent::make(mu, regularize(cov, config.reg_covar));
        }
      }
      // If a covariance collapse zeroed a weight, loop back through the
      // rescue branch with the weights renormalized by the E-step above.
      if ((s.weights.array() <= 0.0).any()) {
        for (int j = 0; j < m; ++j) {
          if (s.weights[j] <= 0.0) { s.weights[j] = 0.5 * min_weight; }
        }
        s.weights /= s.weights.sum();
      }
      ++trace.iterations;
    }

    const double final_ll = trace.log_likelihoods.back();
    if (!have_best || final_ll > best_trace.log_likelihoods.back()) {
      GmmParams p;
      p.components = s.components;
      p.weights = s.weights;
      // The E-step weights always lie on the simplex up to rounding; snap
      // the tiny fp drift so the type invariant holds exactly.
      p.weights /= p.weights.sum();
      p.validate();
      best_params = std::move(p);
      best_trace = std::move(trace);
      have_best = true;
    }
  }

  return {std::move(best_params), std::move(best_trace)};
}

double log_likelihood(const GmmParams& params, const Dataset& data) {
  if (data.rows() == 0) return 0.0;
  require(data.cols() == params.dim(), errc::dimension_mismatch,
          "dataset dimension does not match the mixture dimension");
  double sum = 0.0;
  for (int i = 0; i < data.rows(); ++i) {
    sum += mixture_log_pdf(params, data.points.row(i).transpose());
  }
  return sum;
}

double bic(const GmmParams& params, const Dataset& data) {
  const int n = data.rows();
  require(n >= 1, errc::invalid_argument, "BIC requires at least one sample");
  const double m = params.component_count();
  const double d = params.dim();
  const double k = (m - 1.0) + m * d + m * d * (d + 1.0) / 2.0;
  return k * std::log(static_cast<double>(n)) -
         2.0 * log_likelihood(params, data);
}

}  // namespace digmm
