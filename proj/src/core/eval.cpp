#include "core/eval.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>

#include "core/util.hpp"

namespace digmm {

namespace {

void require_two_classes(const std::vector<int>& labels) {
  const bool has_normal = std::find(labels.begin(), labels.end(), 1) != labels.end();
  const bool has_anomaly = std::find(labels.begin(), labels.end(), 0) != labels.end();
  require(has_normal && has_anomaly, errc::single_class,
          "metric needs both classes present");
}

void append_number(std::string& out, double v) {
  if (std::isinf(v)) {
    out += v < 0 ? "-inf" : "inf";
    return;
  }
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  out.append(buf, res.ptr);
}

}  // namespace

ScoredDataset score_dataset(const AnyModel& model, const Dataset& data) {
  require(data.labels.has_value(), errc::missing_labels,
          "scoring needs a labeled dataset");
  require(data.cols() == model_dim(model), errc::dimension_mismatch,
          "data dimension does not match the model");
  ScoredDataset out;
  out.scores.resize(static_cast<std::size_t>(data.rows()));
  out.labels = *data.labels;
  for (int i = 0; i < data.rows(); ++i) {
    out.scores[static_cast<std::size_t>(i)] =
        model_decision_value(model, data.points.row(i).transpose());
  }
  return out;
}

double roc_auc(const std::vector<double>& scores,
               const std::vector<int>& labels) {
  require(scores.size() == labels.size(), errc::length_mismatch,
          "scores and labels must have equal length");
  require_two_classes(labels);

  // Rank statistic: sort by score, sum normal-class ranks with midranks for
  // ties, then AUC = (R_normal - n1(n1+1)/2) / (n1 * n0).
  const std::size_t n = scores.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return scores[a] < scores[b];
  });

  double rank_sum_normal = 0.0;
  std::size_t n_normal = 0;
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j < n && scores[order[j]] == scores[order[i]]) ++j;
    const double midrank = 0.5 * static_cast<double>(i + 1 + j);  // 1-based
    for (std::size_t k = i; k < j; ++k) {
      if (labels[order[k]] == 1) {
        rank_sum_normal += midrank;
        ++n_normal;
      }
    }
    i = j;
  }
  const std::size_t n_anomaly = n - n_normal;
  const double n1 = static_cast<double>(n_normal);
  return (rank_sum_normal - n1 * (n1 + 1.0) / 2.0) /
         (n1 * static_cast<double>(n_anomaly));
}

double best_threshold_accuracy(const std::vector<double>& scores,
                               const std::vector<int>& labels) {
  require(scores.size() == labels.size(), errc::length_mismatch,
          "scores and labels must have equal length");
  require_two_classes(labels);

  const std::size_t n = scores.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return scores[a] < scores[b];
  });

  double total_normal = 0.0, total_anomaly = 0.0;
  for (int lbl : labels) (lbl == 1 ? total_normal : total_anomaly) += 1.0;

  // Sweep the threshold upward through the sorted scores.  With rule
  // "normal iff score > t", a threshold below everything classifies all as
  // normal: TNR = 0, TPR_normal = 1.  Each group of tied scores crossed
  // moves its members to the anomalous side.
  double anomalies_below = 0.0, normals_below = 0.0;
  double best = 0.5 * (anomalies_below / total_anomaly +
                       (total_normal - normals_below) / total_normal);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j < n && scores[order[j]] == scores[order[i]]) ++j;
    for (std::size_t k = i; k < j; ++k) {
      (labels[order[k]] == 0 ? anomalies_below : normals_below) += 1.0;
    }
    const double acc = 0.5 * (anomalies_below / total_anomaly +
                              (total_normal - normals_below) / total_normal);
    best = std::max(best, acc);
    i = j;
  }
  return best;
}

double balanced_accuracy_at_zero(const std::vector<double>& scores,
                                 const std::vector<int>& labels) {
  require(scores.size() == labels.size(), errc::length_mismatch,
          "scores and labels must have equal length");
  require_two_classes(labels);
  double anom_right = 0.0, anom_total = 0.0;
  double norm_right = 0.0, norm_total = 0.0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (labels[i] == 0) {
      anom_total += 1.0;
      if (scores[i] <= 0.0) anom_right += 1.0;
    } else {
      norm_total += 1.0;
      if (scores[i] > 0.0) norm_right += 1.0;
    }
  }
  return 0.5 * (anom_right / anom_total + norm_right / norm_total);
}

EvalReport evaluate(const AnyModel& model, const Dataset& data) {
  const ScoredDataset scored = score_dataset(model, data);
  require(!scored.scores.empty(), errc::too_few_samples,
          "evaluation needs at least one point");
  EvalReport report;
  report.n_eval = static_cast<int>(scored.scores.size());
  report.auc = roc_auc(scored.scores, scored.labels);

  // Positive class = anomalous; the native boundary flags score <= 0.
  double anom_flagged = 0.0, anom_total = 0.0;
  double norm_flagged = 0.0, norm_total = 0.0;
  for (std::size_t i = 0; i < scored.scores.size(); ++i) {
    const bool flagged = scored.scores[i] <= 0.0;
    if (scored.labels[i] == 0) {
      anom_total += 1.0;
      if (flagged) anom_flagged += 1.0;
    } else {
      norm_total += 1.0;
      if (flagged) norm_flagged += 1.0;
    }
  }
  report.tpr_at_zero = anom_flagged / anom_total;
  report.fpr_at_zero = norm_flagged / norm_total;

  if (std::holds_alternative<ThresholdGmmModel>(model)) {
    report.best_threshold_accuracy =
        best_threshold_accuracy(scored.scores, scored.labels);
  }
  return report;
}

DecisionGrid decision_grid(const AnyModel& model, double x_min, double x_max,
                           double y_min, double y_max, int resolution) {
  require(model_dim(model) == 2, errc::dimension_not_two,
          "decision grids require a two-dimensional model");
  require(resolution >= 2, errc::invalid_argument, "resolution must be >= 2");
  require(std::isfinite(x_min) && std::isfinite(x_max) &&
              std::isfinite(y_min) && std::isfinite(y_max) && x_min < x_max &&
              y_min < y_max,
          errc::invalid_argument, "grid ranges must be finite and non-empty");

  DecisionGrid grid;
  grid.x_min = x_min;
  grid.x_max = x_max;
  grid.y_min = y_min;
  grid.y_max = y_max;
  grid.resolution = resolution;
  grid.values.resize(resolution, resolution);

  const bool is_threshold = std::holds_alternative<ThresholdGmmModel>(model);
  const GmmParams* gmm =
      is_threshold ? &std::get<ThresholdGmmModel>(model).gmm : nullptr;
  Eigen::Vector2d x;
  for (int iy = 0; iy < resolution; ++iy) {
    x[1] = y_min + (y_max - y_min) * iy / (resolution - 1);
    for (int ix = 0; ix < resolution; ++ix) {
      x[0] = x_min + (x_max - x_min) * ix / (resolution - 1);
      // Threshold models plot the raw log-density surface (the contour the
      // threshold slices); the boundary model plots its decision value.
      grid.values(iy, ix) = is_threshold
                                ? mixture_log_pdf(*gmm, x)
                                : model_decision_value(model, x);
    }
  }
  return grid;
}

void write_grid_csv(const DecisionGrid& grid, std::ostream& sink) {
  require(grid.resolution >= 2 && grid.values.rows() == grid.resolution &&
              grid.values.cols() == grid.resolution,
          errc::invalid_argument, "grid is not fully populated");
  std::string buf;
  buf.reserve(1 << 16);
  buf += "x,y,value\n";
  for (int iy = 0; iy < grid.resolution; ++iy) {
    const double y =
        grid.y_min + (grid.y_max - grid.y_min) * iy / (grid.resolution - 1);
    for (int ix = 0; ix < grid.resolution; ++ix) {
      const double x =
          grid.x_min + (grid.x_max - grid.x_min) * ix / (grid.resolution - 1);
      append_number(buf, x);
      buf += ',';
      append_number(buf, y);
      buf += ',';
      append_number(buf, grid.values(iy, ix));
      buf += '\n';
      if (buf.size() > (1 << 16)) {
        sink.write(buf.data(), static_cast<std::streamsize>(buf.size()));
        buf.clear();
      }
    }
  }
  sink.write(buf.data(), static_cast<std::streamsize>(buf.size()));
  require(static_cast<bool>(sink), errc::io_error, "failed writing grid CSV");
}

void write_grid_csv_file(const DecisionGrid& grid, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  require(out.is_open(), errc::io_error, "cannot open for writing: " + path);
  write_grid_csv(grid, out);
  out.flush();
  require(static_cast<bool>(out), errc::io_error, "failed writing: " + path);
}

}  // namespace digmm
