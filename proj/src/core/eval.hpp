#pragma once

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "core/dataset.hpp"
#include "core/model_io.hpp"

// Quantitative comparison of detectors plus decision-grid export for
// contour plotting.  Scores follow the shared convention: larger = more
// normal, with the native boundary at zero (anomalous iff score <= 0).
// The positive class for TPR/FPR is "anomalous".

namespace digmm {

struct EvalReport {
  double auc = 0.0;
  double tpr_at_zero = 0.0;
  double fpr_at_zero = 0.0;
  std::optional<double> best_threshold_accuracy;  // baseline models only
  int n_eval = 0;
};

struct ScoredDataset {
  std::vector<double> scores;  // row order preserved
  std::vector<int> labels;     // 1 = normal, 0 = anomalous
};

// Errors: missing_labels; dimension_mismatch when the model dimension does
// not match the data.
ScoredDataset score_dataset(const AnyModel& model, const Dataset& data);

// Area under the ROC curve by the rank statistic, treating the anomalous
// class (label 0) as the one the detector should score lower: the returned
// value is the probability that a random normal point outranks a random
// anomaly, ties counted one half.  Errors: single_class.
double roc_auc(const std::vector<double>& scores,
               const std::vector<int>& labels);

// Maximum balanced accuracy over all thresholds placed between consecutive
// distinct scores (plus the two infinite ends), for the decision rule
// "normal iff score > threshold".  Errors: single_class.
double best_threshold_accuracy(const std::vector<double>& scores,
                               const std::vector<int>& labels);

// Balanced accuracy of the rule "normal iff score > 0".
double balanced_accuracy_at_zero(const std::vector<double>& scores,
                                 const std::vector<int>& labels);

// Full report; best_threshold_accuracy is filled for threshold models only.
EvalReport evaluate(const AnyModel& model, const Dataset& data);

struct DecisionGrid {
  double x_min = 0.0, x_max = 0.0;
  double y_min = 0.0, y_max = 0.0;
  int resolution = 0;
  Eigen::MatrixXd values;  // values(iy, ix); -inf marks density underflow
};

// Evaluates the model over a regular grid: the boundary model contributes
// its decision value f(x, y); the threshold model contributes the mixture
// log-density itself (the contour surface, not the thresholded score).
// Errors: dimension_not_two; invalid_argument for resolution < 2 or an
// empty range.
DecisionGrid decision_grid(const AnyModel& model, double x_min, double x_max,
                           double y_min, double y_max, int resolution);

// CSV with header x,y,value; y varies slowest.  -inf is written literally
// as "-inf".
void write_grid_csv(const DecisionGrid& grid, std::ostream& sink);
void write_grid_csv_file(const DecisionGrid& grid, const std::string& path);

}  // namespace digmm
