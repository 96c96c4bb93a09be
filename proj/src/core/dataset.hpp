#pragma once

#include <Eigen/Dense>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "core/errors.hpp"

namespace digmm {

// In-memory sample matrix (one row per point) with optional {0,1} labels
// (1 = normal, 0 = anomalous) and optional feature names.  Construction
// validates that every entry is finite and that label/name lengths match.
struct Dataset {
  Eigen::MatrixXd points;  // n x d
  std::optional<std::vector<int>> labels;
  std::optional<std::vector<std::string>> feature_names;

  static Dataset make(Eigen::MatrixXd points,
                      std::optional<std::vector<int>> labels = std::nullopt,
                      std::optional<std::vector<std::string>> feature_names =
                          std::nullopt);

  int rows() const { return static_cast<int>(points.rows()); }
  int cols() const { return static_cast<int>(points.cols()); }

  // Rows with label 1; errors with missing_labels when unlabeled.
  Dataset filter_normal() const;
};

// Reads the CSV dataset format: UTF-8, one header row, comma-separated
// decimal columns, and an optional final column named "label" holding 0/1.
// Errors carry 1-based row/column positions: parse_error for malformed
// fields, non_finite_value for NaN/inf entries, ragged_rows for uneven rows.
Dataset read_csv(std::istream& in);
Dataset read_csv_file(const std::string& path);

// Writes the same format; numbers are emitted as shortest round-trippable
// decimals, so write -> read reproduces the exact double values.
void write_csv(const Dataset& data, std::ostream& out);
void write_csv_file(const Dataset& data, const std::string& path);

}  // namespace digmm
