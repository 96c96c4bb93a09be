#include "core/dataset.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <utility>

#include "core/util.hpp"

namespace digmm {

namespace {

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(',', start);
    if (pos == std::string::npos) {
      fields.push_back(line.substr(start));
      break;
    }
    fields.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
  return fields;
}

double parse_double_field(const std::string& field, int row, int col) {
  double value = 0.0;
  const char* begin = field.data();
  const char* end = begin + field.size();
  const auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end || field.empty()) {
    raise(errc::parse_error, "malformed number at row " + std::to_string(row) +
                                 ", column " + std::to_string(col));
  }
  if (!std::isfinite(value)) {
    raise(errc::non_finite_value,
          "non-finite value at row " + std::to_string(row) + ", column " +
              std::to_string(col));
  }
  return value;
}

void append_double(std::string& out, double value) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value);
  out.append(buf, res.ptr);
}

}  // namespace

Dataset Dataset::make(Eigen::MatrixXd points,
                      std::optional<std::vector<int>> labels,
                      std::optional<std::vector<std::string>> feature_names) {
  require(all_finite(points), errc::non_finite_value,
          "dataset entries must be finite");
  if (labels) {
    require(static_cast<Eigen::Index>(labels->size()) == points.rows(),
            errc::length_mismatch,
            "label count must equal the number of rows");
    for (int v : *labels) {
      require(v == 0 || v == 1, errc::invalid_argument,
              "labels must be 0 (anomalous) or 1 (normal)");
    }
  }
  if (feature_names) {
    require(static_cast<Eigen::Index>(feature_names->size()) == points.cols(),
            errc::length_mismatch,
            "feature name count must equal the number of columns");
  }
  Dataset d;
  d.points = std::move(points);
  d.labels = std::move(labels);
  d.feature_names = std::move(feature_names);
  return d;
}

Dataset Dataset::filter_normal() const {
  require(labels.has_value(), errc::missing_labels,
          "filtering by label requires a labeled dataset");
  std::vector<int> keep;
  for (std::size_t i = 0; i < labels->size(); ++i) {
    if ((*labels)[i] == 1) keep.push_back(static_cast<int>(i));
  }
  Eigen::MatrixXd pts(static_cast<Eigen::Index>(keep.size()), points.cols());
  for (std::size_t i = 0; i < keep.size(); ++i) {
    pts.row(static_cast<Eigen::Index>(i)) = points.row(keep[i]);
  }
  return Dataset::make(std::move(pts), std::nullopt, feature_names);
}

Dataset read_csv(std::istream& in) {
  std::string line;
  int row = 0;

  auto next_line = [&](std::string& out) {
    if (!std::getline(in, out)) return false;
    ++row;
    if (!out.empty() && out.back() == '\r') out.pop_back();  // CRLF input
    return true;
  };

  if (!next_line(line)) {
    raise(errc::parse_error, "empty input: missing header at row 1");
  }
  // Strip a UTF-8 byte-order mark if present.
  if (line.rfind("\xEF\xBB\xBF", 0) == 0) line.erase(0, 3);

  std::vector<std::string> header = split_fields(line);
  const bool has_labels = !header.empty() && header.back() == "label";
  const int n_cols = static_cast<int>(header.size());
  const int d = has_labels ? n_cols - 1 : n_cols;
  require(d >= 1, errc::parse_error, "header must name at least one feature");

  std::vector<std::string> names(header.begin(), header.begin() + d);
  std::vector<double> values;
  std::vector<int> labels;
  int n = 0;

  while (next_line(line)) {
    if (line.empty() && in.peek() == std::char_traits<char>::eof()) {
      break;  // tolerate a single trailing newline
    }
    const std::vector<std::string> fields = split_fields(line);
    if (static_cast<int>(fields.size()) != n_cols) {
      raise(errc::ragged_rows,
            "row " + std::to_string(row) + " has " +
                std::to_string(fields.size()) + " fields, expected " +
                std::to_string(n_cols));
    }
    for (int c = 0; c < d; ++c) {
      values.push_back(parse_double_field(fields[c], row, c + 1));
    }
    if (has_labels) {
      const std::string& f = fields[n_cols - 1];
      if (f == "0") {
        labels.push_back(0);
      } else if (f == "1") {
        labels.push_back(1);
      } else {
        raise(errc::parse_error, "label must be 0 or 1 at row " +
                                     std::to_string(row) + ", column " +
                                     std::to_string(n_cols));
      }
    }
    ++n;
  }

  Eigen::MatrixXd points(n, d);
  for (int i = 0; i < n; ++i) {
    for (int c = 0; c < d; ++c) points(i, c) = values[i * d + c];
  }
  return Dataset::make(std::move(points),
                       has_labels ? std::optional(std::move(labels))
                                  : std::nullopt,
                       std::move(names));
}

Dataset read_csv_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  require(in.good(), errc::io_error, "cannot open file: " + path);
  return read_csv(in);
}

void write_csv(const Dataset& data, std::ostream& out) {
  const int d = data.cols();
  std::string buf;
  for (int c = 0; c < d; ++c) {
    if (c) buf += ',';
    buf += data.feature_names ? (*data.feature_names)[c]
                              : "x" + std::to_string(c + 1);
  }
  if (data.labels) buf += ",label";
  buf += '\n';
  for (int i = 0; i < data.rows(); ++i) {
    for (int c = 0; c < d; ++c) {
      if (c) buf += ',';
      append_double(buf, data.points(i, c));
    }
    if (data.labels) {
      buf += ',';
      buf += (*data.labels)[i] ? '1' : '0';
    }
    buf += '\n';
  }
  out << buf;
  require(out.good(), errc::io_error, "failed writing CSV output");
}

void write_csv_file(const Dataset& data, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  require(out.good(), errc::io_error, "cannot open file for writing: " + path);
  write_csv(data, out);
}

}  // namespace digmm
