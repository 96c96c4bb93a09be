#pragma once

#include <iosfwd>
#include <string>
#include <variant>

#include "core/detector.hpp"

// Canonical model persistence: a single JSON document with top-level fields
//   format_version ("1"), model_kind ("digmm" | "threshold_gmm"),
//   d, m, weights, means, covariances (row-major per component),
// plus, for digmm: nu, alphas, weight_vector, rho, metadata;
// for threshold_gmm: log_threshold, metadata.
// Numbers are written as shortest round-trippable decimals.  Readers check
// the schema strictly (unknown or missing keys fail), check the version,
// and re-validate every type invariant.

namespace digmm {

using AnyModel = std::variant<DigmmModel, ThresholdGmmModel>;

void write_model(const DigmmModel& model, std::ostream& sink);
void write_model(const ThresholdGmmModel& model, std::ostream& sink);
void write_model(const AnyModel& model, std::ostream& sink);
void write_model_file(const AnyModel& model, const std::string& path);

// Errors: schema_error (unknown/missing field or wrong type), version_error
// (format_version other than "1"), invariant_violation (stored values fail
// the model invariants, e.g. weights not summing to one or a covariance
// that is not positive definite).
AnyModel read_model(std::istream& source);
AnyModel read_model_file(const std::string& path);

const char* model_kind_name(const AnyModel& model) noexcept;
int model_dim(const AnyModel& model);
double model_decision_value(const AnyModel& model, const Eigen::VectorXd& x);
Verdict model_classify(const AnyModel& model, const Eigen::VectorXd& x);

}  // namespace digmm
