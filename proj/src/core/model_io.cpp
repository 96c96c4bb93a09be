#include "core/model_io.hpp"

#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "core/gaussian.hpp"
#include "core/util.hpp"

namespace digmm {

namespace {

using nlohmann::json;

constexpr const char* kFormatVersion = "1";
constexpr double kMarginBand = 1e-8;  // same band the solver uses

json vector_to_json(const Eigen::VectorXd& v) {
  json arr = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(v[i]);
  return arr;
}

json row_major_to_json(const Eigen::MatrixXd& m) {
  json arr = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) arr.push_back(m(r, c));
  }
  return arr;
}

json gmm_core_json(const GmmParams& params, const char* kind) {
  json doc;
  doc["format_version"] = kFormatVersion;
  doc["model_kind"] = kind;
  doc["d"] = params.dim();
  doc["m"] = params.component_count();
  json weights = json::array();
  for (double w : params.weights) weights.push_back(w);
  doc["weights"] = std::move(weights);
  json means = json::array();
  json covs = json::array();
  for (const auto& c : params.components) {
    means.push_back(vector_to_json(c.mean));
    covs.push_back(row_major_to_json(c.covariance));
  }
  doc["means"] = std::move(means);
  doc["covariances"] = std::move(covs);
  return doc;
}

json metadata_to_json(const FitMetadata& md) {
  json doc;
  doc["seed"] = md.seed;
  doc["final_log_likelihood"] = md.final_log_likelihood;
  doc["em_iterations"] = md.em_iterations;
  doc["em_converged"] = md.em_converged;
  doc["restart_index"] = md.restart_index;
  doc["solver_converged"] = md.solver_converged;
  doc["solver_passes"] = md.solver_passes;
  doc["solver_violation"] = md.solver_violation;
  doc["solver_objective"] = md.solver_objective;
  return doc;
}

json expect_key(const json& obj, const char* key) {
  require(obj.contains(key), errc::schema_error,
          std::string("missing key: ") + key);
  return obj.at(key);
}

void expect_only_keys(const json& obj,
                      std::initializer_list<const char*> keys) {
  for (const auto& [key, value] : obj.items()) {
    (void)value;
    bool known = false;
    for (const char* k : keys) {
      if (key == k) { known = true; break; }
    }
    require(known, errc::schema_error, "unknown key: " + key);
  }
}

double expect_number(const json& obj, const char* key) {
  const json v = expect_key(obj, key);
  require(v.is_number(), errc::schema_error,
          std::string(key) + " must be a number");
  return v.get<double>();
}

long expect_integer(const json& obj, const char* key) {
  const json v = expect_key(obj, key);
  require(v.is_number_integer(), errc::schema_error,
          std::string(key) + " must be an integer");
  return v.get<long>();
}

bool expect_bool(const json& obj, const char* key) {
  const json v = expect_key(obj, key);
  require(v.is_boolean(), errc::schema_error,
          std::string(key) + " must be a boolean");
  return v.get<bool>();
}

Eigen::VectorXd expect_vector(const json& arr, const char* what,
                              Eigen::Index size) {
  require(arr.is_array() && static_cast<Eigen::Index>(arr.size()) == size,
          errc::schema_error,
          std::string(what) + " has the wrong length");
  Eigen::VectorXd v(size);
  for (Eigen::Index i = 0; i < size; ++i) {
    const json& e = arr[static_cast<std::size_t>(i)];
    require(e.is_number(), errc::schema_error,
            std::string(what) + " entries must be numbers");
    v[i] = e.get<double>();
  }
  return v;
}

GmmParams gmm_from_json(const json& doc, int d, int m) {
  const json weights = expect_key(doc, "weights");
  const json means = expect_key(doc, "means");
  const json covs = expect_key(doc, "covariances");
  require(weights.is_array() && static_cast<int>(weights.size()) == m,
          errc::schema_error, "weights must hold m numbers");
  require(means.is_array() && static_cast<int>(means.size()) == m,
          errc::schema_error, "means must hold m vectors");
  require(covs.is_array() && static_cast<int>(covs.size()) == m,
          errc::schema_error, "covariances must hold m matrices");

  GmmParams params;
  params.weights.resize(m);
  params.components.reserve(static_cast<std::size_t>(m));
  for (int j = 0; j < m; ++j) {
    const json& wj = weights[static_cast<std::size_t>(j)];
    require(wj.is_number(), errc::schema_error,
            "weights entries must be numbers");
    params.weights[j] = wj.get<double>();
    const Eigen::VectorXd mean =
        expect_vector(means[static_cast<std::size_t>(j)], "means entry", d);
    const Eigen::VectorXd flat = expect_vector(
        covs[static_cast<std::size_t>(j)], "covariances entry",
        static_cast<Eigen::Index>(d) * d);
    const Eigen::MatrixXd cov = Eigen::Map<
        const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic,
                            Eigen::RowMajor>>(flat.data(), d, d);
    try {
      params.components.push_back(GaussianComponent::make(mean, cov));
    } catch (const Error& e) {
      raise(errc::invariant_violation,
            std::string("stored covariance rejected: ") + e.what());
    }
  }
  try {
    params.validate();
  } catch (const Error& e) {
    raise(errc::invariant_violation, e.what());
  }
  return params;
}

FitMetadata metadata_from_json(const json& doc) {
  require(doc.is_object(), errc::schema_error, "metadata must be an object");
  expect_only_keys(doc, {"seed", "final_log_likelihood", "em_iterations",
                         "em_converged", "restart_index", "solver_converged",
                         "solver_passes", "solver_violation",
                         "solver_objective"});
  FitMetadata md;
  const json seed = expect_key(doc, "seed");
  require(seed.is_number_integer(), errc::schema_error,
          "seed must be an integer");
  md.seed = seed.get<std::uint64_t>();
  md.final_log_likelihood = expect_number(doc, "final_log_likelihood");
  md.em_iterations = static_cast<int>(expect_integer(doc, "em_iterations"));
  md.em_converged = expect_bool(doc, "em_converged");
  md.restart_index = static_cast<int>(expect_integer(doc, "restart_index"));
  md.solver_converged = expect_bool(doc, "solver_converged");
  md.solver_passes = expect_integer(doc, "solver_passes");
  md.solver_violation = expect_number(doc, "solver_violation");
  md.solver_objective = expect_number(doc, "solver_objective");
  return md;
}

void write_json(const json& doc, std::ostream& sink) {
  sink << doc.dump(2) << '\n';
  require(static_cast<bool>(sink), errc::io_error,
          "failed writing model document");
}

}  // namespace

void write_model(const DigmmModel& model, std::ostream& sink) {
  model.validate();
  json doc = gmm_core_json(model.gmm, "digmm");
  doc["nu"] = model.nu;
  doc["alphas"] = vector_to_json(model.alphas);
  doc["weight_vector"] = vector_to_json(model.weight_vector);
  doc["rho"] = model.rho;
  doc["metadata"] = metadata_to_json(model.metadata);
  write_json(doc, sink);
}

void write_model(const ThresholdGmmModel& model, std::ostream& sink) {
  model.validate();
  json doc = gmm_core_json(model.gmm, "threshold_gmm");
  doc["log_threshold"] = model.log_threshold;
  doc["metadata"] = metadata_to_json(model.metadata);
  write_json(doc, sink);
}

void write_model(const AnyModel& model, std::ostream& sink) {
  std::visit([&sink](const auto& m) { write_model(m, sink); }, model);
}

void write_model_file(const AnyModel& model, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  require(out.is_open(), errc::io_error, "cannot open for writing: " + path);
  write_model(model, out);
  out.flush();
  require(static_cast<bool>(out), errc::io_error, "failed writing: " + path);
}

AnyModel read_model(std::istream& source) {
  json doc;
  try {
    doc = json::parse(source);
  } catch (const json::parse_error& e) {
    raise(errc::parse_error, std::string("model document: ") + e.what());
  }
  require(doc.is_object(), errc::schema_error,
          "model document must be a JSON object");

  const json version = expect_key(doc, "format_version");
  require(version.is_string(), errc::schema_error,
          "format_version must be a string");
  require(version.get<std::string>() == kFormatVersion, errc::version_error,
          "unsupported format_version: " + version.get<std::string>());

  const json kind = expect_key(doc, "model_kind");
  require(kind.is_string(), errc::schema_error,
          "model_kind must be a string");
  const std::string kind_name = kind.get<std::string>();

  const int d = static_cast<int>(expect_integer(doc, "d"));
  const int m = static_cast<int>(expect_integer(doc, "m"));
  require(d >= 1 && m >= 1, errc::schema_error,
          "d and m must be positive");

  if (kind_name == "digmm") {
    expect_only_keys(doc, {"format_version", "model_kind", "d", "m",
                           "weights", "means", "covariances", "nu", "alphas",
                           "weight_vector", "rho", "metadata"});
    DigmmModel model;
    model.gmm = gmm_from_json(doc, d, m);
    model.nu = expect_number(doc, "nu");
    const json alphas = expect_key(doc, "alphas");
    require(alphas.is_array() && !alphas.empty(), errc::schema_error,
            "alphas must be a non-empty array");
    model.alphas = expect_vector(alphas, "alphas",
                                 static_cast<Eigen::Index>(alphas.size()));
    model.weight_vector =
        expect_vector(expect_key(doc, "weight_vector"), "weight_vector", m);
    model.rho = expect_number(doc, "rho");
    model.metadata = metadata_from_json(expect_key(doc, "metadata"));

    // Support and margin sets are derived data; recompute them from the
    // stored dual weights with the same rule the solver applies.
    const int n = static_cast<int>(model.alphas.size());
    require(model.nu > 0.0 && model.nu <= 1.0, errc::invariant_violation,
            "nu must lie in (0, 1]");
    const double box = 1.0 / (model.nu * n);
    for (int i = 0; i < n; ++i) {
      if (model.alphas[i] > 0.0) model.support_idx.push_back(i);
      if (model.alphas[i] >= box * kMarginBand &&
          model.alphas[i] <= box * (1.0 - kMarginBand)) {
        model.margin_idx.push_back(i);
      }
    }
    try {
      model.validate();
    } catch (const Error& e) {
      if (e.code() == errc::invariant_violation) throw;
      raise(errc::invariant_violation, e.what());
    }
    return model;
  }
  if (kind_name == "threshold_gmm") {
    expect_only_keys(doc, {"format_version", "model_kind", "d", "m",
                           "weights", "means", "covariances", "log_threshold",
                           "metadata"});
    ThresholdGmmModel model;
    model.gmm = gmm_from_json(doc, d, m);
    model.log_threshold = expect_number(doc, "log_threshold");
    model.metadata = metadata_from_json(expect_key(doc, "metadata"));
    try {
      model.validate();
    } catch (const Error& e) {
      if (e.code() == errc::invariant_violation) throw;
      raise(errc::invariant_violation, e.what());
    }
    return model;
  }
  raise(errc::schema_error, "unknown model_kind: " + kind_name);
}

AnyModel read_model_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  require(in.is_open(), errc::io_error, "cannot open for reading: " + path);
  return read_model(in);
}

const char* model_kind_name(const AnyModel& model) noexcept {
  return std::holds_alternative<DigmmModel>(model) ? "digmm"
                                                   : "threshold_gmm";
}

int model_dim(const AnyModel& model) {
  return std::visit([](const auto& m) { return m.gmm.dim(); }, model);
}

double model_decision_value(const AnyModel& model, const Eigen::VectorXd& x) {
  return std::visit(
      [&x](const auto& m) { return decision_value(m, x); }, model);
}

Verdict model_classify(const AnyModel& model, const Eigen::VectorXd& x) {
  return std::visit([&x](const auto& m) { return classify(m, x); }, model);
}

}  // namespace digmm
