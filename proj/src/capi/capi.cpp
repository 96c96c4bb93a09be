#include "digmm/digmm.h"

#include <cstring>
#include <new>
#include <sstream>
#include <string>
#include <utility>

#include <nlohmann/json.hpp>

#include "core/detector.hpp"
#include "core/eval.hpp"
#include "core/model_io.hpp"
#include "core/scenario.hpp"

struct digmm_dataset {
  digmm::Dataset impl;
};

struct digmm_model {
  digmm::AnyModel impl;
};

namespace {

thread_local std::string t_last_error;

digmm_status fail(digmm_status status, const char* message) {
  t_last_error = message;
  return status;
}

// Runs `fn` and folds any exception into a status code + thread-local
// message.  digmm::Error codes map one-to-one onto digmm_status values.
template <typename Fn>
digmm_status guarded(Fn&& fn) {
  try {
    fn();
    return DIGMM_OK;
  } catch (const digmm::Error& e) {
    t_last_error = e.what();
    return static_cast<digmm_status>(static_cast<int>(e.code()));
  } catch (const std::bad_alloc&) {
    t_last_error = "out of memory";
    return DIGMM_ERR_UNKNOWN;
  } catch (const std::exception& e) {
    t_last_error = e.what();
    return DIGMM_ERR_UNKNOWN;
  } catch (...) {
    t_last_error = "unknown failure";
    return DIGMM_ERR_UNKNOWN;
  }
}

char* copy_string(const std::string& text) {
  char* out = new char[text.size() + 1];
  std::memcpy(out, text.data(), text.size() + 1);
  return out;
}

digmm::EmConfig em_config_from(const digmm_em_options* options) {
  digmm::EmConfig config;
  if (options) {
    config.max_iters = options->max_iters;
    config.rel_tol = options->rel_tol;
    config.n_init = options->n_init;
    config.reg_covar = options->reg_covar;
    config.seed = options->seed;
  }
  return config;
}

nlohmann::json metadata_json(const digmm::FitMetadata& md,
                             bool include_solver) {
  nlohmann::json doc;
  doc["seed"] = md.seed;
  doc["final_log_likelihood"] = md.final_log_likelihood;
  doc["em_iterations"] = md.em_iterations;
  doc["em_converged"] = md.em_converged;
  doc["restart_index"] = md.restart_index;
  if (include_solver) {
    doc["solver_converged"] = md.solver_converged;
    doc["solver_passes"] = md.solver_passes;
    doc["solver_violation"] = md.solver_violation;
    doc["solver_objective"] = md.solver_objective;
  }
  return doc;
}

}  // namespace

extern "C" {

const char* digmm_status_name(digmm_status status) {
  if (status == DIGMM_ERR_UNKNOWN) return "unknown";
  const int code = static_cast<int>(status);
  if (code < 0 || code > static_cast<int>(digmm::errc::io_error)) {
    return "unknown";
  }
  return digmm::errc_name(static_cast<digmm::errc>(code));
}

const char* digmm_last_error_message(void) { return t_last_error.c_str(); }

digmm_status digmm_dataset_from_arrays(const double* points, int64_t rows,
                                       int64_t cols,
                                       const int32_t* labels_or_null,
                                       digmm_dataset** out) {
  if (!points || !out || rows < 1 || cols < 1) {
    return fail(DIGMM_ERR_INVALID_ARGUMENT,
                "dataset_from_arrays: bad pointer or shape");
  }
  return guarded([&] {
    Eigen::MatrixXd m(rows, cols);
    for (int64_t i = 0; i < rows; ++i) {
      for (int64_t j = 0; j < cols; ++j) m(i, j) = points[i * cols + j];
    }
    std::optional<std::vector<int>> labels;
    if (labels_or_null) {
      labels.emplace(labels_or_null, labels_or_null + rows);
    }
    *out = new digmm_dataset{
        digmm::Dataset::make(std::move(m), std::move(labels))};
  });
}

digmm_status digmm_dataset_read_csv(const char* path, digmm_dataset** out) {
  if (!path || !out) {
    return fail(DIGMM_ERR_INVALID_ARGUMENT, "dataset_read_csv: NULL argument");
  }
  return guarded(
      [&] { *out = new digmm_dataset{digmm::read_csv_file(path)}; });
}

digmm_status digmm_dataset_write_csv(const digmm_dataset* data,
                                     const char* path) {
  if (!data || !path) {
    return fail(DIGMM_ERR_INVALID_ARGUMENT, "dataset_write_csv: NULL argument");
  }
  return guarded([&] { digmm::write_csv_file(data->impl, path); });
}

digmm_status digmm_dataset_csv_string(const digmm_dataset* data,
                                      char** out_csv) {
  if (!data || !out_csv) {
    return fail(DIGMM_ERR_INVALID_ARGUMENT, "dataset_csv_string: NULL argument");
  }
  return guarded([&] {
    std::ostringstream buffer;
    digmm::write_csv(data->impl, buffer);
    *out_csv = copy_string(buffer.str());
  });
}

digmm_status digmm_dataset_filter_normal(const digmm_dataset* data,
                                         digmm_dataset** out) {
  if (!data || !out) {
    return fail(DIGMM_ERR_INVALID_ARGUMENT, "filter_normal: NULL argument");
  }
  return guarded(
      [&] { *out = new digmm_dataset{data->impl.filter_normal()}; });
}

int64_t digmm_dataset_rows(const digmm_dataset* data) {
  return data ? data->impl.rows() : 0;
}

int64_t digmm_dataset_cols(const digmm_dataset* data) {
  return data ? data->impl.cols() : 0;
}

int digmm_dataset_has_labels(const digmm_dataset* data) {
  return data && data->impl.labels.has_value() ? 1 : 0;
}

digmm_status digmm_dataset_copy_points(const digmm_dataset* data,
                                       double* out_row_major) {
  if (!data || !out_row_major) {
    return fail(DIGMM_ERR_INVALID_ARGUMENT, "copy_points: NULL argument");
  }
  const Eigen::MatrixXd& m = data->impl.points;
  for (int i = 0; i < m.rows(); ++i) {
    for (int j = 0; j < m.cols(); ++j) {
      out_row_major[static_cast<int64_t>(i) * m.cols() + j] = m(i, j);
    }
  }
  return DIGMM_OK;
}

digmm_status digmm_dataset_copy_labels(const digmm_dataset* data,
                                       int32_t* out) {
  if (!data || !out) {
    return fail(DIGMM_ERR_INVALID_ARGUMENT, "copy_labels: NULL argument");
  }
  if (!data->impl.labels) {
    return fail(DIGMM_ERR_MISSING_LABELS, "dataset has no labels");
  }
  const auto& labels = *data->impl.labels;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    out[i] = static_cast<int32_t>(labels[i]);
  }
  return DIGMM_OK;
}

void digmm_dataset_free(digmm_dataset* data) { delete data; }

digmm_status digmm_preset_scenario_json(const char* name, char** out_json) {
  if (!name || !out_json) {
    return fail(DIGMM_ERR_INVALID_ARGUMENT, "preset_scenario: NULL argument");
  }
  return guarded([&] {
    digmm::require(std::string(name) == "paper-like",
                   digmm::errc::invalid_argument,
                   std::string("unknown preset: ") + name);
    *out_json = copy_string(
        digmm::scenario_to_json(digmm::paper_like_scenario()));
  });
}

digmm_status digmm_dataset_generate(const char* scenario_json,
                                    int override_seed, uint64_t seed,
                                    digmm_dataset** out) {
  if (!scenario_json || !out) {
    return fail(DIGMM_ERR_INVALID_ARGUMENT, "dataset_generate: NULL argument");
  }
  return guarded([&] {
    digmm::ScenarioSpec spec = digmm::scenario_from_json(scenario_json);
    if (override_seed) spec.seed = seed;
    *out = new digmm_dataset{digmm::generate_scenario(spec)};
  });
}

void digmm_em_options_init(digmm_em_options* options) {
  if (!options) return;
  const digmm::EmConfig defaults;
  options->max_iters = defaults.max_iters;
  options->rel_tol = defaults.rel_tol;
  options->n_init = defaults.n_init;
  options->reg_covar = defaults.reg_covar;
  options->seed = defaults.seed;
}

digmm_status digmm_fit_boundary(const digmm_dataset* data, int32_t components,
                                double nu,
                                const digmm_em_options* em_or_null,
                                double solver_tol, digmm_model** out) {
  if (!data || !out) {
    return fail(DIGMM_ERR_INVALID_ARGUMENT, "fit_boundary: NULL argument");
  }
  return guarded([&] {
    digmm::DigmmFitConfig config;
    config.components = components;
    config.nu = nu;
    config.em = em_config_from(em_or_null);
    config.solver_tol = solver_tol;
    *out = new digmm_model{digmm::fit_digmm(data->impl, config)};
  });
}

digmm_status digmm_fit_threshold_by_fpr(const digmm_dataset* data,
                                        int32_t components, double target_fpr,
                                        const digmm_em_options* em_or_null,
                                        digmm_model** out) {
  if (!data || !out) {
    return fail(DIGMM_ERR_INVALID_ARGUMENT, "fit_threshold: NULL argument");
  }
  return guarded([&] {
    digmm::ThresholdFitConfig config;
    config.components = components;
    config.target_fpr = target_fpr;
    config.em = em_config_from(em_or_null);
    *out = new digmm_model{digmm::fit_threshold_gmm(data->impl, config)};
  });
}

digmm_status digmm_fit_threshold_at(const digmm_dataset* data,
                                    int32_t components, double log_threshold,
                                    const digmm_em_options* em_or_null,
                                    digmm_model** out) {
  if (!data || !out) {
    return fail(DIGMM_ERR_INVALID_ARGUMENT, "fit_threshold: NULL argument");
  }
  return guarded([&] {
    *out = new digmm_model{digmm::fit_threshold_gmm(
        data->impl, components, em_config_from(em_or_null), log_threshold)};
  });
}

digmm_status digmm_model_save(const digmm_model* model, const char* path) {
  if (!model || !path) {
    return fail(DIGMM_ERR_INVALID_ARGUMENT, "model_save: NULL argument");
  }
  return guarded([&] { digmm::write_model_file(model->impl, path); });
}

digmm_status digmm_model_load(const char* path, digmm_model** out) {
  if (!path || !out) {
    return fail(DIGMM_ERR_INVALID_ARGUMENT, "model_load: NULL argument");
  }
  return guarded(
      [&] { *out = new digmm_model{digmm::read_model_file(path)}; });
}

const char* digmm_model_kind(const digmm_model* model) {
  return model ? digmm::model_kind_name(model->impl) : "";
}

int32_t digmm_model_dim(const digmm_model* model) {
  return model ? digmm::model_dim(model->impl) : 0;
}

digmm_status digmm_model_score(const digmm_model* model, const double* x,
                               int64_t dim, double* out_score) {
  if (!model || !x || !out_score || dim < 1) {
    return fail(DIGMM_ERR_INVALID_ARGUMENT, "model_score: bad argument");
  }
  return guarded([&] {
    digmm::require(dim == digmm::model_dim(model->impl),
                   digmm::errc::dimension_mismatch,
                   "point dimension does not match the model");
    Eigen::VectorXd v(dim);
    for (int64_t i = 0; i < dim; ++i) v[i] = x[i];
    *out_score = digmm::model_decision_value(model->impl, v);
  });
}

digmm_status digmm_model_score_dataset(const digmm_model* model,
                                       const digmm_dataset* data,
                                       double* out_scores) {
  if (!model || !data || !out_scores) {
    return fail(DIGMM_ERR_INVALID_ARGUMENT, "score_dataset: NULL argument");
  }
  return guarded([&] {
    digmm::require(data->impl.cols() == digmm::model_dim(model->impl),
                   digmm::errc::dimension_mismatch,
                   "data dimension does not match the model");
    for (int i = 0; i < data->impl.rows(); ++i) {
      out_scores[i] = digmm::model_decision_value(
          model->impl, data->impl.points.row(i).transpose());
    }
  });
}

digmm_status digmm_model_metadata_json(const digmm_model* model,
                                       char** out_json) {
  if (!model || !out_json) {
    return fail(DIGMM_ERR_INVALID_ARGUMENT, "metadata_json: NULL argument");
  }
  return guarded([&] {
    nlohmann::json doc;
    if (const auto* m = std::get_if<digmm::DigmmModel>(&model->impl)) {
      doc = metadata_json(m->metadata, true);
      doc["nu"] = m->nu;
      doc["support_count"] = m->support_idx.size();
      doc["margin_count"] = m->margin_idx.size();
    } else {
      const auto& t = std::get<digmm::ThresholdGmmModel>(model->impl);
      doc = metadata_json(t.metadata, false);
      doc["log_threshold"] = t.log_threshold;
    }
    *out_json = copy_string(doc.dump());
  });
}

void digmm_model_free(digmm_model* model) { delete model; }

digmm_status digmm_evaluate_json(const digmm_model* model,
                                 const digmm_dataset* data, char** out_json) {
  if (!model || !data || !out_json) {
    return fail(DIGMM_ERR_INVALID_ARGUMENT, "evaluate: NULL argument");
  }
  return guarded([&] {
    const digmm::EvalReport report = digmm::evaluate(model->impl, data->impl);
    nlohmann::json doc;
    doc["auc"] = report.auc;
    doc["tpr_at_zero"] = report.tpr_at_zero;
    doc["fpr_at_zero"] = report.fpr_at_zero;
    if (report.best_threshold_accuracy) {
      doc["best_threshold_accuracy"] = *report.best_threshold_accuracy;
    }
    doc["n_eval"] = report.n_eval;
    *out_json = copy_string(doc.dump());
  });
}

digmm_status digmm_grid_csv(const digmm_model* model, double x_min,
                            double x_max, double y_min, double y_max,
                            int32_t resolution, char** out_csv) {
  if (!model || !out_csv) {
    return fail(DIGMM_ERR_INVALID_ARGUMENT, "grid_csv: NULL argument");
  }
  return guarded([&] {
    const digmm::DecisionGrid grid = digmm::decision_grid(
        model->impl, x_min, x_max, y_min, y_max, resolution);
    std::ostringstream buffer;
    digmm::write_grid_csv(grid, buffer);
    *out_csv = copy_string(buffer.str());
  });
}

void digmm_string_free(char* text) { delete[] text; }

}  // extern "C"
