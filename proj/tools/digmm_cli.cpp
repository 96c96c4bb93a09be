// Command-line front end for the digmm shared library: synthesize benchmark
// data, fit detectors, score datasets, evaluate, and export decision grids.
//
// Exit codes: 0 success, 1 usage error, 2 data error, 3 numeric or
// convergence error.  stdout carries only data artifacts; all diagnostics
// go to stderr.

#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "CLI11.hpp"
#include "digmm/digmm.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitNumeric = 3;

int exit_code_for(digmm_status status) {
  switch (status) {
    case DIGMM_OK:
      return kExitOk;
    case DIGMM_ERR_NOT_POSITIVE_DEFINITE:
    case DIGMM_ERR_DEGENERATE_DATA:
    case DIGMM_ERR_INFEASIBLE:
    case DIGMM_ERR_NO_CONVERGENCE:
    case DIGMM_ERR_REJECTION_STALL:
    case DIGMM_ERR_UNKNOWN:
      return kExitNumeric;
    default:
      return kExitData;
  }
}

int report_failure(digmm_status status) {
  std::cerr << "error (" << digmm_status_name(status)
            << "): " << digmm_last_error_message() << "\n";
  return exit_code_for(status);
}

int usage_failure(const std::string& message) {
  std::cerr << "usage error: " << message << "\n";
  return kExitUsage;
}

struct DatasetDeleter {
  void operator()(digmm_dataset* p) const { digmm_dataset_free(p); }
};
struct ModelDeleter {
  void operator()(digmm_model* p) const { digmm_model_free(p); }
};
using DatasetPtr = std::unique_ptr<digmm_dataset, DatasetDeleter>;
using ModelPtr = std::unique_ptr<digmm_model, ModelDeleter>;

// Owns a char* returned by the library.
class LibString {
 public:
  LibString() = default;
  ~LibString() { digmm_string_free(text_); }
  LibString(const LibString&) = delete;
  LibString& operator=(const LibString&) = delete;
  char** out() { return &text_; }
  const char* get() const { return text_ ? text_ : ""; }

 private:
  char* text_ = nullptr;
};

std::string format_double(double v) {
  if (std::isinf(v)) return v < 0 ? "-inf" : "inf";
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

// Writes `text` to `path`, or to stdout when path is empty.
int emit_text(const std::string& path, const std::string& text) {
  if (path.empty()) {
    std::cout << text;
    std::cout.flush();
    if (!std::cout) {
      std::cerr << "error (io_error): failed writing to stdout\n";
      return kExitData;
    }
    return kExitOk;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out.is_open()) {
    std::cerr << "error (io_error): cannot open for writing: " << path << "\n";
    return kExitData;
  }
  out << text;
  out.flush();
  if (!out) {
    std::cerr << "error (io_error): failed writing: " << path << "\n";
    return kExitData;
  }
  return kExitOk;
}

int load_dataset(const std::string& path, DatasetPtr* out) {
  digmm_dataset* raw = nullptr;
  const digmm_status status = digmm_dataset_read_csv(path.c_str(), &raw);
  if (status != DIGMM_OK) return report_failure(status);
  out->reset(raw);
  return kExitOk;
}

int load_model(const std::string& path, ModelPtr* out) {
  digmm_model* raw = nullptr;
  const digmm_status status = digmm_model_load(path.c_str(), &raw);
  if (status != DIGMM_OK) return report_failure(status);
  out->reset(raw);
  return kExitOk;
}

// ---- synth ----------------------------------------------------------------

struct SynthArgs {
  std::string spec_path;
  std::string preset;
  std::uint64_t seed = 0;
  bool seed_given = false;
  std::string out_path;
};

int run_synth(const SynthArgs& args) {
  if (args.spec_path.empty() == args.preset.empty()) {
    return usage_failure("synth needs exactly one of --spec or --preset");
  }
  std::string spec_json;
  if (!args.preset.empty()) {
    LibString preset;
    const digmm_status status =
        digmm_preset_scenario_json(args.preset.c_str(), preset.out());
    if (status == DIGMM_ERR_INVALID_ARGUMENT) {
      return usage_failure(digmm_last_error_message());
    }
    if (status != DIGMM_OK) return report_failure(status);
    spec_json = preset.get();
  } else {
    std::ifstream in(args.spec_path, std::ios::binary);
    if (!in.is_open()) {
      std::cerr << "error (io_error): cannot open spec file: "
                << args.spec_path << "\n";
      return kExitData;
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    spec_json = buffer.str();
  }

  digmm_dataset* raw = nullptr;
  const digmm_status status = digmm_dataset_generate(
      spec_json.c_str(), args.seed_given ? 1 : 0, args.seed, &raw);
  if (status != DIGMM_OK) return report_failure(status);
  DatasetPtr data(raw);

  std::cerr << "generated " << digmm_dataset_rows(data.get()) << " points in "
            << digmm_dataset_cols(data.get()) << " dimensions\n";
  if (!args.out_path.empty()) {
    const digmm_status write_status =
        digmm_dataset_write_csv(data.get(), args.out_path.c_str());
    if (write_status != DIGMM_OK) return report_failure(write_status);
    return kExitOk;
  }
  LibString csv;
  const digmm_status csv_status =
      digmm_dataset_csv_string(data.get(), csv.out());
  if (csv_status != DIGMM_OK) return report_failure(csv_status);
  return emit_text("", csv.get());
}

// ---- fit --------------------------------------------------------------------

struct FitArgs {
  std::string data_path;
  std::string detector;
  int components = 1;
  double nu = 0.5;
  bool nu_given = false;
  double log_threshold = 0.0;
  bool log_threshold_given = false;
  double target_fpr = 0.001;
  bool target_fpr_given = false;
  std::uint64_t seed = 0;
  std::string out_path;
};

int run_fit(const FitArgs& args) {
  if (args.detector != "digmm" && args.detector != "threshold-gmm") {
    return usage_failure("--detector must be digmm or threshold-gmm");
  }
  if (args.components < 1) return usage_failure("--m must be >= 1");
  const bool is_digmm = args.detector == "digmm";
  if (is_digmm) {
    if (args.log_threshold_given || args.target_fpr_given) {
      return usage_failure(
          "--log-threshold/--target-fpr apply to threshold-gmm only");
    }
    if (!(args.nu > 0.0 && args.nu <= 1.0)) {
      return usage_failure("--nu must lie in (0, 1]");
    }
  } else {
    if (args.nu_given) {
      return usage_failure("--nu applies to digmm only");
    }
    if (args.log_threshold_given && args.target_fpr_given) {
      return usage_failure(
          "give at most one of --log-threshold and --target-fpr");
    }
    if (args.log_threshold_given && !std::isfinite(args.log_threshold)) {
      return usage_failure("--log-threshold must be finite");
    }
    if (!args.log_threshold_given &&
        !(args.target_fpr > 0.0 && args.target_fpr < 1.0)) {
      return usage_failure("--target-fpr must lie in (0, 1)");
    }
  }

  DatasetPtr data;
  if (const int code = load_dataset(args.data_path, &data)) return code;

  // Training is all-normal: labeled files are filtered to label-1 rows.
  if (digmm_dataset_has_labels(data.get())) {
    digmm_dataset* filtered = nullptr;
    const digmm_status status =
        digmm_dataset_filter_normal(data.get(), &filtered);
    if (status != DIGMM_OK) return report_failure(status);
    const int64_t dropped =
        digmm_dataset_rows(data.get()) - digmm_dataset_rows(filtered);
    data.reset(filtered);
    std::cerr << "training on " << digmm_dataset_rows(data.get())
              << " normal rows (" << dropped << " anomalous rows dropped)\n";
  }

  digmm_em_options em;
  digmm_em_options_init(&em);
  em.seed = args.seed;

  digmm_model* raw = nullptr;
  digmm_status status;
  if (is_digmm) {
    status = digmm_fit_boundary(data.get(), args.components, args.nu, &em,
                                1e-6, &raw);
  } else if (args.log_threshold_given) {
    status = digmm_fit_threshold_at(data.get(), args.components,
                                    args.log_threshold, &em, &raw);
  } else {
    status = digmm_fit_threshold_by_fpr(data.get(), args.components,
                                        args.target_fpr, &em, &raw);
  }
  if (status != DIGMM_OK) return report_failure(status);
  ModelPtr model(raw);

  LibString metadata;
  if (digmm_model_metadata_json(model.get(), metadata.out()) == DIGMM_OK) {
    std::cerr << "fit summary: " << metadata.get() << "\n";
  }

  const digmm_status save_status =
      digmm_model_save(model.get(), args.out_path.c_str());
  if (save_status != DIGMM_OK) return report_failure(save_status);
  std::cerr << "model written to " << args.out_path << "\n";
  return kExitOk;
}

// ---- detect -----------------------------------------------------------------

struct DetectArgs {
  std::string model_path;
  std::string data_path;
  std::string out_path;
};

int run_detect(const DetectArgs& args) {
  ModelPtr model;
  if (const int code = load_model(args.model_path, &model)) return code;
  DatasetPtr data;
  if (const int code = load_dataset(args.data_path, &data)) return code;

  const int64_t rows = digmm_dataset_rows(data.get());
  std::vector<double> scores(static_cast<std::size_t>(rows));
  const digmm_status status =
      digmm_model_score_dataset(model.get(), data.get(), scores.data());
  if (status != DIGMM_OK) return report_failure(status);

  std::string csv = "index,score,label\n";
  for (int64_t i = 0; i < rows; ++i) {
    const double s = scores[static_cast<std::size_t>(i)];
    csv += std::to_string(i);
    csv += ',';
    csv += format_double(s);
    csv += ',';
    csv += s > 0.0 ? "normal" : "anomalous";
    csv += '\n';
  }
  return emit_text(args.out_path, csv);
}

// ---- eval --------------------------------------------------------------------

struct EvalArgs {
  std::vector<std::string> model_paths;
  std::string data_path;
  std::string out_path;
};

int run_eval(const EvalArgs& args) {
  DatasetPtr data;
  if (const int code = load_dataset(args.data_path, &data)) return code;

  std::string text;
  nlohmann::json digmm_report, threshold_report;
  int digmm_count = 0, threshold_count = 0;
  for (const std::string& path : args.model_paths) {
    ModelPtr model;
    if (const int code = load_model(path, &model)) return code;
    LibString report_json;
    const digmm_status status =
        digmm_evaluate_json(model.get(), data.get(), report_json.out());
    if (status != DIGMM_OK) return report_failure(status);

    const std::string kind = digmm_model_kind(model.get());
    nlohmann::json line;
    line["model"] = path;
    line["model_kind"] = kind;
    line["report"] = nlohmann::json::parse(report_json.get());
    text += line.dump();
    text += '\n';
    if (kind == "digmm") {
      digmm_report = line["report"];
      ++digmm_count;
    } else {
      threshold_report = line["report"];
      ++threshold_count;
    }
  }

  // With one model of each kind, add the head-to-head deltas
  // (boundary detector minus threshold detector).
  if (digmm_count == 1 && threshold_count == 1) {
    auto balanced = [](const nlohmann::json& report) {
      return 0.5 * (report.at("tpr_at_zero").get<double>() +
                    (1.0 - report.at("fpr_at_zero").get<double>()));
    };
    nlohmann::json comparison;
    comparison["auc_delta"] = digmm_report.at("auc").get<double>() -
                              threshold_report.at("auc").get<double>();
    comparison["balanced_accuracy_at_zero_delta"] =
        balanced(digmm_report) - balanced(threshold_report);
    nlohmann::json line;
    line["comparison"] = std::move(comparison);
    text += line.dump();
    text += '\n';
  }
  return emit_text(args.out_path, text);
}

// ---- grid --------------------------------------------------------------------

struct GridArgs {
  std::string model_path;
  double x_min = 0.0, x_max = 0.0;
  double y_min = 0.0, y_max = 0.0;
  int resolution = 200;
  std::string out_path;
};

int run_grid(const GridArgs& args) {
  if (args.resolution < 2) return usage_failure("--resolution must be >= 2");
  if (!(args.x_min < args.x_max) || !(args.y_min < args.y_max)) {
    return usage_failure("grid ranges must satisfy min < max");
  }
  ModelPtr model;
  if (const int code = load_model(args.model_path, &model)) return code;

  LibString csv;
  const digmm_status status =
      digmm_grid_csv(model.get(), args.x_min, args.x_max, args.y_min,
                     args.y_max, args.resolution, csv.out());
  if (status != DIGMM_OK) return report_failure(status);
  return emit_text(args.out_path, csv.get());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "digmm: mixture-based anomaly detection with a discriminative "
      "one-class boundary"};
  app.require_subcommand(1);

  SynthArgs synth;
  CLI::App* synth_cmd =
      app.add_subcommand("synth", "Generate a synthetic labeled dataset");
  synth_cmd->add_option("--spec", synth.spec_path,
                        "Scenario description file (JSON)");
  synth_cmd->add_option("--preset", synth.preset,
                        "Built-in scenario name (paper-like)");
  CLI::Option* synth_seed =
      synth_cmd->add_option("--seed", synth.seed, "Override the scenario seed");
  synth_cmd->add_option("--out", synth.out_path,
                        "Output CSV path (default: stdout)");

  FitArgs fit;
  CLI::App* fit_cmd = app.add_subcommand("fit", "Fit a detector to a dataset");
  fit_cmd->add_option("--data", fit.data_path, "Training CSV")->required();
  fit_cmd->add_option("--detector", fit.detector,
                      "Detector kind: digmm | threshold-gmm")
      ->required();
  fit_cmd->add_option("--m", fit.components, "Number of mixture components");
  CLI::Option* nu_opt =
      fit_cmd->add_option("--nu", fit.nu, "Outlier budget in (0, 1] (digmm)");
  CLI::Option* log_threshold_opt = fit_cmd->add_option(
      "--log-threshold", fit.log_threshold,
      "Explicit log-density threshold (threshold-gmm)");
  CLI::Option* target_fpr_opt = fit_cmd->add_option(
      "--target-fpr", fit.target_fpr,
      "Training false-positive rate for threshold placement (threshold-gmm)");
  fit_cmd->add_option("--seed", fit.seed, "Fit seed");
  fit_cmd->add_option("--out", fit.out_path, "Output model path")->required();

  DetectArgs detect;
  CLI::App* detect_cmd =
      app.add_subcommand("detect", "Score a dataset with a fitted model");
  detect_cmd->add_option("--model", detect.model_path, "Model file")
      ->required();
  detect_cmd->add_option("--data", detect.data_path, "Input CSV")->required();
  detect_cmd->add_option("--out", detect.out_path,
                         "Output CSV path (default: stdout)");

  EvalArgs eval;
  CLI::App* eval_cmd =
      app.add_subcommand("eval", "Evaluate models on a labeled dataset");
  eval_cmd
      ->add_option("--model", eval.model_paths,
                   "Model file (repeat to compare)")
      ->required();
  eval_cmd->add_option("--data", eval.data_path, "Labeled CSV")->required();
  eval_cmd->add_option("--out", eval.out_path,
                       "Output path (default: stdout)");

  GridArgs grid;
  CLI::App* grid_cmd =
      app.add_subcommand("grid", "Export a decision-surface grid as CSV");
  grid_cmd->add_option("--model", grid.model_path, "Model file")->required();
  grid_cmd->add_option("--xmin", grid.x_min, "Grid x minimum")->required();
  grid_cmd->add_option("--xmax", grid.x_max, "Grid x maximum")->required();
  grid_cmd->add_option("--ymin", grid.y_min, "Grid y minimum")->required();
  grid_cmd->add_option("--ymax", grid.y_max, "Grid y maximum")->required();
  grid_cmd->add_option("--resolution", grid.resolution,
                       "Nodes per axis (default 200)");
  grid_cmd->add_option("--out", grid.out_path,
                       "Output CSV path (default: stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  synth.seed_given = synth_seed->count() > 0;
  fit.nu_given = nu_opt->count() > 0;
  fit.log_threshold_given = log_threshold_opt->count() > 0;
  fit.target_fpr_given = target_fpr_opt->count() > 0;

  try {
    if (synth_cmd->parsed()) return run_synth(synth);
    if (fit_cmd->parsed()) return run_fit(fit);
    if (detect_cmd->parsed()) return run_detect(detect);
    if (eval_cmd->parsed()) return run_eval(eval);
    if (grid_cmd->parsed()) return run_grid(grid);
  } catch (const std::exception& e) {
    std::cerr << "error (unknown): " << e.what() << "\n";
    return kExitNumeric;
  }
  return kExitUsage;
}
