// Command-line front end over the kinpred C API.
//
// Exit codes: 0 success, 1 input/usage error, 2 numerical failure.

#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <memory>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "kinpred/kinpred.h"

namespace {

constexpr const char* kConfigEnvVar = "KINPRED_CONFIG";

int exit_code_of(kinpred_status status) {
  if (status == KINPRED_OK) return 0;
  return status == KINPRED_ERR_NUMERIC ? 2 : 1;
}

int fail(kinpred_status status) {
  std::fprintf(stderr, "error: %s\n", kinpred_last_error());
  return exit_code_of(status);
}

struct ConfigDeleter {
  void operator()(kinpred_config* p) const { kinpred_config_free(p); }
};
struct SceneSetDeleter {
  void operator()(kinpred_scene_set* p) const { kinpred_scene_set_free(p); }
};
struct PredictionSetDeleter {
  void operator()(kinpred_prediction_set* p) const {
    kinpred_prediction_set_free(p);
  }
};
using ConfigPtr = std::unique_ptr<kinpred_config, ConfigDeleter>;
using SceneSetPtr = std::unique_ptr<kinpred_scene_set, SceneSetDeleter>;
using PredictionSetPtr =
    std::unique_ptr<kinpred_prediction_set, PredictionSetDeleter>;

struct OwnedString {
  char* value = nullptr;
  ~OwnedString() { kinpred_string_free(value); }
};

struct CommonOptions {
  std::string config_path;
  std::uint64_t seed = 0;
  bool seed_set = false;
  std::string view;
  bool no_interaction = false;
  int samples = 0;
  int workers = 0;
};

void add_common_options(CLI::App& cmd, CommonOptions& opts) {
  cmd.add_option("--config", opts.config_path,
                 "Config JSON (default: $" + std::string(kConfigEnvVar) +
                     " or built-in defaults)");
  cmd.add_option("--seed", opts.seed, "Master random seed")
      ->each([&opts](const std::string&) { opts.seed_set = true; });
  cmd.add_option("--view", opts.view, "Sensing mode: bird or driver")
      ->check(CLI::IsMember({"bird", "driver"}));
  cmd.add_flag("--no-interaction", opts.no_interaction,
               "Ignore surrounding vehicles (free-driving ablation)");
  cmd.add_option("--samples", opts.samples, "Trajectory samples per component")
      ->check(CLI::PositiveNumber);
  cmd.add_option("--workers", opts.workers, "Worker threads for batch commands")
      ->check(CLI::PositiveNumber);
}

/// Builds the effective config: file (flag, else env var, else defaults)
/// overridden by the explicit flags.
kinpred_status make_config(const CommonOptions& opts, ConfigPtr& out) {
  std::string path = opts.config_path;
  if (path.empty()) {
    const char* env = std::getenv(kConfigEnvVar);
    if (env != nullptr && env[0] != '\0') path = env;
  }
  kinpred_config* raw = nullptr;
  const kinpred_status status = path.empty()
                                    ? kinpred_config_default(&raw)
                                    : kinpred_config_load(path.c_str(), &raw);
  if (status != KINPRED_OK) return status;
  out.reset(raw);

  if (opts.seed_set) {
    const kinpred_status s = kinpred_config_set_seed(out.get(), opts.seed);
    if (s != KINPRED_OK) return s;
  }
  if (!opts.view.empty()) {
    const kinpred_status s = kinpred_config_set_view(out.get(), opts.view.c_str());
    if (s != KINPRED_OK) return s;
  }
  if (opts.no_interaction) {
    const kinpred_status s = kinpred_config_set_no_interaction(out.get(), 1);
    if (s != KINPRED_OK) return s;
  }
  if (opts.samples > 0) {
    const kinpred_status s = kinpred_config_set_samples(out.get(), opts.samples);
    if (s != KINPRED_OK) return s;
  }
  if (opts.workers > 0) {
    const kinpred_status s = kinpred_config_set_workers(out.get(), opts.workers);
    if (s != KINPRED_OK) return s;
  }
  return KINPRED_OK;
}

bool write_text(const std::string& path, const char* text) {
  if (path.empty()) {
    std::fputs(text, stdout);
    return true;
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << text;
  return static_cast<bool>(out);
}

int run_ingest(const CommonOptions& common, const std::string& dataset,
               const std::string& input, const std::string& meta,
               const std::string& output) {
  ConfigPtr cfg;
  kinpred_status status = make_config(common, cfg);
  if (status != KINPRED_OK) return fail(status);

  kinpred_scene_set* raw = nullptr;
  if (dataset == "ngsim") {
    status = kinpred_ingest_ngsim(cfg.get(), input.c_str(), &raw);
  } else if (dataset == "highd") {
    if (meta.empty()) {
      std::fprintf(stderr, "error: --meta is required for highd\n");
      return 1;
    }
    status = kinpred_ingest_highd(cfg.get(), input.c_str(), meta.c_str(), &raw);
  } else {
    status = kinpred_ingest_synthetic(cfg.get(), input.c_str(), &raw);
  }
  if (status != KINPRED_OK) return fail(status);
  SceneSetPtr scenes(raw);

  status = kinpred_scene_set_save(scenes.get(), output.c_str());
  if (status != KINPRED_OK) return fail(status);

  OwnedString manifest;
  if (kinpred_scene_set_manifest(scenes.get(), &manifest.value) == KINPRED_OK)
    std::fprintf(stderr, "ingested %s\n%s\n", input.c_str(), manifest.value);
  return 0;
}

int run_predict(const CommonOptions& common, const std::string& input,
                const std::string& output, std::string sidecar) {
  ConfigPtr cfg;
  kinpred_status status = make_config(common, cfg);
  if (status != KINPRED_OK) return fail(status);

  kinpred_scene_set* raw_scenes = nullptr;
  status = kinpred_scene_set_load(input.c_str(), &raw_scenes);
  if (status != KINPRED_OK) return fail(status);
  SceneSetPtr scenes(raw_scenes);

  kinpred_prediction_set* raw_preds = nullptr;
  status = kinpred_predict(cfg.get(), scenes.get(), &raw_preds);
  if (status != KINPRED_OK) return fail(status);
  PredictionSetPtr preds(raw_preds);

  status = kinpred_prediction_set_save(preds.get(), output.c_str());
  if (status != KINPRED_OK) return fail(status);

  int failures = 0;
  kinpred_prediction_set_failure_count(preds.get(), &failures);
  if (failures > 0) {
    if (sidecar.empty()) sidecar = output + ".failures.json";
    OwnedString text;
    status = kinpred_prediction_set_failures(preds.get(), &text.value);
    if (status != KINPRED_OK) return fail(status);
    if (!write_text(sidecar, text.value)) {
      std::fprintf(stderr, "error: cannot write %s\n", sidecar.c_str());
      return 1;
    }
    std::fprintf(stderr, "%d scene(s) failed; details in %s\n", failures,
                 sidecar.c_str());
  }
  return 0;
}

int run_evaluate(const CommonOptions& common, const std::string& predictions,
                 const std::string& truth, const std::string& dataset,
                 const std::string& output) {
  ConfigPtr cfg;
  kinpred_status status = make_config(common, cfg);
  if (status != KINPRED_OK) return fail(status);

  kinpred_scene_set* raw_truth = nullptr;
  status = kinpred_scene_set_load(truth.c_str(), &raw_truth);
  if (status != KINPRED_OK) return fail(status);
  SceneSetPtr scenes(raw_truth);

  kinpred_prediction_set* raw_preds = nullptr;
  status = kinpred_prediction_set_load(predictions.c_str(), &raw_preds);
  if (status != KINPRED_OK) return fail(status);
  PredictionSetPtr preds(raw_preds);

  OwnedString csv;
  status = kinpred_evaluate(cfg.get(), scenes.get(), preds.get(),
                            dataset.empty() ? nullptr : dataset.c_str(),
                            &csv.value);
  if (status != KINPRED_OK) return fail(status);

  if (!write_text(output, csv.value)) {
    std::fprintf(stderr, "error: cannot write %s\n", output.c_str());
    return 1;
  }
  return 0;
}

int run_plotdata(const std::string& input, const std::string& output) {
  std::ifstream in(input, std::ios::binary);
  if (!in) {
    std::fprintf(stderr, "error: cannot open %s\n", input.c_str());
    return 1;
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  const std::string text = buffer.str();

  const std::size_t first = text.find_first_not_of(" \t\r\n");
  OwnedString csv;
  kinpred_status status;
  if (first != std::string::npos && text[first] == '{') {
    kinpred_prediction_set* raw = nullptr;
    status = kinpred_prediction_set_load(input.c_str(), &raw);
    if (status != KINPRED_OK) return fail(status);
    PredictionSetPtr preds(raw);
    status = kinpred_plotdata_predictions(preds.get(), &csv.value);
  } else {
    status = kinpred_plotdata_metrics(text.c_str(), &csv.value);
  }
  if (status != KINPRED_OK) return fail(status);

  if (!write_text(output, csv.value)) {
    std::fprintf(stderr, "error: cannot write %s\n", output.c_str());
    return 1;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multi-modal highway trajectory prediction"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kinpred_version());

  CommonOptions common;

  auto* ingest = app.add_subcommand("ingest", "Convert a dataset to a scene archive");
  std::string dataset = "synthetic", input, meta, output;
  ingest->add_option("--dataset", dataset, "ngsim, highd or synthetic")
      ->check(CLI::IsMember({"ngsim", "highd", "synthetic"}));
  ingest->add_option("--input", input, "Dataset file (tracks CSV or scene JSON)")
      ->required();
  ingest->add_option("--meta", meta, "highD recordingMeta CSV");
  ingest->add_option("--output", output, "Scene archive path")->required();
  add_common_options(*ingest, common);

  auto* predict = app.add_subcommand("predict", "Predict every scene in an archive");
  std::string p_input, p_output, p_sidecar;
  predict->add_option("--input", p_input, "Scene archive")->required();
  predict->add_option("--output", p_output, "Prediction archive path")->required();
  predict->add_option("--sidecar", p_sidecar,
                      "Failure log path (default: <output>.failures.json)");
  add_common_options(*predict, common);

  auto* evaluate = app.add_subcommand("evaluate", "Score predictions against truth");
  std::string e_preds, e_truth, e_dataset, e_output;
  evaluate->add_option("--predictions", e_preds, "Prediction archive")->required();
  evaluate->add_option("--truth", e_truth, "Scene archive with ground truth")
      ->required();
  evaluate->add_option("--dataset", e_dataset, "Dataset label for the report");
  evaluate->add_option("--output", e_output, "Metric CSV path (default: stdout)");
  add_common_options(*evaluate, common);

  auto* plotdata = app.add_subcommand(
      "plotdata", "Flatten a metric CSV or prediction archive for plotting");
  std::string d_input, d_output;
  plotdata->add_option("--input", d_input, "Metric CSV or prediction archive")
      ->required();
  plotdata->add_option("--output", d_output, "Output CSV path (default: stdout)");

  CLI11_PARSE(app, argc, argv);

  if (ingest->parsed()) return run_ingest(common, dataset, input, meta, output);
  if (predict->parsed()) return run_predict(common, p_input, p_output, p_sidecar);
  if (evaluate->parsed())
    return run_evaluate(common, e_preds, e_truth, e_dataset, e_output);
  if (plotdata->parsed()) return run_plotdata(d_input, d_output);
  return 1;
}
