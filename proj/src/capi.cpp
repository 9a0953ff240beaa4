#include "kinpred/kinpred.h"

#include <cstring>
#include <new>
#include <string>

#include "config.hpp"
#include "data_io.hpp"
#include "engine.hpp"
#include "errors.hpp"

struct kinpred_config {
  kinpred::RunConfig cfg;
};

struct kinpred_scene_set {
  kinpred::SceneArchive archive;
};

struct kinpred_prediction_set {
  kinpred::BatchPrediction batch;
};

namespace {

thread_local std::string g_last_error;

void set_error(const std::string& message) { g_last_error = message; }

kinpred_status status_of(const std::exception& e) {
  set_error(e.what());
  if (dynamic_cast<const kinpred::NumericError*>(&e) != nullptr)
    return KINPRED_ERR_NUMERIC;
  if (dynamic_cast<const kinpred::ParseError*>(&e) != nullptr)
    return KINPRED_ERR_PARSE;
  if (dynamic_cast<const kinpred::InvalidInput*>(&e) != nullptr)
    return KINPRED_ERR_INVALID_ARGUMENT;
  return KINPRED_ERR_INTERNAL;
}

/// Runs fn inside the standard exception-to-status translation.
template <typename Fn>
kinpred_status guarded(Fn&& fn) {
  try {
    fn();
    return KINPRED_OK;
  } catch (const std::bad_alloc&) {
    set_error("out of memory");
    return KINPRED_ERR_INTERNAL;
  } catch (const std::exception& e) {
    return status_of(e);
  } catch (...) {
    set_error("unknown error");
    return KINPRED_ERR_INTERNAL;
  }
}

kinpred_status require(bool ok, const char* message) {
  if (ok) return KINPRED_OK;
  set_error(message);
  return KINPRED_ERR_INVALID_ARGUMENT;
}

char* copy_string(const std::string& s) {
  char* out = new char[s.size() + 1];
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

}  // namespace

extern "C" {

const char* kinpred_last_error(void) { return g_last_error.c_str(); }

const char* kinpred_version(void) { return KINPRED_VERSION_STRING; }

void kinpred_string_free(char* s) { delete[] s; }

kinpred_status kinpred_config_default(kinpred_config** out) {
  if (require(out != nullptr, "out must not be null") != KINPRED_OK)
    return KINPRED_ERR_INVALID_ARGUMENT;
  return guarded([&] { *out = new kinpred_config{}; });
}

kinpred_status kinpred_config_load(const char* path, kinpred_config** out) {
  if (require(path != nullptr && out != nullptr,
              "path and out must not be null") != KINPRED_OK)
    return KINPRED_ERR_INVALID_ARGUMENT;
  return guarded([&] {
    kinpred::RunConfig cfg = kinpred::load_config_file(path);
    *out = new kinpred_config{std::move(cfg)};
  });
}

kinpred_status kinpred_config_save(const kinpred_config* cfg, const char* path) {
  if (require(cfg != nullptr && path != nullptr,
              "cfg and path must not be null") != KINPRED_OK)
    return KINPRED_ERR_INVALID_ARGUMENT;
  return guarded([&] { kinpred::save_config_file(cfg->cfg, path); });
}

kinpred_status kinpred_config_to_json(const kinpred_config* cfg, char** out) {
  if (require(cfg != nullptr && out != nullptr,
              "cfg and out must not be null") != KINPRED_OK)
    return KINPRED_ERR_INVALID_ARGUMENT;
  return guarded(
      [&] { *out = copy_string(kinpred::config_to_json(cfg->cfg).dump(2)); });
}

kinpred_status kinpred_config_set_seed(kinpred_config* cfg, uint64_t seed) {
  if (require(cfg != nullptr, "cfg must not be null") != KINPRED_OK)
    return KINPRED_ERR_INVALID_ARGUMENT;
  cfg->cfg.seed = seed;
  return KINPRED_OK;
}

kinpred_status kinpred_config_set_view(kinpred_config* cfg, const char* view) {
  if (require(cfg != nullptr && view != nullptr,
              "cfg and view must not be null") != KINPRED_OK)
    return KINPRED_ERR_INVALID_ARGUMENT;
  const std::string v = view;
  if (v == "bird") {
    cfg->cfg.view = kinpred::ViewMode::bird;
  } else if (v == "driver") {
    cfg->cfg.view = kinpred::ViewMode::driver;
  } else {
    set_error("view must be 'bird' or 'driver'");
    return KINPRED_ERR_INVALID_ARGUMENT;
  }
  return KINPRED_OK;
}

kinpred_status kinpred_config_set_no_interaction(kinpred_config* cfg,
                                                 int enabled) {
  if (require(cfg != nullptr, "cfg must not be null") != KINPRED_OK)
    return KINPRED_ERR_INVALID_ARGUMENT;
  cfg->cfg.no_interaction = enabled != 0;
  return KINPRED_OK;
}

kinpred_status kinpred_config_set_samples(kinpred_config* cfg, int n_samples) {
  if (require(cfg != nullptr, "cfg must not be null") != KINPRED_OK)
    return KINPRED_ERR_INVALID_ARGUMENT;
  if (require(n_samples > 0, "n_samples must be positive") != KINPRED_OK)
    return KINPRED_ERR_INVALID_ARGUMENT;
  cfg->cfg.n_samples = n_samples;
  return KINPRED_OK;
}

kinpred_status kinpred_config_set_workers(kinpred_config* cfg, int workers) {
  if (require(cfg != nullptr, "cfg must not be null") != KINPRED_OK)
    return KINPRED_ERR_INVALID_ARGUMENT;
  if (require(workers > 0, "workers must be positive") != KINPRED_OK)
    return KINPRED_ERR_INVALID_ARGUMENT;
  cfg->cfg.workers = workers;
  return KINPRED_OK;
}

void kinpred_config_free(kinpred_config* cfg) { delete cfg; }

kinpred_status kinpred_ingest_ngsim(const kinpred_config* cfg,
                                    const char* csv_path,
                                    kinpred_scene_set** out) {
  if (require(cfg != nullptr && csv_path != nullptr && out != nullptr,
              "cfg, csv_path and out must not be null") != KINPRED_OK)
    return KINPRED_ERR_INVALID_ARGUMENT;
  return guarded([&] {
    *out = new kinpred_scene_set{kinpred::ingest_ngsim(csv_path, cfg->cfg)};
  });
}

kinpred_status kinpred_ingest_highd(const kinpred_config* cfg,
                                    const char* tracks_csv_path,
                                    const char* recording_meta_path,
                                    kinpred_scene_set** out) {
  if (require(cfg != nullptr && tracks_csv_path != nullptr &&
                  recording_meta_path != nullptr && out != nullptr,
              "cfg, paths and out must not be null") != KINPRED_OK)
    return KINPRED_ERR_INVALID_ARGUMENT;
  return guarded([&] {
    *out = new kinpred_scene_set{
        kinpred::ingest_highd(tracks_csv_path, recording_meta_path, cfg->cfg)};
  });
}

kinpred_status kinpred_ingest_synthetic(const kinpred_config* cfg,
                                        const char* json_path,
                                        kinpred_scene_set** out) {
  if (require(cfg != nullptr && json_path != nullptr && out != nullptr,
              "cfg, json_path and out must not be null") != KINPRED_OK)
    return KINPRED_ERR_INVALID_ARGUMENT;
  return guarded([&] {
    *out = new kinpred_scene_set{kinpred::ingest_synthetic(json_path, cfg->cfg)};
  });
}

kinpred_status kinpred_scene_set_load(const char* path,
                                      kinpred_scene_set** out) {
  if (require(path != nullptr && out != nullptr,
              "path and out must not be null") != KINPRED_OK)
    return KINPRED_ERR_INVALID_ARGUMENT;
  return guarded([&] {
    *out = new kinpred_scene_set{kinpred::load_scene_archive(path)};
  });
}

kinpred_status kinpred_scene_set_save(const kinpred_scene_set* scenes,
                                      const char* path) {
  if (require(scenes != nullptr && path != nullptr,
              "scenes and path must not be null") != KINPRED_OK)
    return KINPRED_ERR_INVALID_ARGUMENT;
  return guarded([&] { kinpred::save_scene_archive(scenes->archive, path); });
}

kinpred_status kinpred_scene_set_count(const kinpred_scene_set* scenes,
                                       int* out) {
  if (require(scenes != nullptr && out != nullptr,
              "scenes and out must not be null") != KINPRED_OK)
    return KINPRED_ERR_INVALID_ARGUMENT;
  *out = static_cast<int>(scenes->archive.scenes.size());
  return KINPRED_OK;
}

kinpred_status kinpred_scene_set_manifest(const kinpred_scene_set* scenes,
                                          char** out_json) {
  if (require(scenes != nullptr && out_json != nullptr,
              "scenes and out_json must not be null") != KINPRED_OK)
    return KINPRED_ERR_INVALID_ARGUMENT;
  return guarded(
      [&] { *out_json = copy_string(scenes->archive.manifest.dump(2)); });
}

void kinpred_scene_set_free(kinpred_scene_set* scenes) { delete scenes; }

kinpred_status kinpred_predict(const kinpred_config* cfg,
                               const kinpred_scene_set* scenes,
                               kinpred_prediction_set** out) {
  if (require(cfg != nullptr && scenes != nullptr && out != nullptr,
              "cfg, scenes and out must not be null") != KINPRED_OK)
    return KINPRED_ERR_INVALID_ARGUMENT;
  return guarded([&] {
    kinpred::BatchPrediction batch =
        kinpred::predict_batch(scenes->archive.scenes, cfg->cfg);
    if (batch.predictions.empty() && !batch.failures.empty())
      throw kinpred::NumericError("every scene failed: " +
                                  batch.failures.front().error);
    *out = new kinpred_prediction_set{std::move(batch)};
  });
}

kinpred_status kinpred_prediction_set_load(const char* path,
                                           kinpred_prediction_set** out) {
  if (require(path != nullptr && out != nullptr,
              "path and out must not be null") != KINPRED_OK)
    return KINPRED_ERR_INVALID_ARGUMENT;
  return guarded([&] {
    *out = new kinpred_prediction_set{kinpred::load_prediction_archive(path)};
  });
}

kinpred_status kinpred_prediction_set_save(const kinpred_prediction_set* preds,
                                           const char* path) {
  if (require(preds != nullptr && path != nullptr,
              "preds and path must not be null") != KINPRED_OK)
    return KINPRED_ERR_INVALID_ARGUMENT;
  return guarded(
      [&] { kinpred::save_prediction_archive(preds->batch, path); });
}

kinpred_status kinpred_prediction_set_count(const kinpred_prediction_set* preds,
                                            int* out) {
  if (require(preds != nullptr && out != nullptr,
              "preds and out must not be null") != KINPRED_OK)
    return KINPRED_ERR_INVALID_ARGUMENT;
  *out = static_cast<int>(preds->batch.predictions.size());
  return KINPRED_OK;
}

kinpred_status kinpred_prediction_set_failure_count(
    const kinpred_prediction_set* preds, int* out) {
  if (require(preds != nullptr && out != nullptr,
              "preds and out must not be null") != KINPRED_OK)
    return KINPRED_ERR_INVALID_ARGUMENT;
  *out = static_cast<int>(preds->batch.failures.size());
  return KINPRED_OK;
}

kinpred_status kinpred_prediction_set_failures(
    const kinpred_prediction_set* preds, char** out_json) {
  if (require(preds != nullptr && out_json != nullptr,
              "preds and out_json must not be null") != KINPRED_OK)
    return KINPRED_ERR_INVALID_ARGUMENT;
  return guarded([&] {
    nlohmann::json failures = nlohmann::json::array();
    for (const kinpred::SceneFailure& f : preds->batch.failures)
      failures.push_back({{"scene", f.scene_id}, {"error", f.error}});
    *out_json = copy_string(failures.dump(2));
  });
}

void kinpred_prediction_set_free(kinpred_prediction_set* preds) {
  delete preds;
}

kinpred_status kinpred_evaluate(const kinpred_config* cfg,
                                const kinpred_scene_set* truth,
                                const kinpred_prediction_set* preds,
                                const char* dataset, char** out_csv) {
  if (require(cfg != nullptr && truth != nullptr && preds != nullptr &&
                  out_csv != nullptr,
              "cfg, truth, preds and out_csv must not be null") != KINPRED_OK)
    return KINPRED_ERR_INVALID_ARGUMENT;
  return guarded([&] {
    std::string name = dataset != nullptr ? dataset : "";
    if (name.empty())
      name = truth->archive.manifest.value("source", std::string{"unknown"});
    const std::string view =
        cfg->cfg.view == kinpred::ViewMode::driver ? "driver" : "bird";
    *out_csv = copy_string(kinpred::evaluate_predictions(
        truth->archive, preds->batch.predictions, cfg->cfg, name, view));
  });
}

kinpred_status kinpred_plotdata_metrics(const char* metrics_csv,
                                        char** out_csv) {
  if (require(metrics_csv != nullptr && out_csv != nullptr,
              "metrics_csv and out_csv must not be null") != KINPRED_OK)
    return KINPRED_ERR_INVALID_ARGUMENT;
  return guarded(
      [&] { *out_csv = copy_string(kinpred::plotdata_from_metrics(metrics_csv)); });
}

kinpred_status kinpred_plotdata_predictions(const kinpred_prediction_set* preds,
                                            char** out_csv) {
  if (require(preds != nullptr && out_csv != nullptr,
              "preds and out_csv must not be null") != KINPRED_OK)
    return KINPRED_ERR_INVALID_ARGUMENT;
  return guarded([&] {
    *out_csv =
        copy_string(kinpred::plotdata_from_predictions(preds->batch.predictions));
  });
}

}  // extern "C"
