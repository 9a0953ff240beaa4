#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "config.hpp"
#include "data_io.hpp"
#include "inference.hpp"
#include "metrics.hpp"

namespace kinpred {

struct SceneFailure {
  std::string scene_id;
  std::string error;
};

struct BatchPrediction {
  std::vector<PredictionSet> predictions;  ///< successful scenes, input order
  std::vector<SceneFailure> failures;
};

/// Predicts every scene with a bounded worker pool. A failing scene is
/// recorded and skipped, never fatal. Driver view degrades each scene from
/// its own target's vantage point before inference. Scene i always uses the
/// stream derived from (cfg.seed, i), so output is identical for any worker
/// count.
BatchPrediction predict_batch(const std::vector<Scene>& scenes,
                              const RunConfig& cfg);

SceneArchive ingest_ngsim(const std::string& path, const RunConfig& cfg);
SceneArchive ingest_highd(const std::string& tracks_path,
                          const std::string& meta_path, const RunConfig& cfg);
/// Accepts a Scene JSON document or an existing archive.
SceneArchive ingest_synthetic(const std::string& path, const RunConfig& cfg);

/// Joins predictions to truth scenes by id and reports rmse/ade/qde at
/// horizons 1..5 s plus average/final rows.
std::string evaluate_predictions(const SceneArchive& truth,
                                 const std::vector<PredictionSet>& predictions,
                                 const RunConfig& cfg, const std::string& dataset,
                                 const std::string& view);

nlohmann::json batch_to_json(const BatchPrediction& batch);
BatchPrediction batch_from_json(const nlohmann::json& j);
BatchPrediction load_prediction_archive(const std::string& path);
void save_prediction_archive(const BatchPrediction& batch,
                             const std::string& path);

/// Wide table (dataset,view,horizon_s,rmse,ade,qde) from a metric CSV.
std::string plotdata_from_metrics(const std::string& csv_text);
/// Flat sample-cloud table (scene,sample,t,x,y,weight).
std::string plotdata_from_predictions(const std::vector<PredictionSet>& preds);

}  // namespace kinpred
