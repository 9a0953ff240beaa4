#include "engine.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <map>
#include <optional>
#include <thread>
#include <tuple>

#include "errors.hpp"
#include "rng.hpp"
#include "sensing.hpp"

namespace kinpred {

BatchPrediction predict_batch(const std::vector<Scene>& scenes,
                              const RunConfig& cfg) {
  std::vector<std::optional<PredictionSet>> slots(scenes.size());
  std::vector<std::optional<SceneFailure>> errors(scenes.size());

  const int workers = std::max(
      1, std::min(cfg.workers, static_cast<int>(scenes.size())));
  std::atomic<std::size_t> next{0};
  auto work = [&]() {
    while (true) {
      const std::size_t i = next.fetch_add(1);
      if (i >= scenes.size()) return;
      const std::uint64_t seed = derive_seed(cfg.seed, i);
      try {
        if (cfg.view == ViewMode::driver) {
          const Scene degraded =
              driver_view(scenes[i], scenes[i].target.id, cfg.sensor);
          slots[i] = predict(degraded, cfg, seed);
        } else {
          slots[i] = predict(scenes[i], cfg, seed);
        }
      } catch (const std::exception& e) {
        errors[i] = SceneFailure{scenes[i].id, e.what()};
      }
    }
  };

  if (workers == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) pool.emplace_back(work);
    for (std::thread& t : pool) t.join();
  }

  BatchPrediction out;
  for (std::size_t i = 0; i < scenes.size(); ++i) {
    if (slots[i].has_value())
      out.predictions.push_back(std::move(*slots[i]));
    else if (errors[i].has_value())
      out.failures.push_back(std::move(*errors[i]));
  }
  return out;
}

namespace {

SceneArchive windows_to_archive(const Recording& original,
                                const Recording& resampled,
                                const RunConfig& cfg) {
  WindowBatch batch = extract_windows(resampled, cfg.obs_window_s,
                                      cfg.pred_horizon_s, cfg.stride_s);
  SceneArchive archive;
  archive.scenes = std::move(batch.scenes);
  archive.manifest = nlohmann::json{
      {"source", original.meta.source},
      {"source_frame_rate", original.meta.frame_rate},
      {"frame_rate", resampled.meta.frame_rate},
      {"unit", original.meta.unit},
      {"track_count", original.tracks.size()},
      {"lane_count", resampled.meta.lanes.size()},
      {"scene_count", archive.scenes.size()},
      {"skipped_windows", batch.skipped},
  };
  return archive;
}

}  // namespace

SceneArchive ingest_ngsim(const std::string& path, const RunConfig& cfg) {
  const Recording rec = load_ngsim(path, cfg.ngsim_unit, cfg.ngsim_lon_axis);
  const double target_rate = 1.0 / cfg.dt;
  const Recording resampled = rec.meta.frame_rate == target_rate
                                  ? rec
                                  : resample_recording(rec, target_rate);
  return windows_to_archive(rec, resampled, cfg);
}

SceneArchive ingest_highd(const std::string& tracks_path,
                          const std::string& meta_path, const RunConfig& cfg) {
  const Recording rec = load_highd(tracks_path, meta_path);
  const double target_rate = 1.0 / cfg.dt;
  const Recording resampled = rec.meta.frame_rate == target_rate
                                  ? rec
                                  : resample_recording(rec, target_rate);
  return windows_to_archive(rec, resampled, cfg);
}

SceneArchive ingest_synthetic(const std::string& path, const RunConfig& cfg) {
  (void)cfg;
  SceneArchive archive = load_scene_archive(path);
  for (const Scene& scene : archive.scenes) scene.validate();
  archive.manifest["source"] = "synthetic";
  archive.manifest["scene_count"] = archive.scenes.size();
  return archive;
}

std::string evaluate_predictions(const SceneArchive& truth,
                                 const std::vector<PredictionSet>& predictions,
                                 const RunConfig& cfg, const std::string& dataset,
                                 const std::string& view) {
  std::map<std::string, const Scene*> by_id;
  for (const Scene& scene : truth.scenes) by_id.emplace(scene.id, &scene);

  std::vector<EvalRecord> records;
  records.reserve(predictions.size());
  for (const PredictionSet& pred : predictions) {
    const auto it = by_id.find(pred.scene_id);
    if (it == by_id.end())
      throw InvalidInput("evaluate: prediction for unknown scene '" +
                         pred.scene_id + "'");
    const Scene& scene = *it->second;
    if (pred.n != scene.n || pred.T != scene.T)
      throw InvalidInput("evaluate: window mismatch for scene '" +
                         pred.scene_id + "'");

    EvalRecord record;
    record.id = pred.scene_id;
    for (int h = 1; h <= 5; ++h) {
      const int t = scene.n + static_cast<int>(std::lround(h / scene.dt));
      if (t > scene.T || !scene.target.has_at(t))
        throw InvalidInput("evaluate: truth missing at horizon for scene '" +
                           pred.scene_id + "'");
      HorizonObservation obs;
      obs.truth = scene.target.at(t);
      obs.samples.reserve(pred.samples.size());
      const std::size_t idx = static_cast<std::size_t>(t - pred.n - 1);
      for (const WeightedTrajectory& s : pred.samples) {
        if (idx >= s.positions.size())
          throw InvalidInput("evaluate: sample too short for scene '" +
                             pred.scene_id + "'");
        obs.samples.push_back({s.weight, s.positions[idx]});
      }
      record.horizons.emplace(static_cast<double>(h), std::move(obs));
    }
    records.push_back(std::move(record));
  }

  const std::vector<MetricValue> summary = horizon_summary(records, cfg.qde_q);
  std::vector<CsvMetricRow> rows;
  rows.reserve(summary.size());
  for (const MetricValue& v : summary)
    rows.push_back({dataset, view, v.metric, v.horizon, v.value});
  return metrics_csv(rows);
}

nlohmann::json batch_to_json(const BatchPrediction& batch) {
  nlohmann::json predictions = nlohmann::json::array();
  for (const PredictionSet& pred : batch.predictions)
    predictions.push_back(prediction_to_json(pred));
  nlohmann::json failures = nlohmann::json::array();
  for (const SceneFailure& f : batch.failures)
    failures.push_back({{"scene", f.scene_id}, {"error", f.error}});
  return nlohmann::json{{"predictions", std::move(predictions)},
                        {"failures", std::move(failures)}};
}

BatchPrediction batch_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("predictions"))
    throw ParseError("prediction archive: missing predictions");
  BatchPrediction batch;
  for (const nlohmann::json& jp : j.at("predictions"))
    batch.predictions.push_back(prediction_from_json(jp));
  for (const nlohmann::json& jf : j.value("failures", nlohmann::json::array()))
    batch.failures.push_back(
        {jf.value("scene", std::string{}), jf.value("error", std::string{})});
  return batch;
}

BatchPrediction load_prediction_archive(const std::string& path) {
  try {
    return batch_from_json(nlohmann::json::parse(read_file(path)));
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("prediction archive: ") + e.what());
  }
}

void save_prediction_archive(const BatchPrediction& batch,
                             const std::string& path) {
  write_file(path, batch_to_json(batch).dump() + "\n");
}

std::string plotdata_from_metrics(const std::string& csv_text) {
  const std::vector<CsvMetricRow> rows = parse_metrics_csv(csv_text);
  // pivot metrics into columns, one row per (dataset, view, horizon)
  std::vector<std::tuple<std::string, std::string, std::string>> order;
  std::map<std::tuple<std::string, std::string, std::string>,
           std::map<std::string, double>>
      cells;
  for (const CsvMetricRow& row : rows) {
    const auto key = std::make_tuple(row.dataset, row.view, row.horizon);
    if (cells.find(key) == cells.end()) order.push_back(key);
    cells[key][row.metric] = row.value;
  }
  std::string out = "dataset,view,horizon_s,rmse,ade,qde\n";
  char buf[64];
  for (const auto& key : order) {
    const auto& [dataset, view, horizon] = key;
    out += dataset + "," + view + "," + horizon;
    const std::map<std::string, double>& metrics = cells[key];
    for (const char* name : {"rmse", "ade", "qde"}) {
      const auto it = metrics.find(name);
      if (it == metrics.end()) {
        out += ",";
      } else {
        std::snprintf(buf, sizeof(buf), ",%.12g", it->second);
        out += buf;
      }
    }
    out += "\n";
  }
  return out;
}

std::string plotdata_from_predictions(const std::vector<PredictionSet>& preds) {
  std::string out = "scene,sample,t,x,y,weight\n";
  char buf[128];
  for (const PredictionSet& pred : preds) {
    for (std::size_t s = 0; s < pred.samples.size(); ++s) {
      const WeightedTrajectory& traj = pred.samples[s];
      int t = pred.n + 1;
      for (const Eigen::Vector2d& p : traj.positions) {
        std::snprintf(buf, sizeof(buf), "%s,%zu,%d,%.12g,%.12g,%.12g\n",
                      pred.scene_id.c_str(), s, t, p.x(), p.y(), traj.weight);
        out += buf;
        ++t;
      }
    }
  }
  return out;
}

}  // namespace kinpred
