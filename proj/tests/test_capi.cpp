#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <unistd.h>

#include <cstring>
#include <filesystem>
#include <string>

#include <json.hpp>

#include "data_io.hpp"
#include "helpers.hpp"
#include "kinpred/kinpred.h"
#include "scene.hpp"

namespace {

struct TempDir {
  std::filesystem::path path;
  TempDir() {
    path = std::filesystem::temp_directory_path() /
           ("kinpred_capi_" + std::to_string(::getpid()));
    std::filesystem::create_directories(path);
  }
  ~TempDir() { std::filesystem::remove_all(path); }
  std::string file(const std::string& name) const {
    return (path / name).string();
  }
};

std::string owned(char* s) {
  std::string out = s == nullptr ? "" : s;
  kinpred_string_free(s);
  return out;
}

std::string write_scene_doc(const TempDir& dir, const std::string& name) {
  kinpred::Scene sc = testutil::straight_scene(0.0, 20.0, 0.0);
  sc.others.push_back(
      testutil::cv_track(2, sc.T, sc.n, 25.0, 19.0, 0.0, sc.dt));
  const std::string path = dir.file(name);
  kinpred::write_file(path, kinpred::scene_to_json(sc).dump());
  return path;
}

}  // namespace

TEST_CASE("version and error strings are always available") {
  CHECK(std::strlen(kinpred_version()) > 0);
  CHECK(kinpred_last_error() != nullptr);
}

TEST_CASE("config lifecycle and JSON round trip") {
  TempDir dir;
  kinpred_config* cfg = nullptr;
  REQUIRE(kinpred_config_default(&cfg) == KINPRED_OK);
  REQUIRE(cfg != nullptr);

  CHECK(kinpred_config_set_seed(cfg, 7) == KINPRED_OK);
  CHECK(kinpred_config_set_view(cfg, "driver") == KINPRED_OK);
  CHECK(kinpred_config_set_no_interaction(cfg, 1) == KINPRED_OK);
  CHECK(kinpred_config_set_samples(cfg, 2) == KINPRED_OK);
  CHECK(kinpred_config_set_workers(cfg, 3) == KINPRED_OK);

  CHECK(kinpred_config_set_view(cfg, "satellite") ==
        KINPRED_ERR_INVALID_ARGUMENT);
  CHECK(std::string(kinpred_last_error()).size() > 0);
  CHECK(kinpred_config_set_samples(cfg, 0) == KINPRED_ERR_INVALID_ARGUMENT);

  char* json_text = nullptr;
  REQUIRE(kinpred_config_to_json(cfg, &json_text) == KINPRED_OK);
  const nlohmann::json j = nlohmann::json::parse(owned(json_text));
  CHECK(j.at("seed").get<std::uint64_t>() == 7);
  CHECK(j.at("view").get<std::string>() == "driver");
  CHECK(j.at("no_interaction").get<bool>() == true);
  CHECK(j.at("n_samples").get<int>() == 2);
  CHECK(j.at("workers").get<int>() == 3);

  const std::string path = dir.file("cfg.json");
  REQUIRE(kinpred_config_save(cfg, path.c_str()) == KINPRED_OK);
  kinpred_config* loaded = nullptr;
  REQUIRE(kinpred_config_load(path.c_str(), &loaded) == KINPRED_OK);
  char* loaded_text = nullptr;
  REQUIRE(kinpred_config_to_json(loaded, &loaded_text) == KINPRED_OK);
  CHECK(nlohmann::json::parse(owned(loaded_text)) == j);

  kinpred_config_free(loaded);
  kinpred_config_free(cfg);
}

TEST_CASE("null arguments are rejected, not crashed on") {
  CHECK(kinpred_config_default(nullptr) == KINPRED_ERR_INVALID_ARGUMENT);
  CHECK(kinpred_config_load(nullptr, nullptr) == KINPRED_ERR_INVALID_ARGUMENT);
  CHECK(kinpred_config_set_seed(nullptr, 1) == KINPRED_ERR_INVALID_ARGUMENT);
  CHECK(kinpred_scene_set_load(nullptr, nullptr) ==
        KINPRED_ERR_INVALID_ARGUMENT);
  CHECK(kinpred_predict(nullptr, nullptr, nullptr) ==
        KINPRED_ERR_INVALID_ARGUMENT);
  kinpred_config_free(nullptr);
  kinpred_scene_set_free(nullptr);
  kinpred_prediction_set_free(nullptr);
  kinpred_string_free(nullptr);
}

TEST_CASE("missing and malformed files map to distinct statuses") {
  TempDir dir;
  kinpred_config* cfg = nullptr;
  REQUIRE(kinpred_config_default(&cfg) == KINPRED_OK);

  kinpred_scene_set* scenes = nullptr;
  CHECK(kinpred_scene_set_load(dir.file("nope.json").c_str(), &scenes) ==
        KINPRED_ERR_INVALID_ARGUMENT);
  CHECK(scenes == nullptr);

  const std::string garbage = dir.file("garbage.json");
  kinpred::write_file(garbage, "{broken");
  CHECK(kinpred_scene_set_load(garbage.c_str(), &scenes) == KINPRED_ERR_PARSE);
  CHECK(scenes == nullptr);

  kinpred_config_free(cfg);
}

TEST_CASE("full pipeline through the C interface") {
  TempDir dir;
  const std::string scene_path = write_scene_doc(dir, "scene.json");

  kinpred_config* cfg = nullptr;
  REQUIRE(kinpred_config_default(&cfg) == KINPRED_OK);
  REQUIRE(kinpred_config_set_samples(cfg, 2) == KINPRED_OK);

  kinpred_scene_set* scenes = nullptr;
  REQUIRE(kinpred_ingest_synthetic(cfg, scene_path.c_str(), &scenes) ==
          KINPRED_OK);
  int count = -1;
  REQUIRE(kinpred_scene_set_count(scenes, &count) == KINPRED_OK);
  CHECK(count == 1);

  char* manifest_text = nullptr;
  REQUIRE(kinpred_scene_set_manifest(scenes, &manifest_text) == KINPRED_OK);
  const nlohmann::json manifest = nlohmann::json::parse(owned(manifest_text));
  CHECK(manifest.at("source").get<std::string>() == "synthetic");

  const std::string archive_path = dir.file("scenes.json");
  REQUIRE(kinpred_scene_set_save(scenes, archive_path.c_str()) == KINPRED_OK);
  kinpred_scene_set* reloaded = nullptr;
  REQUIRE(kinpred_scene_set_load(archive_path.c_str(), &reloaded) == KINPRED_OK);

  kinpred_prediction_set* preds = nullptr;
  REQUIRE(kinpred_predict(cfg, reloaded, &preds) == KINPRED_OK);
  int pred_count = -1;
  REQUIRE(kinpred_prediction_set_count(preds, &pred_count) == KINPRED_OK);
  CHECK(pred_count == 1);
  int failure_count = -1;
  REQUIRE(kinpred_prediction_set_failure_count(preds, &failure_count) ==
          KINPRED_OK);
  CHECK(failure_count == 0);
  char* failures_text = nullptr;
  REQUIRE(kinpred_prediction_set_failures(preds, &failures_text) == KINPRED_OK);
  CHECK(nlohmann::json::parse(owned(failures_text)).is_array());

  const std::string pred_path = dir.file("preds.json");
  REQUIRE(kinpred_prediction_set_save(preds, pred_path.c_str()) == KINPRED_OK);
  kinpred_prediction_set* preds_back = nullptr;
  REQUIRE(kinpred_prediction_set_load(pred_path.c_str(), &preds_back) ==
          KINPRED_OK);

  char* metrics_text = nullptr;
  REQUIRE(kinpred_evaluate(cfg, reloaded, preds_back, "unit", &metrics_text) ==
          KINPRED_OK);
  const std::string metrics = owned(metrics_text);
  CHECK(metrics.rfind("dataset,view,metric,horizon_s,value\n", 0) == 0);
  CHECK(metrics.find("unit,bird,ade,1,") != std::string::npos);
  CHECK(metrics.find("rmse,final,") != std::string::npos);

  char* wide_text = nullptr;
  REQUIRE(kinpred_plotdata_metrics(metrics.c_str(), &wide_text) == KINPRED_OK);
  CHECK(owned(wide_text).rfind("dataset,view,horizon_s,rmse,ade,qde\n", 0) == 0);

  char* cloud_text = nullptr;
  REQUIRE(kinpred_plotdata_predictions(preds_back, &cloud_text) == KINPRED_OK);
  CHECK(owned(cloud_text).rfind("scene,sample,t,x,y,weight\n", 0) == 0);

  kinpred_prediction_set_free(preds_back);
  kinpred_prediction_set_free(preds);
  kinpred_scene_set_free(reloaded);
  kinpred_scene_set_free(scenes);
  kinpred_config_free(cfg);
}

TEST_CASE("prediction runs are reproducible through the C interface") {
  TempDir dir;
  const std::string scene_path = write_scene_doc(dir, "scene.json");

  kinpred_config* cfg = nullptr;
  REQUIRE(kinpred_config_default(&cfg) == KINPRED_OK);
  REQUIRE(kinpred_config_set_seed(cfg, 11) == KINPRED_OK);

  kinpred_scene_set* scenes = nullptr;
  REQUIRE(kinpred_ingest_synthetic(cfg, scene_path.c_str(), &scenes) ==
          KINPRED_OK);

  const std::string a = dir.file("a.json");
  const std::string b = dir.file("b.json");
  for (const std::string& out_path : {a, b}) {
    kinpred_prediction_set* preds = nullptr;
    REQUIRE(kinpred_predict(cfg, scenes, &preds) == KINPRED_OK);
    REQUIRE(kinpred_prediction_set_save(preds, out_path.c_str()) == KINPRED_OK);
    kinpred_prediction_set_free(preds);
  }
  CHECK(kinpred::read_file(a) == kinpred::read_file(b));

  kinpred_scene_set_free(scenes);
  kinpred_config_free(cfg);
}
