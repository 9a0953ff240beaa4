#ifndef KINPRED_H
#define KINPRED_H

/* C interface to the kinpred trajectory-prediction library.
 *
 * All functions return a status code; every other result goes through out
 * parameters. On failure the out parameters are left untouched and
 * kinpred_last_error() describes the problem for the calling thread.
 * Strings returned through char** out parameters are heap-allocated and must
 * be released with kinpred_string_free().
 */

#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum kinpred_status {
  KINPRED_OK = 0,
  KINPRED_ERR_INVALID_ARGUMENT = 1,
  KINPRED_ERR_PARSE = 2,
  KINPRED_ERR_NUMERIC = 3,
  KINPRED_ERR_IO = 4,
  KINPRED_ERR_INTERNAL = 5
} kinpred_status;

typedef struct kinpred_config kinpred_config;
typedef struct kinpred_scene_set kinpred_scene_set;
typedef struct kinpred_prediction_set kinpred_prediction_set;

/* Message describing the calling thread's most recent failure; empty string
 * when none occurred. The pointer stays valid until the next failing call on
 * the same thread. */
const char* kinpred_last_error(void);

const char* kinpred_version(void);

void kinpred_string_free(char* s);

/* ---- configuration ---- */

kinpred_status kinpred_config_default(kinpred_config** out);
kinpred_status kinpred_config_load(const char* path, kinpred_config** out);
kinpred_status kinpred_config_save(const kinpred_config* cfg, const char* path);
/* JSON document with every parameter, as written by kinpred_config_save. */
kinpred_status kinpred_config_to_json(const kinpred_config* cfg, char** out);

kinpred_status kinpred_config_set_seed(kinpred_config* cfg, uint64_t seed);
/* view is "bird" or "driver" */
kinpred_status kinpred_config_set_view(kinpred_config* cfg, const char* view);
kinpred_status kinpred_config_set_no_interaction(kinpred_config* cfg, int enabled);
kinpred_status kinpred_config_set_samples(kinpred_config* cfg, int n_samples);
kinpred_status kinpred_config_set_workers(kinpred_config* cfg, int workers);

void kinpred_config_free(kinpred_config* cfg);

/* ---- scene ingestion ---- */

kinpred_status kinpred_ingest_ngsim(const kinpred_config* cfg,
                                    const char* csv_path,
                                    kinpred_scene_set** out);
kinpred_status kinpred_ingest_highd(const kinpred_config* cfg,
                                    const char* tracks_csv_path,
                                    const char* recording_meta_path,
                                    kinpred_scene_set** out);
/* Scene JSON document or scene archive. */
kinpred_status kinpred_ingest_synthetic(const kinpred_config* cfg,
                                        const char* json_path,
                                        kinpred_scene_set** out);

kinpred_status kinpred_scene_set_load(const char* path, kinpred_scene_set** out);
kinpred_status kinpred_scene_set_save(const kinpred_scene_set* scenes,
                                      const char* path);
kinpred_status kinpred_scene_set_count(const kinpred_scene_set* scenes,
                                       int* out);
kinpred_status kinpred_scene_set_manifest(const kinpred_scene_set* scenes,
                                          char** out_json);

void kinpred_scene_set_free(kinpred_scene_set* scenes);

/* ---- prediction ---- */

/* Runs the full inference pipeline over every scene (driver-view degradation
 * included when configured). Scenes that fail are skipped and recorded; the
 * call itself only fails when nothing could be processed at all. */
kinpred_status kinpred_predict(const kinpred_config* cfg,
                               const kinpred_scene_set* scenes,
                               kinpred_prediction_set** out);

kinpred_status kinpred_prediction_set_load(const char* path,
                                           kinpred_prediction_set** out);
kinpred_status kinpred_prediction_set_save(const kinpred_prediction_set* preds,
                                           const char* path);
kinpred_status kinpred_prediction_set_count(const kinpred_prediction_set* preds,
                                            int* out);
kinpred_status kinpred_prediction_set_failure_count(
    const kinpred_prediction_set* preds, int* out);
/* JSON array of {scene, error} entries for the skipped scenes. */
kinpred_status kinpred_prediction_set_failures(
    const kinpred_prediction_set* preds, char** out_json);

void kinpred_prediction_set_free(kinpred_prediction_set* preds);

/* ---- evaluation and plot data ---- */

/* CSV rows (dataset,view,metric,horizon_s,value) with horizons 1..5 s plus
 * average/final summary rows. view labels the rows and comes from cfg. */
kinpred_status kinpred_evaluate(const kinpred_config* cfg,
                                const kinpred_scene_set* truth,
                                const kinpred_prediction_set* preds,
                                const char* dataset, char** out_csv);

/* Metric CSV -> wide per-horizon table with one column per metric. */
kinpred_status kinpred_plotdata_metrics(const char* metrics_csv,
                                        char** out_csv);
/* Prediction set -> flat (scene,sample,t,x,y,weight) table. */
kinpred_status kinpred_plotdata_predictions(const kinpred_prediction_set* preds,
                                            char** out_csv);

#ifdef __cplusplus
}
#endif

#endif /* KINPRED_H */
