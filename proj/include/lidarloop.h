/*
 * Copyright 2026 The lidarloop Authors
 * SPDX-License-Identifier: Apache-2.0
 *
 * C API of the lidarloop shared library: LiDAR loop-closure detection with
 * compact global scan descriptors, a boosted loop detector, verified
 * coarse-to-fine scan registration and a replayable evaluation harness.
 *
 * Conventions: every fallible call returns ll_status; LL_OK is 0. On
 * failure, ll_last_error() returns a thread-local message describing what
 * went wrong. Objects are opaque handles released with their *_free
 * function; strings returned through char** out-parameters are released
 * with ll_string_free().
 */

#ifndef LIDARLOOP_H
#define LIDARLOOP_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum ll_status {
  LL_OK = 0,
  LL_ERROR = 1,         /* unexpected failure */
  LL_EINVAL = 2,        /* invalid argument */
  LL_EPRECONDITION = 3, /* operation precondition violated */
  LL_EIO = 4,           /* file system failure */
  LL_EFORMAT = 5,       /* malformed file contents */
  LL_EDIMENSION = 6,    /* mismatched descriptor/model dimensions */
  LL_ENUMERIC = 7       /* numerically degenerate input */
} ll_status;

const char* ll_version(void);

/* Message for the most recent failure on this thread ("" if none). */
const char* ll_last_error(void);

void ll_string_free(char* s);

typedef struct ll_cloud ll_cloud;
typedef struct ll_descriptor ll_descriptor;
typedef struct ll_detector ll_detector;
typedef struct ll_dataset ll_dataset;

#define LL_COMPARISON_DIM 41
#define LL_NUM_HISTOGRAMS 9

/* ---- point clouds ----------------------------------------------------- */

/* Dispatches on extension: .bin (KITTI packed float32) or .csv. */
ll_status ll_cloud_load(const char* path, ll_cloud** out);
ll_status ll_cloud_save_csv(const ll_cloud* cloud, const char* path);
size_t ll_cloud_size(const ll_cloud* cloud);
void ll_cloud_free(ll_cloud* cloud);

/* ---- descriptors ------------------------------------------------------ */

/*
 * bins: LL_NUM_HISTOGRAMS widths, or NULL for the built-in defaults
 * (0.5,1,1.5,2,2.5,3,4,5,10 m). r_max <= 0 selects the default (40 m).
 */
ll_status ll_descriptor_extract(const ll_cloud* cloud, const double* bins,
                                size_t n_bins, double r_max,
                                ll_descriptor** out);
ll_status ll_descriptor_to_json(const ll_descriptor* d, char** json_out);
ll_status ll_descriptor_compare(const ll_descriptor* a, const ll_descriptor* b,
                                double out[LL_COMPARISON_DIM]);
/* 32 type-I entries plus the summed histogram dimensions. */
size_t ll_descriptor_entry_count(const ll_descriptor* d);
void ll_descriptor_free(ll_descriptor* d);

/* ---- datasets ---------------------------------------------------------- */

/*
 * Opens a JSON manifest, decodes every scan and extracts descriptors
 * (cached on disk when the manifest names a cache file).
 */
ll_status ll_dataset_open(const char* manifest_path, ll_dataset** out);
size_t ll_dataset_size(const ll_dataset* dataset);
ll_status ll_dataset_info_json(const ll_dataset* dataset, char** json_out);
void ll_dataset_free(ll_dataset* dataset);

/* ---- loop detector ----------------------------------------------------- */

/*
 * Trains one detector on the dataset's balanced pair set.
 * loop_distance <= 0 selects the manifest's value.
 */
ll_status ll_detector_train(const ll_dataset* train_set, int rounds,
                            double loop_distance, uint64_t seed,
                            ll_detector** out);

/*
 * Trains n_detectors detectors on different negative subsets, tunes each
 * threshold on the held-out dataset against fa_target, and returns the best
 * one. report_json (optional) receives the per-detector tuning table.
 */
ll_status ll_detector_train_select(const ll_dataset* train_set,
                                   const ll_dataset* heldout, int rounds,
                                   double loop_distance, int n_detectors,
                                   double fa_target, uint64_t seed,
                                   ll_detector** out, char** report_json);

ll_status ll_detector_save(const ll_detector* model, const char* path);
ll_status ll_detector_load(const char* path, ll_detector** out);

ll_status ll_detector_predict(const ll_detector* model,
                              const double comparison[LL_COMPARISON_DIM],
                              double* probability);

double ll_detector_p_min(const ll_detector* model);
ll_status ll_detector_set_p_min(ll_detector* model, double p_min);
void ll_detector_free(ll_detector* model);

/* Tunes model->p_min on the held-out dataset; reports p_min, D, FA. */
ll_status ll_detector_tune(ll_detector* model, const ll_dataset* heldout,
                           double fa_target, char** report_json);

/* D, FA and confusion counts over all pairs. p_min < 0 uses the model's. */
ll_status ll_detector_evaluate(const ll_detector* model,
                               const ll_dataset* dataset, double p_min,
                               char** report_json);

/* ROC over all pairs; CSV columns threshold,fa,d. */
ll_status ll_detector_roc_csv(const ll_detector* model,
                              const ll_dataset* dataset, const char* out_csv,
                              char** report_json);

/* ---- evaluation matrices ----------------------------------------------- */

/*
 * Writes distance.csv/.pgm and classification.csv/.pgm into out_dir.
 * p_min < 0 uses the model's threshold.
 */
ll_status ll_matrices_write(const ll_dataset* dataset, const ll_detector* model,
                            double p_min, const char* out_dir,
                            char** report_json);

/* ---- scan registration ------------------------------------------------- */

typedef struct ll_registration_result {
  double matrix[16]; /* row-major homogeneous transform */
  int accepted;
  char reason[32];
  int inliers;
  size_t processed_current;
  size_t processed_candidate;
  double icp_residual;
  int icp_iterations;
} ll_registration_result;

/*
 * Registers `current` against `candidate`. config_path (nullable) and
 * overrides ("section.key=value") feed the [registration] parameters.
 */
ll_status ll_register_pair(const ll_cloud* current, const ll_cloud* candidate,
                           const char* config_path,
                           const char* const* overrides, size_t n_overrides,
                           ll_registration_result* out);

/* ---- replay ------------------------------------------------------------ */

/*
 * Replays the dataset through the pose graph, loop search and registration.
 * The model's tuned threshold applies unless loopsearch.p_min is configured.
 * report_json receives the full replay report.
 */
ll_status ll_replay(const char* manifest_path, const ll_detector* model,
                    const char* config_path, const char* const* overrides,
                    size_t n_overrides, char** report_json);

/* ---- synthetic datasets ------------------------------------------------ */

/*
 * Generates a synthetic dataset (scans, ground truth, odometry, manifest)
 * under out_dir. [synth] and [descriptor] configuration sections apply.
 */
ll_status ll_synth_generate(const char* out_dir, const char* config_path,
                            const char* const* overrides, size_t n_overrides,
                            uint64_t seed, char** report_json);

#ifdef __cplusplus
}
#endif

#endif /* LIDARLOOP_H */
