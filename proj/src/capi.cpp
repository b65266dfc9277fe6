// Copyright 2026 The lidarloop Authors
// SPDX-License-Identifier: Apache-2.0
//
// extern "C" surface over the C++ core. Exceptions are caught at the
// boundary and mapped to status codes; the message lands in a thread-local
// buffer returned by ll_last_error().

#include "lidarloop.h"

#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>
#include <thread>
#include <vector>

#include "lidarloop/config.hpp"
#include "lidarloop/dataset.hpp"
#include "lidarloop/descriptor.hpp"
#include "lidarloop/detector.hpp"
#include "lidarloop/error.hpp"
#include "lidarloop/json_io.hpp"
#include "lidarloop/metrics.hpp"
#include "lidarloop/params_io.hpp"
#include "lidarloop/pointcloud.hpp"
#include "lidarloop/registration.hpp"
#include "lidarloop/replay.hpp"
#include "lidarloop/rng.hpp"
#include "lidarloop/synth.hpp"

using namespace lidarloop;
using nlohmann::json;

struct ll_cloud {
  PointCloud cloud;
};
struct ll_descriptor {
  Descriptor descriptor;
};
struct ll_detector {
  DetectorModel model;
};
struct ll_dataset {
  Dataset dataset;
};

namespace {

thread_local std::string t_last_error;

ll_status status_from(const Error& e) {
  switch (e.code()) {
    case ErrorCode::invalid_argument: return LL_EINVAL;
    case ErrorCode::precondition: return LL_EPRECONDITION;
    case ErrorCode::io: return LL_EIO;
    case ErrorCode::format: return LL_EFORMAT;
    case ErrorCode::dimension_mismatch: return LL_EDIMENSION;
    case ErrorCode::numeric: return LL_ENUMERIC;
  }
  return LL_ERROR;
}

template <typename Fn>
ll_status guarded(Fn&& fn) {
  try {
    fn();
    t_last_error.clear();
    return LL_OK;
  } catch (const Error& e) {
    t_last_error = e.what();
    return status_from(e);
  } catch (const std::exception& e) {
    t_last_error = e.what();
    return LL_ERROR;
  } catch (...) {
    t_last_error = "unknown failure";
    return LL_ERROR;
  }
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

void emit_json(char** out, const json& j) {
  if (out) *out = dup_string(j.dump(2));
}

Config load_config(const char* config_path, const char* const* overrides,
                   size_t n_overrides) {
  Config cfg;
  if (config_path && *config_path) cfg = Config::parse_file(config_path);
  for (size_t i = 0; i < n_overrides; ++i) cfg.set_override(overrides[i]);
  return cfg;
}

double effective_loop_distance(const Dataset& ds, double loop_distance) {
  return loop_distance > 0 ? loop_distance : ds.manifest.loop_distance;
}

// Scored (probability, label) pairs over all unordered node pairs, streamed
// so large datasets never materialize comparison vectors.
std::vector<ScoredPair> scored_all_pairs(const Dataset& ds,
                                         const DetectorModel& model,
                                         double loop_distance) {
  const std::size_t n = ds.size();
  const std::vector<Eigen::Vector2d> positions = ds.positions();
  std::vector<ScoredPair> out(n * (n + 1) / 2);
  std::atomic<std::size_t> next_row{0};
  auto worker = [&]() {
    for (;;) {
      const std::size_t i = next_row.fetch_add(1);
      if (i >= n) return;
      // Row i starts after the rows of all previous anchors.
      std::size_t offset = i * n - i * (i - 1) / 2;
      for (std::size_t j = i; j < n; ++j, ++offset) {
        const double p = predict_proba(
            model, compare_descriptors(ds.nodes[i].descriptor,
                                       ds.nodes[j].descriptor));
        out[offset] = {p, (positions[i] - positions[j]).norm() < loop_distance};
      }
    }
  };
  const unsigned n_threads = std::max(
      1u, std::min<unsigned>(std::thread::hardware_concurrency(),
                             static_cast<unsigned>(n)));
  std::vector<std::thread> threads;
  for (unsigned t = 0; t < n_threads; ++t) threads.emplace_back(worker);
  for (std::thread& t : threads) t.join();
  return out;
}

json evaluation_to_json(const EvaluationResult& e) {
  json j{{"tp", e.tp}, {"fp", e.fp}, {"tn", e.tn}, {"fn", e.fn}};
  if (e.d_defined) j["detection_rate"] = e.detection_rate;
  if (e.fa_defined) j["false_alarm_rate"] = e.false_alarm_rate;
  return j;
}

DetectorModel train_one(const Dataset& ds, int rounds, double loop_distance,
                        uint64_t seed) {
  const std::vector<LabeledPair> pairs = build_training_set(
      ds.positions(), ds.descriptors(), loop_distance, seed);
  DetectorModel model = train_detector(pairs, rounds);
  model.spec_fingerprint = ds.manifest.spec.fingerprint();
  return model;
}

}  // namespace

extern "C" {

const char* ll_version(void) { return "0.1.0"; }

const char* ll_last_error(void) { return t_last_error.c_str(); }

void ll_string_free(char* s) { std::free(s); }

/* ---- point clouds ----------------------------------------------------- */

ll_status ll_cloud_load(const char* path, ll_cloud** out) {
  return guarded([&] {
    require(path && out, ErrorCode::invalid_argument, "null argument");
    *out = new ll_cloud{load_cloud(path)};
  });
}

ll_status ll_cloud_save_csv(const ll_cloud* cloud, const char* path) {
  return guarded([&] {
    require(cloud && path, ErrorCode::invalid_argument, "null argument");
    save_cloud_csv(cloud->cloud, path);
  });
}

size_t ll_cloud_size(const ll_cloud* cloud) {
  return cloud ? cloud->cloud.size() : 0;
}

void ll_cloud_free(ll_cloud* cloud) { delete cloud; }

/* ---- descriptors ------------------------------------------------------ */

ll_status ll_descriptor_extract(const ll_cloud* cloud, const double* bins,
                                size_t n_bins, double r_max,
                                ll_descriptor** out) {
  return guarded([&] {
    require(cloud && out, ErrorCode::invalid_argument, "null argument");
    HistogramSpec spec;
    if (bins) {
      require(n_bins == static_cast<size_t>(kNumHistograms),
              ErrorCode::invalid_argument, "expected 9 bin widths");
      for (int k = 0; k < kNumHistograms; ++k) spec.bin_widths[k] = bins[k];
    }
    if (r_max > 0) spec.r_max = r_max;
    *out = new ll_descriptor{extract_descriptor(cloud->cloud, spec)};
  });
}

ll_status ll_descriptor_to_json(const ll_descriptor* d, char** json_out) {
  return guarded([&] {
    require(d && json_out, ErrorCode::invalid_argument, "null argument");
    emit_json(json_out, descriptor_to_json(d->descriptor));
  });
}

ll_status ll_descriptor_compare(const ll_descriptor* a, const ll_descriptor* b,
                                double out[LL_COMPARISON_DIM]) {
  return guarded([&] {
    require(a && b && out, ErrorCode::invalid_argument, "null argument");
    const ComparisonVector c = compare_descriptors(a->descriptor, b->descriptor);
    std::memcpy(out, c.data(), sizeof(double) * kComparisonDim);
  });
}

size_t ll_descriptor_entry_count(const ll_descriptor* d) {
  return d ? d->descriptor.spec.total_entries() : 0;
}

void ll_descriptor_free(ll_descriptor* d) { delete d; }

/* ---- datasets ---------------------------------------------------------- */

ll_status ll_dataset_open(const char* manifest_path, ll_dataset** out) {
  return guarded([&] {
    require(manifest_path && out, ErrorCode::invalid_argument, "null argument");
    *out = new ll_dataset{build_dataset_from_file(manifest_path)};
  });
}

size_t ll_dataset_size(const ll_dataset* dataset) {
  return dataset ? dataset->dataset.size() : 0;
}

ll_status ll_dataset_info_json(const ll_dataset* dataset, char** json_out) {
  return guarded([&] {
    require(dataset && json_out, ErrorCode::invalid_argument, "null argument");
    const Dataset& ds = dataset->dataset;
    emit_json(json_out,
              json{{"nodes", ds.size()},
                   {"sessions", ds.manifest.session_boundaries.size()},
                   {"session_boundaries", ds.manifest.session_boundaries},
                   {"loop_distance", ds.manifest.loop_distance},
                   {"spec_fingerprint", ds.manifest.spec.fingerprint()},
                   {"descriptor_entries", ds.manifest.spec.total_entries()},
                   {"descriptors_from_cache", ds.descriptors_from_cache}});
  });
}

void ll_dataset_free(ll_dataset* dataset) { delete dataset; }

/* ---- loop detector ----------------------------------------------------- */

ll_status ll_detector_train(const ll_dataset* train_set, int rounds,
                            double loop_distance, uint64_t seed,
                            ll_detector** out) {
  return guarded([&] {
    require(train_set && out, ErrorCode::invalid_argument, "null argument");
    const double dist = effective_loop_distance(train_set->dataset, loop_distance);
    *out = new ll_detector{train_one(train_set->dataset, rounds, dist, seed)};
  });
}

ll_status ll_detector_train_select(const ll_dataset* train_set,
                                   const ll_dataset* heldout, int rounds,
                                   double loop_distance, int n_detectors,
                                   double fa_target, uint64_t seed,
                                   ll_detector** out, char** report_json) {
  return guarded([&] {
    require(train_set && heldout && out, ErrorCode::invalid_argument,
            "null argument");
    require(n_detectors >= 1, ErrorCode::invalid_argument,
            "n_detectors must be >= 1");
    const Dataset& train_ds = train_set->dataset;
    const Dataset& held_ds = heldout->dataset;
    const double dist = effective_loop_distance(train_ds, loop_distance);

    const std::vector<LabeledPair> heldout_pairs =
        build_all_pairs(held_ds.positions(), held_ds.descriptors(), dist);

    std::vector<DetectorModel> models;
    json table = json::array();
    for (int k = 0; k < n_detectors; ++k) {
      const uint64_t subset_seed = mix_seed(seed, static_cast<uint64_t>(k));
      DetectorModel model = train_one(train_ds, rounds, dist, subset_seed);
      const ThresholdTuning tuning =
          tune_threshold(model, heldout_pairs, fa_target);
      model.p_min = tuning.p_min;
      table.push_back(json{{"detector", k},
                           {"seed", subset_seed},
                           {"p_min", tuning.p_min},
                           {"detection_rate", tuning.detection_rate},
                           {"false_alarm_rate", tuning.false_alarm_rate},
                           {"target_met", tuning.target_met}});
      models.push_back(std::move(model));
    }
    const SelectionOutcome selection =
        select_best(models, heldout_pairs, fa_target);
    emit_json(report_json, json{{"detectors", table},
                                {"selected", selection.index},
                                {"target_met", selection.target_met}});
    *out = new ll_detector{models[selection.index]};
  });
}

ll_status ll_detector_save(const ll_detector* model, const char* path) {
  return guarded([&] {
    require(model && path, ErrorCode::invalid_argument, "null argument");
    save_model(model->model, path);
  });
}

ll_status ll_detector_load(const char* path, ll_detector** out) {
  return guarded([&] {
    require(path && out, ErrorCode::invalid_argument, "null argument");
    *out = new ll_detector{load_model(path)};
  });
}

ll_status ll_detector_predict(const ll_detector* model,
                              const double comparison[LL_COMPARISON_DIM],
                              double* probability) {
  return guarded([&] {
    require(model && comparison && probability, ErrorCode::invalid_argument,
            "null argument");
    ComparisonVector x;
    std::memcpy(x.data(), comparison, sizeof(double) * kComparisonDim);
    *probability = predict_proba(model->model, x);
  });
}

double ll_detector_p_min(const ll_detector* model) {
  return model ? model->model.p_min : 1.0;
}

ll_status ll_detector_set_p_min(ll_detector* model, double p_min) {
  return guarded([&] {
    require(model, ErrorCode::invalid_argument, "null argument");
    require(p_min >= 0.0 && p_min <= 1.0, ErrorCode::invalid_argument,
            "p_min must be in [0, 1]");
    model->model.p_min = p_min;
  });
}

void ll_detector_free(ll_detector* model) { delete model; }

ll_status ll_detector_tune(ll_detector* model, const ll_dataset* heldout,
                           double fa_target, char** report_json) {
  return guarded([&] {
    require(model && heldout, ErrorCode::invalid_argument, "null argument");
    const Dataset& ds = heldout->dataset;
    const std::vector<ScoredPair> scored =
        scored_all_pairs(ds, model->model, ds.manifest.loop_distance);
    const ThresholdTuning tuning = tune_threshold_scored(scored, fa_target);
    model->model.p_min = tuning.p_min;
    emit_json(report_json, json{{"p_min", tuning.p_min},
                                {"detection_rate", tuning.detection_rate},
                                {"false_alarm_rate", tuning.false_alarm_rate},
                                {"target_met", tuning.target_met},
                                {"pairs", scored.size()}});
  });
}

ll_status ll_detector_evaluate(const ll_detector* model,
                               const ll_dataset* dataset, double p_min,
                               char** report_json) {
  return guarded([&] {
    require(model && dataset, ErrorCode::invalid_argument, "null argument");
    const Dataset& ds = dataset->dataset;
    const double threshold = p_min >= 0 ? p_min : model->model.p_min;
    const std::vector<ScoredPair> scored =
        scored_all_pairs(ds, model->model, ds.manifest.loop_distance);
    json j = evaluation_to_json(evaluate_scored(scored, threshold));
    j["p_min"] = threshold;
    j["pairs"] = scored.size();
    emit_json(report_json, j);
  });
}

ll_status ll_detector_roc_csv(const ll_detector* model,
                              const ll_dataset* dataset, const char* out_csv,
                              char** report_json) {
  return guarded([&] {
    require(model && dataset && out_csv, ErrorCode::invalid_argument,
            "null argument");
    const Dataset& ds = dataset->dataset;
    const std::vector<ScoredPair> scored =
        scored_all_pairs(ds, model->model, ds.manifest.loop_distance);
    const std::vector<RocPoint> curve = roc_points_scored(scored);
    std::ofstream out(out_csv);
    if (!out) fail(ErrorCode::io, std::string("cannot write ") + out_csv);
    out << "threshold,false_alarm_rate,detection_rate\n";
    out.precision(12);
    for (const RocPoint& p : curve)
      out << p.threshold << ',' << p.false_alarm_rate << ','
          << p.detection_rate << '\n';
    emit_json(report_json,
              json{{"points", curve.size()}, {"csv", out_csv}});
  });
}

/* ---- evaluation matrices ----------------------------------------------- */

ll_status ll_matrices_write(const ll_dataset* dataset, const ll_detector* model,
                            double p_min, const char* out_dir,
                            char** report_json) {
  return guarded([&] {
    require(dataset && model && out_dir, ErrorCode::invalid_argument,
            "null argument");
    const Dataset& ds = dataset->dataset;
    const double threshold = p_min >= 0 ? p_min : model->model.p_min;
    namespace fs = std::filesystem;
    fs::create_directories(out_dir);
    const BinaryMatrix dist =
        distance_matrix(ds.positions(), ds.manifest.loop_distance);
    const BinaryMatrix cls =
        classification_matrix(ds.descriptors(), model->model, threshold);
    write_matrix_csv(dist, (fs::path(out_dir) / "distance.csv").string());
    write_matrix_pgm(dist, (fs::path(out_dir) / "distance.pgm").string());
    write_matrix_csv(cls, (fs::path(out_dir) / "classification.csv").string());
    write_matrix_pgm(cls, (fs::path(out_dir) / "classification.pgm").string());

    // Agreement of the two matrices off the diagonal, for quick inspection.
    std::int64_t tp = 0, fp = 0, tn = 0, fn = 0;
    for (std::size_t i = 0; i < dist.n; ++i)
      for (std::size_t j = i; j < dist.n; ++j) {
        const bool truth = dist.at(i, j), fired = cls.at(i, j);
        if (truth)
          fired ? ++tp : ++fn;
        else
          fired ? ++fp : ++tn;
      }
    emit_json(report_json, json{{"nodes", dist.n},
                                {"p_min", threshold},
                                {"tp", tp},
                                {"fp", fp},
                                {"tn", tn},
                                {"fn", fn},
                                {"out_dir", out_dir}});
  });
}

/* ---- scan registration ------------------------------------------------- */

ll_status ll_register_pair(const ll_cloud* current, const ll_cloud* candidate,
                           const char* config_path,
                           const char* const* overrides, size_t n_overrides,
                           ll_registration_result* out) {
  return guarded([&] {
    require(current && candidate && out, ErrorCode::invalid_argument,
            "null argument");
    const Config cfg = load_config(config_path, overrides, n_overrides);
    const RegistrationParams params = registration_params_from_config(cfg);
    const RegistrationResult r =
        register_pair(current->cloud, candidate->cloud, params);
    const Eigen::Matrix4d m = r.transform.matrix();
    for (int row = 0; row < 4; ++row)
      for (int col = 0; col < 4; ++col) out->matrix[4 * row + col] = m(row, col);
    out->accepted = r.accepted ? 1 : 0;
    std::snprintf(out->reason, sizeof(out->reason), "%s", to_string(r.reason));
    out->inliers = r.inlier_count;
    out->processed_current = r.processed_size_current;
    out->processed_candidate = r.processed_size_candidate;
    out->icp_residual = r.icp_residual;
    out->icp_iterations = r.icp_iterations;
  });
}

/* ---- replay ------------------------------------------------------------ */

ll_status ll_replay(const char* manifest_path, const ll_detector* model,
                    const char* config_path, const char* const* overrides,
                    size_t n_overrides, char** report_json) {
  return guarded([&] {
    require(manifest_path && model, ErrorCode::invalid_argument, "null argument");
    const Config cfg = load_config(config_path, overrides, n_overrides);
    ReplayOptions options = replay_options_from_config(cfg);
    if (!cfg.has("loopsearch.p_min")) options.search.p_min = model->model.p_min;
    const Dataset ds = build_dataset_from_file(manifest_path);
    const ReplayReport report = replay(ds, model->model, options);
    emit_json(report_json, replay_report_to_json(report));
  });
}

/* ---- synthetic datasets ------------------------------------------------ */

ll_status ll_synth_generate(const char* out_dir, const char* config_path,
                            const char* const* overrides, size_t n_overrides,
                            uint64_t seed, char** report_json) {
  return guarded([&] {
    require(out_dir, ErrorCode::invalid_argument, "null argument");
    const Config cfg = load_config(config_path, overrides, n_overrides);
    const SynthConfig synth_cfg = synth_config_from_config(cfg);
    const HistogramSpec spec = spec_from_config(cfg);
    const double loop_distance = cfg.get_double_or("synth.loop_distance", 3.0);
    const SynthResult result = synth_world(synth_cfg, seed);
    write_synth_dataset(result, spec, loop_distance, out_dir);
    std::size_t total_points = 0;
    for (const PointCloud& c : result.scans) total_points += c.size();
    emit_json(report_json,
              json{{"nodes", result.ground_truth.size()},
                   {"sessions", result.session_boundaries.size()},
                   {"total_points", total_points},
                   {"out_dir", out_dir},
                   {"seed", seed}});
  });
}

}  // extern "C"
