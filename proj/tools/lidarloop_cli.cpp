// Copyright 2026 The lidarloop Authors
// SPDX-License-Identifier: Apache-2.0
//
// Command-line front end. Every operation goes through the shared-library
// C API (lidarloop.h); this file only parses flags and formats output.
//
// Exit codes: 0 success, 1 operational failure, 2 usage error.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "lidarloop.h"

namespace {

using nlohmann::json;

int fail_op(const std::string& context) {
  std::cerr << "error: " << context;
  const char* detail = ll_last_error();
  if (detail && *detail) std::cerr << ": " << detail;
  std::cerr << '\n';
  return 1;
}

std::vector<const char*> override_ptrs(const std::vector<std::string>& sets) {
  std::vector<const char*> ptrs;
  ptrs.reserve(sets.size());
  for (const std::string& s : sets) ptrs.push_back(s.c_str());
  return ptrs;
}

struct JsonString {
  char* data = nullptr;
  ~JsonString() { ll_string_free(data); }
  json parse() const { return data ? json::parse(data) : json(); }
};

struct CloudHandle {
  ll_cloud* ptr = nullptr;
  ~CloudHandle() { ll_cloud_free(ptr); }
};
struct DatasetHandle {
  ll_dataset* ptr = nullptr;
  ~DatasetHandle() { ll_dataset_free(ptr); }
};
struct DetectorHandle {
  ll_detector* ptr = nullptr;
  ~DetectorHandle() { ll_detector_free(ptr); }
};
struct DescriptorHandle {
  ll_descriptor* ptr = nullptr;
  ~DescriptorHandle() { ll_descriptor_free(ptr); }
};

bool parse_bins(const std::string& csv, std::vector<double>& bins) {
  bins.clear();
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      bins.push_back(std::stod(item));
    } catch (const std::exception&) {
      return false;
    }
  }
  return bins.size() == LL_NUM_HISTOGRAMS;
}

int write_or_print(const json& j, const std::string& out_path, bool as_json,
                   const std::string& human) {
  if (!out_path.empty()) {
    std::ofstream out(out_path);
    if (!out) {
      std::cerr << "error: cannot write " << out_path << '\n';
      return 1;
    }
    out << j.dump(2) << '\n';
  }
  if (as_json)
    std::cout << j.dump(2) << '\n';
  else
    std::cout << human;
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"LiDAR loop-closure toolkit"};
  app.require_subcommand(1);

  // Shared flag storage.
  bool as_json = false;
  std::string config_path;
  std::vector<std::string> sets;

  auto add_common = [&](CLI::App* cmd, bool with_config) {
    cmd->add_flag("--json", as_json, "machine-readable JSON output");
    if (with_config) {
      cmd->add_option("--config", config_path, "configuration file (key = value)");
      cmd->add_option("--set", sets,
                      "override a configuration entry (section.key=value)");
    }
  };

  // features ---------------------------------------------------------------
  auto* cmd_features = app.add_subcommand(
      "features", "compute the global descriptor of one scan");
  std::string cloud_path, bins_csv, out_path;
  double r_max = 0.0;
  cmd_features->add_option("--cloud", cloud_path, "scan file (.bin or .csv)")
      ->required();
  cmd_features->add_option("--bins", bins_csv, "9 histogram bin widths, comma-separated");
  cmd_features->add_option("--r-max", r_max, "clamping range in meters");
  cmd_features->add_option("--out", out_path, "write descriptor JSON here");
  add_common(cmd_features, false);

  // synth ------------------------------------------------------------------
  auto* cmd_synth = app.add_subcommand("synth", "generate a synthetic dataset");
  std::string out_dir;
  std::uint64_t seed = 1;
  cmd_synth->add_option("--out", out_dir, "output directory")->required();
  cmd_synth->add_option("--seed", seed, "generator seed");
  add_common(cmd_synth, true);

  // train ------------------------------------------------------------------
  auto* cmd_train = app.add_subcommand("train", "train the loop detector");
  std::string manifest_path, heldout_path, model_out;
  int rounds = 50, detectors = 1;
  double loop_distance = 0.0, fa_target = 0.01;
  cmd_train->add_option("--manifest", manifest_path, "training dataset manifest")
      ->required();
  cmd_train->add_option("--out", model_out, "model file to write")->required();
  cmd_train->add_option("--T", rounds, "boosting rounds (default 50)");
  cmd_train->add_option("--seed", seed, "negative-subset seed");
  cmd_train->add_option("--loop-distance", loop_distance,
                        "positive-pair distance in meters (default: manifest)");
  cmd_train->add_option("--detectors", detectors,
                        "train this many detectors on different subsets and keep the best");
  cmd_train->add_option("--heldout", heldout_path,
                        "held-out manifest for threshold tuning / selection");
  cmd_train->add_option("--fa-target", fa_target,
                        "false-alarm target for tuning (default 0.01)");
  add_common(cmd_train, false);

  // tune -------------------------------------------------------------------
  auto* cmd_tune = app.add_subcommand(
      "tune", "tune the detection threshold against a false-alarm target");
  std::string model_path;
  cmd_tune->add_option("--model", model_path, "trained model file")->required();
  cmd_tune->add_option("--heldout", heldout_path, "held-out dataset manifest")
      ->required();
  cmd_tune->add_option("--fa-target", fa_target, "false-alarm target (default 0.01)");
  cmd_tune->add_option("--out", model_out,
                       "write the tuned model here (default: in place)");
  add_common(cmd_tune, false);

  // eval -------------------------------------------------------------------
  auto* cmd_eval = app.add_subcommand("eval", "evaluate D/FA over all pairs");
  double p_min_flag = -1.0;
  cmd_eval->add_option("--model", model_path, "trained model file")->required();
  cmd_eval->add_option("--manifest", manifest_path, "dataset manifest")->required();
  cmd_eval->add_option("--p-min", p_min_flag, "threshold (default: model)");
  add_common(cmd_eval, false);

  // roc --------------------------------------------------------------------
  auto* cmd_roc = app.add_subcommand("roc", "write the ROC curve as CSV");
  cmd_roc->add_option("--model", model_path, "trained model file")->required();
  cmd_roc->add_option("--manifest", manifest_path, "dataset manifest")->required();
  cmd_roc->add_option("--out", out_path, "CSV output file")->required();
  add_common(cmd_roc, false);

  // matrices ----------------------------------------------------------------
  auto* cmd_matrices = app.add_subcommand(
      "matrices", "write classification and distance matrices (CSV + PGM)");
  cmd_matrices->add_option("--model", model_path, "trained model file")->required();
  cmd_matrices->add_option("--manifest", manifest_path, "dataset manifest")
      ->required();
  cmd_matrices->add_option("--outdir", out_dir, "output directory")->required();
  cmd_matrices->add_option("--p-min", p_min_flag, "threshold (default: model)");
  add_common(cmd_matrices, false);

  // register ----------------------------------------------------------------
  auto* cmd_register = app.add_subcommand(
      "register", "register two scans and print the homogeneous transform");
  std::string cloud_a_path, cloud_b_path;
  cmd_register->add_option("--cloud-a", cloud_a_path, "current scan")->required();
  cmd_register->add_option("--cloud-b", cloud_b_path, "candidate scan")->required();
  add_common(cmd_register, true);

  // replay -------------------------------------------------------------------
  auto* cmd_replay = app.add_subcommand(
      "replay", "replay a dataset through loop search and registration");
  std::string report_path;
  cmd_replay->add_option("--manifest", manifest_path, "dataset manifest")
      ->required();
  cmd_replay->add_option("--model", model_path, "trained model file")->required();
  cmd_replay->add_option("--report", report_path, "write the JSON report here");
  add_common(cmd_replay, true);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  const std::vector<const char*> overrides = override_ptrs(sets);
  const char* cfg = config_path.empty() ? nullptr : config_path.c_str();

  if (cmd_features->parsed()) {
    CloudHandle cloud;
    if (ll_cloud_load(cloud_path.c_str(), &cloud.ptr) != LL_OK)
      return fail_op("loading " + cloud_path);
    std::vector<double> bins;
    if (!bins_csv.empty() && !parse_bins(bins_csv, bins)) {
      std::cerr << "error: --bins needs " << LL_NUM_HISTOGRAMS
                << " comma-separated widths\n";
      return 2;
    }
    DescriptorHandle desc;
    if (ll_descriptor_extract(cloud.ptr, bins.empty() ? nullptr : bins.data(),
                              bins.size(), r_max, &desc.ptr) != LL_OK)
      return fail_op("extracting descriptor");
    JsonString js;
    if (ll_descriptor_to_json(desc.ptr, &js.data) != LL_OK)
      return fail_op("serializing descriptor");
    std::ostringstream human;
    human << "points: " << ll_cloud_size(cloud.ptr) << '\n'
          << "descriptor entries: " << ll_descriptor_entry_count(desc.ptr)
          << " (32 type-I + " << LL_NUM_HISTOGRAMS << " histograms)\n";
    if (out_path.empty() && !as_json) human << js.parse().dump(2) << '\n';
    return write_or_print(js.parse(), out_path, as_json, human.str());
  }

  if (cmd_synth->parsed()) {
    JsonString report;
    if (ll_synth_generate(out_dir.c_str(), cfg, overrides.data(),
                          overrides.size(), seed, &report.data) != LL_OK)
      return fail_op("generating dataset");
    const json j = report.parse();
    std::ostringstream human;
    human << "wrote " << j["nodes"] << " nodes (" << j["total_points"]
          << " points) to " << out_dir << '\n';
    return write_or_print(j, "", as_json, human.str());
  }

  if (cmd_train->parsed()) {
    DatasetHandle train_set;
    if (ll_dataset_open(manifest_path.c_str(), &train_set.ptr) != LL_OK)
      return fail_op("opening " + manifest_path);
    DetectorHandle model;
    json report;
    if (detectors > 1 || !heldout_path.empty()) {
      if (heldout_path.empty()) {
        std::cerr << "error: --detectors > 1 needs --heldout\n";
        return 2;
      }
      DatasetHandle heldout;
      if (ll_dataset_open(heldout_path.c_str(), &heldout.ptr) != LL_OK)
        return fail_op("opening " + heldout_path);
      JsonString js;
      if (ll_detector_train_select(train_set.ptr, heldout.ptr, rounds,
                                   loop_distance, detectors, fa_target, seed,
                                   &model.ptr, &js.data) != LL_OK)
        return fail_op("training");
      report = js.parse();
    } else {
      if (ll_detector_train(train_set.ptr, rounds, loop_distance, seed,
                            &model.ptr) != LL_OK)
        return fail_op("training");
      report = json{{"detectors", 1}};
    }
    if (ll_detector_save(model.ptr, model_out.c_str()) != LL_OK)
      return fail_op("writing " + model_out);
    report["model"] = model_out;
    report["p_min"] = ll_detector_p_min(model.ptr);
    std::ostringstream human;
    human << "model written to " << model_out
          << " (p_min=" << ll_detector_p_min(model.ptr) << ")\n";
    return write_or_print(report, "", as_json, human.str());
  }

  if (cmd_tune->parsed()) {
    DetectorHandle model;
    if (ll_detector_load(model_path.c_str(), &model.ptr) != LL_OK)
      return fail_op("loading " + model_path);
    DatasetHandle heldout;
    if (ll_dataset_open(heldout_path.c_str(), &heldout.ptr) != LL_OK)
      return fail_op("opening " + heldout_path);
    JsonString js;
    if (ll_detector_tune(model.ptr, heldout.ptr, fa_target, &js.data) != LL_OK)
      return fail_op("tuning");
    const std::string target = model_out.empty() ? model_path : model_out;
    if (ll_detector_save(model.ptr, target.c_str()) != LL_OK)
      return fail_op("writing " + target);
    const json j = js.parse();
    std::ostringstream human;
    human << "p_min = " << j["p_min"] << "\nD = " << j["detection_rate"]
          << "\nFA = " << j["false_alarm_rate"] << '\n'
          << (j["target_met"].get<bool>() ? "" : "warning: FA target not met\n");
    return write_or_print(j, "", as_json, human.str());
  }

  if (cmd_eval->parsed()) {
    DetectorHandle model;
    if (ll_detector_load(model_path.c_str(), &model.ptr) != LL_OK)
      return fail_op("loading " + model_path);
    DatasetHandle dataset;
    if (ll_dataset_open(manifest_path.c_str(), &dataset.ptr) != LL_OK)
      return fail_op("opening " + manifest_path);
    JsonString js;
    if (ll_detector_evaluate(model.ptr, dataset.ptr, p_min_flag, &js.data) != LL_OK)
      return fail_op("evaluating");
    const json j = js.parse();
    std::ostringstream human;
    human << "pairs: " << j["pairs"] << "  p_min: " << j["p_min"] << '\n'
          << "TP=" << j["tp"] << " FP=" << j["fp"] << " TN=" << j["tn"]
          << " FN=" << j["fn"] << '\n';
    if (j.contains("detection_rate")) human << "D  = " << j["detection_rate"] << '\n';
    if (j.contains("false_alarm_rate"))
      human << "FA = " << j["false_alarm_rate"] << '\n';
    return write_or_print(j, "", as_json, human.str());
  }

  if (cmd_roc->parsed()) {
    DetectorHandle model;
    if (ll_detector_load(model_path.c_str(), &model.ptr) != LL_OK)
      return fail_op("loading " + model_path);
    DatasetHandle dataset;
    if (ll_dataset_open(manifest_path.c_str(), &dataset.ptr) != LL_OK)
      return fail_op("opening " + manifest_path);
    JsonString js;
    if (ll_detector_roc_csv(model.ptr, dataset.ptr, out_path.c_str(), &js.data) !=
        LL_OK)
      return fail_op("computing ROC");
    const json j = js.parse();
    std::ostringstream human;
    human << j["points"] << " ROC points written to " << out_path << '\n';
    return write_or_print(j, "", as_json, human.str());
  }

  if (cmd_matrices->parsed()) {
    DetectorHandle model;
    if (ll_detector_load(model_path.c_str(), &model.ptr) != LL_OK)
      return fail_op("loading " + model_path);
    DatasetHandle dataset;
    if (ll_dataset_open(manifest_path.c_str(), &dataset.ptr) != LL_OK)
      return fail_op("opening " + manifest_path);
    JsonString js;
    if (ll_matrices_write(dataset.ptr, model.ptr, p_min_flag, out_dir.c_str(),
                          &js.data) != LL_OK)
      return fail_op("writing matrices");
    const json j = js.parse();
    std::ostringstream human;
    human << "matrices for " << j["nodes"] << " nodes written to " << out_dir
          << " (p_min=" << j["p_min"] << ")\n";
    return write_or_print(j, "", as_json, human.str());
  }

  if (cmd_register->parsed()) {
    CloudHandle a, b;
    if (ll_cloud_load(cloud_a_path.c_str(), &a.ptr) != LL_OK)
      return fail_op("loading " + cloud_a_path);
    if (ll_cloud_load(cloud_b_path.c_str(), &b.ptr) != LL_OK)
      return fail_op("loading " + cloud_b_path);
    ll_registration_result result;
    if (ll_register_pair(a.ptr, b.ptr, cfg, overrides.data(), overrides.size(),
                         &result) != LL_OK)
      return fail_op("registering");
    json j{{"accepted", result.accepted != 0},
           {"reason", result.reason},
           {"inliers", result.inliers},
           {"processed_current", result.processed_current},
           {"processed_candidate", result.processed_candidate},
           {"icp_residual", result.icp_residual},
           {"icp_iterations", result.icp_iterations},
           {"transform", std::vector<double>(result.matrix, result.matrix + 16)}};
    std::ostringstream human;
    for (int row = 0; row < 4; ++row) {
      for (int col = 0; col < 4; ++col) {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%12.6f", result.matrix[4 * row + col]);
        human << buf << (col == 3 ? "\n" : " ");
      }
    }
    human << "verdict: " << (result.accepted ? "accepted" : "rejected") << " ("
          << result.reason << "), inliers=" << result.inliers << '\n';
    const int code = write_or_print(j, "", as_json, human.str());
    if (code != 0) return code;
    return result.accepted ? 0 : 1;
  }

  if (cmd_replay->parsed()) {
    DetectorHandle model;
    if (ll_detector_load(model_path.c_str(), &model.ptr) != LL_OK)
      return fail_op("loading " + model_path);
    JsonString js;
    if (ll_replay(manifest_path.c_str(), model.ptr, cfg, overrides.data(),
                  overrides.size(), &js.data) != LL_OK)
      return fail_op("replaying");
    const json j = js.parse();
    std::ostringstream human;
    human << "nodes: " << j["nodes"] << '\n'
          << "loops: attempted=" << j["attempted"] << " verified=" << j["verified"]
          << " registered=" << j["registered"] << " accepted=" << j["accepted"]
          << '\n';
    if (j.contains("detection_rate"))
      human << "detector on replayed pairs: D=" << j["detection_rate"]
            << " FA=" << j["false_alarm_rate"] << '\n';
    if (j.contains("endpoint_error_odom"))
      human << "endpoint error: odometry=" << j["endpoint_error_odom"]
            << " m, optimized=" << j["endpoint_error_optimized"] << " m\n";
    return write_or_print(j, report_path, as_json, human.str());
  }

  return 2;
}
