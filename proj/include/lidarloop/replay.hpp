// Copyright 2026 The lidarloop Authors
// SPDX-License-Identifier: Apache-2.0
//
// Replayable evaluation: feeds dataset nodes in order through the pose
// graph, loop search and scan registration, applying registration results at
// the next update boundary (the deterministic stand-in for the parallel
// registration worker). Produces a full report with the loop funnel,
// detector rates against ground truth, per-loop transforms, mode
// transitions and stage timings.

#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "lidarloop/dataset.hpp"
#include "lidarloop/loopsearch.hpp"
#include "lidarloop/posegraph.hpp"
#include "lidarloop/registration.hpp"

namespace lidarloop {

struct ReplayOptions {
  SearchConfig search;
  RegistrationParams registration;

  bool optimize_on_loop = true;
  int optimize_max_iterations = 50;
  double optimize_tolerance = 1e-9;

  // Step covariance fed to the pose graph per odometry edge.
  double odom_sigma_xy = 0.02;

  std::string dump_nodes_csv;  // optional pose-graph dumps
  std::string dump_edges_csv;
};

struct LoopRecord {
  int current_id = -1;
  int candidate_id = -1;
  double probability = 0.0;
  SearchMode mode = SearchMode::local;
  bool registration_ran = false;
  bool accepted = false;
  RejectReason reason = RejectReason::none;
  RigidTransform transform;
  int inliers = 0;
  double gt_distance = 0.0;
  bool gt_is_loop = false;
  double registration_ms = 0.0;
};

struct ReplayReport {
  std::size_t node_count = 0;

  // Loop funnel: accepted <= registered <= verified <= attempted.
  std::size_t attempted = 0;   // detector fired above p_min
  std::size_t verified = 0;    // neighborhood / multi-session verification passed
  std::size_t registered = 0;  // registrations executed
  std::size_t accepted = 0;    // loop edges added

  // Detector rates over every candidate pair scored during the replay,
  // labeled by ground-truth distance.
  std::int64_t scored_tp = 0, scored_fp = 0, scored_tn = 0, scored_fn = 0;
  double detection_rate = 0.0;
  double false_alarm_rate = 0.0;
  bool rates_defined = false;

  std::vector<LoopRecord> loops;
  std::vector<ModeTransition> transitions;

  double search_ms = 0.0;
  double registration_ms = 0.0;
  double optimize_ms = 0.0;

  /// True when every optimizer run kept its residual non-increasing.
  bool optimize_monotone = true;

  bool endpoint_metrics = false;  // single-session datasets only
  double endpoint_error_odom = 0.0;
  double endpoint_error_optimized = 0.0;

  bool funnel_ok() const {
    return accepted <= registered && registered <= verified &&
           verified <= attempted;
  }
};

/// Deterministic for fixed seeds in the options and dataset.
ReplayReport replay(const Dataset& dataset, const DetectorModel& model,
                    const ReplayOptions& options);

nlohmann::json replay_report_to_json(const ReplayReport& report);

}  // namespace lidarloop
