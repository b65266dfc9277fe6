// Copyright 2026 The lidarloop Authors
// SPDX-License-Identifier: Apache-2.0

#include "lidarloop/replay.hpp"

#include <algorithm>
#include <chrono>

#include "lidarloop/error.hpp"
#include "lidarloop/rng.hpp"

namespace lidarloop {

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

struct PendingResult {
  int current_id;
  int candidate_id;
  RegistrationResult result;
};

void check_accepted_criteria(const RegistrationResult& r,
                             const RegistrationParams& params) {
  // Every accepted result must satisfy all three verification criteria.
  require(r.processed_size_current >= params.n_p_min &&
              r.processed_size_candidate >= params.n_p_min,
          ErrorCode::numeric, "accepted registration violates n_p_min");
  require(r.inlier_count >= params.n_inliers, ErrorCode::numeric,
          "accepted registration violates n_inliers");
  require(r.transform.translation.norm() <= params.t_max, ErrorCode::numeric,
          "accepted registration violates t_max");
}

}  // namespace

ReplayReport replay(const Dataset& dataset, const DetectorModel& model,
                    const ReplayOptions& options) {
  require(!dataset.nodes.empty(), ErrorCode::precondition, "replay: empty dataset");
  require(model.spec_fingerprint.empty() ||
              model.spec_fingerprint == dataset.manifest.spec.fingerprint(),
          ErrorCode::dimension_mismatch,
          "replay: model was trained under a different histogram spec");
  options.search.validate();
  options.registration.validate();

  ReplayReport report;
  report.node_count = dataset.size();

  const LoopPredictor predictor = make_predictor(model);
  const double loop_distance = dataset.manifest.loop_distance;

  PoseGraph graph(dataset.nodes.front().odom);
  graph.reset_covariance(0, 0.0);

  WorkingMemory wm;
  wm.buffer_size = options.search.n_buffer;
  wm.nodes.reserve(dataset.size());

  SearchState state;
  std::optional<PendingResult> pending;

  const Eigen::Matrix2d step_cov =
      Eigen::Matrix2d::Identity() * options.odom_sigma_xy * options.odom_sigma_xy;

  const auto is_session_start = [&](std::size_t i) {
    const auto& sb = dataset.manifest.session_boundaries;
    return std::find(sb.begin(), sb.end(), i) != sb.end();
  };

  // Delivers a completed registration: the loop edge resets the covariance
  // of the node that requested it, then the graph is re-optimized.
  const auto apply_pending = [&]() {
    if (!pending) return;
    if (pending->result.accepted) {
      check_accepted_criteria(pending->result, options.registration);
      graph.add_loop_from_registration(pending->candidate_id,
                                       pending->current_id, pending->result);
      ++report.accepted;
      notify_registration_outcome(state, true);
      if (options.optimize_on_loop) {
        const auto t0 = Clock::now();
        const PoseGraph::OptimizeResult opt = graph.optimize(
            options.optimize_max_iterations, options.optimize_tolerance);
        report.optimize_ms += ms_since(t0);
        for (std::size_t k = 1; k < opt.chi2_history.size(); ++k)
          if (opt.chi2_history[k] > opt.chi2_history[k - 1] + 1e-9)
            report.optimize_monotone = false;
      }
    } else {
      notify_registration_outcome(state, false);
    }
    pending.reset();
  };

  for (std::size_t i = 0; i < dataset.size(); ++i) {
    const DatasetNode& node = dataset.nodes[i];

    // Completion messages arrive at the update boundary; odometry added
    // below then propagates from the floored covariance.
    apply_pending();

    // Extend the pose graph.
    if (i > 0) {
      if (is_session_start(i)) {
        graph.add_session_start(node.odom);
        graph.reset_covariance(static_cast<int>(i), 0.0);
        state.enter_global(static_cast<int>(i));
      } else {
        OdometryEdge edge;
        edge.from = static_cast<int>(i) - 1;
        edge.to = static_cast<int>(i);
        edge.relative = dataset.nodes[i - 1].odom.between(node.odom);
        edge.step_covariance = step_cov;
        graph.add_odometry(edge);
      }
    }

    // Refresh working-memory pose estimates from the graph, then append the
    // current node.
    for (MapNode& m : wm.nodes) {
      m.pose = graph.node(m.id).pose;
      m.covariance = graph.node(m.id).covariance;
    }
    MapNode current;
    current.id = static_cast<int>(i);
    current.session_id = node.session;
    current.pose = graph.node(current.id).pose;
    current.covariance = graph.node(current.id).covariance;
    current.descriptor = node.descriptor;
    wm.nodes.push_back(std::move(current));

    const std::size_t n_local = graph.component_size(static_cast<int>(i));

    const auto t_search = Clock::now();
    UpdateResult update = process_map_update(wm, static_cast<int>(i), state,
                                             options.search, predictor, n_local);
    report.search_ms += ms_since(t_search);

    if (update.detection) ++report.attempted;
    if (update.verified) ++report.verified;

    for (const Detection& scored : update.scored) {
      const double gt_dist =
          (dataset.nodes[scored.node_id].pose.position() -
           node.pose.position())
              .norm();
      const bool truth = gt_dist < loop_distance;
      const bool fired = scored.probability > options.search.p_min;
      if (truth)
        fired ? ++report.scored_tp : ++report.scored_fn;
      else
        fired ? ++report.scored_fp : ++report.scored_tn;
    }

    if (update.request) {
      const LoopRequest& req = *update.request;
      LoopRecord record;
      record.current_id = req.current_id;
      record.candidate_id = req.candidate_id;
      record.probability = req.probability;
      record.mode = req.mode;
      record.gt_distance = (dataset.nodes[req.candidate_id].pose.position() -
                            dataset.nodes[req.current_id].pose.position())
                               .norm();
      record.gt_is_loop = record.gt_distance < loop_distance;

      RegistrationParams params = options.registration;
      params.seed = mix_seed(options.registration.seed,
                             mix_seed(static_cast<std::uint64_t>(req.current_id),
                                      static_cast<std::uint64_t>(req.candidate_id)));
      params.filter.seed = params.seed;
      const auto t_reg = Clock::now();
      const PointCloud current_scan =
          load_cloud(dataset.nodes[req.current_id].scan_path);
      const PointCloud candidate_scan =
          load_cloud(dataset.nodes[req.candidate_id].scan_path);
      const RegistrationResult result =
          register_pair(current_scan, candidate_scan, params);
      record.registration_ms = ms_since(t_reg);
      report.registration_ms += record.registration_ms;
      ++report.registered;

      record.registration_ran = true;
      record.accepted = result.accepted;
      record.reason = result.reason;
      record.transform = result.transform;
      record.inliers = result.inlier_count;
      report.loops.push_back(record);

      // Completion is delivered at the next update boundary.
      pending = PendingResult{req.current_id, req.candidate_id, result};
    }
  }

  // A request emitted at the last node completes after the replay.
  apply_pending();

  report.transitions = state.transitions;

  const std::int64_t pos = report.scored_tp + report.scored_fn;
  const std::int64_t neg = report.scored_fp + report.scored_tn;
  if (pos > 0 && neg > 0) {
    report.detection_rate = static_cast<double>(report.scored_tp) / pos;
    report.false_alarm_rate = static_cast<double>(report.scored_fp) / neg;
    report.rates_defined = true;
  }

  if (dataset.manifest.session_boundaries.size() == 1) {
    report.endpoint_metrics = true;
    const Pose2& gt_last = dataset.nodes.back().pose;
    const Pose2& odom_last = dataset.nodes.back().odom;
    const Pose2& opt_last = graph.node(static_cast<int>(dataset.size()) - 1).pose;
    report.endpoint_error_odom =
        (odom_last.position() - gt_last.position()).norm();
    report.endpoint_error_optimized =
        (opt_last.position() - gt_last.position()).norm();
  }

  if (!options.dump_nodes_csv.empty()) graph.dump_nodes_csv(options.dump_nodes_csv);
  if (!options.dump_edges_csv.empty()) graph.dump_edges_csv(options.dump_edges_csv);

  require(report.funnel_ok(), ErrorCode::numeric,
          "replay: loop funnel inequality violated");
  return report;
}

nlohmann::json replay_report_to_json(const ReplayReport& report) {
  using nlohmann::json;
  json loops = json::array();
  for (const LoopRecord& r : report.loops) {
    json transform = json::array();
    const Eigen::Matrix4d m = r.transform.matrix();
    for (int row = 0; row < 4; ++row)
      for (int col = 0; col < 4; ++col) transform.push_back(m(row, col));
    loops.push_back(json{{"current", r.current_id},
                         {"candidate", r.candidate_id},
                         {"probability", r.probability},
                         {"mode", r.mode == SearchMode::local ? "local" : "global"},
                         {"registration_ran", r.registration_ran},
                         {"accepted", r.accepted},
                         {"reason", to_string(r.reason)},
                         {"transform", transform},
                         {"inliers", r.inliers},
                         {"gt_distance", r.gt_distance},
                         {"gt_is_loop", r.gt_is_loop},
                         {"registration_ms", r.registration_ms}});
  }
  json transitions = json::array();
  for (const ModeTransition& t : report.transitions)
    transitions.push_back(
        json{{"node", t.node_id},
             {"from", t.from == SearchMode::local ? "local" : "global"},
             {"to", t.to == SearchMode::local ? "local" : "global"}});
  json j{{"nodes", report.node_count},
         {"attempted", report.attempted},
         {"verified", report.verified},
         {"registered", report.registered},
         {"accepted", report.accepted},
         {"loops", loops},
         {"transitions", transitions},
         {"optimize_monotone", report.optimize_monotone},
         {"timing_ms",
          json{{"search", report.search_ms},
               {"registration", report.registration_ms},
               {"optimize", report.optimize_ms}}}};
  if (report.rates_defined) {
    j["detection_rate"] = report.detection_rate;
    j["false_alarm_rate"] = report.false_alarm_rate;
    j["scored"] = json{{"tp", report.scored_tp},
                       {"fp", report.scored_fp},
                       {"tn", report.scored_tn},
                       {"fn", report.scored_fn}};
  }
  if (report.endpoint_metrics) {
    j["endpoint_error_odom"] = report.endpoint_error_odom;
    j["endpoint_error_optimized"] = report.endpoint_error_optimized;
  }
  return j;
}

}  // namespace lidarloop
