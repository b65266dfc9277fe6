// Copyright 2026 The lidarloop Authors
// SPDX-License-Identifier: Apache-2.0
//
// Acceptance suite. Each criterion prints one PASS/FAIL line; the binary
// exits non-zero if any criterion fails. Thresholds are fixed here, not
// tuned at run time.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "lidarloop/dataset.hpp"
#include "lidarloop/descriptor.hpp"
#include "lidarloop/detector.hpp"
#include "lidarloop/loopsearch.hpp"
#include "lidarloop/metrics.hpp"
#include "lidarloop/posegraph.hpp"
#include "lidarloop/registration.hpp"
#include "lidarloop/replay.hpp"
#include "lidarloop/rng.hpp"
#include "lidarloop/synth.hpp"
#include "support/synth_fixtures.hpp"

using namespace lidarloop;
using lidarloop::testing::make_registration_pair;
using lidarloop::testing::random_box_cloud;
using lidarloop::testing::rotate_yaw;
using lidarloop::testing::synth_registration_params;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

struct Check {
  bool ok = true;
  std::vector<std::string> notes;

  void expect(bool condition, const std::string& what) {
    if (!condition) {
      ok = false;
      notes.push_back("FAILED: " + what);
    }
  }
  void note(const std::string& what) { notes.push_back(what); }
};

struct Suite {
  int failures = 0;

  void run(const std::string& name, const std::function<void(Check&)>& fn) {
    Check check;
    try {
      fn(check);
    } catch (const std::exception& e) {
      check.ok = false;
      check.notes.push_back(std::string("exception: ") + e.what());
    }
    std::printf("[%s] %s\n", check.ok ? "PASS" : "FAIL", name.c_str());
    for (const std::string& note : check.notes)
      std::printf("        %s\n", note.c_str());
    if (!check.ok) ++failures;
  }
};

char buffer[256];

std::string fmt(const char* format, double a, double b = 0.0, double c = 0.0) {
  std::snprintf(buffer, sizeof(buffer), format, a, b, c);
  return buffer;
}

// ---- shared synthetic-detector assets (built once, reused) ---------------

struct DetectorAssets {
  SynthResult train_world;
  SynthResult held_world;
  std::vector<Descriptor> train_descriptors, held_descriptors;
  std::vector<Eigen::Vector2d> train_positions, held_positions;
  DetectorModel model;
  ThresholdTuning tuning;
  double build_seconds = 0.0;
};

SynthConfig acceptance_world() {
  SynthConfig cfg;
  cfg.side = 24.0;  // 96 nodes per lap, 192 per two-lap world
  cfg.laps = 2;
  return cfg;
}

const DetectorAssets& detector_assets() {
  static const DetectorAssets assets = [] {
    DetectorAssets a;
    const auto t0 = Clock::now();
    a.train_world = synth_world(acceptance_world(), 101);
    a.held_world = synth_world(acceptance_world(), 202);
    const HistogramSpec spec;
    for (std::size_t i = 0; i < a.train_world.scans.size(); ++i) {
      a.train_descriptors.push_back(
          extract_descriptor(a.train_world.scans[i], spec));
      a.train_positions.push_back(a.train_world.ground_truth[i].position());
    }
    for (std::size_t i = 0; i < a.held_world.scans.size(); ++i) {
      a.held_descriptors.push_back(
          extract_descriptor(a.held_world.scans[i], spec));
      a.held_positions.push_back(a.held_world.ground_truth[i].position());
    }
    const std::vector<LabeledPair> pairs = build_training_set(
        a.train_positions, a.train_descriptors, 3.0, 7);
    a.model = train_detector(pairs, 50);
    a.model.spec_fingerprint = spec.fingerprint();
    const std::vector<LabeledPair> held_pairs =
        build_all_pairs(a.held_positions, a.held_descriptors, 3.0);
    a.tuning = tune_threshold(a.model, held_pairs, 0.01);
    a.model.p_min = a.tuning.p_min;
    a.build_seconds = seconds_since(t0);
    return a;
  }();
  return assets;
}

// ---- criteria -------------------------------------------------------------

void criterion_search_radius(Check& check) {
  check.expect(search_radius(0.0, 3.0, 0.25) == 3.0,
               "search_radius(0, 3, 0.25) must equal r_min exactly");
  const double r1 = search_radius(1.0, 3.0, 0.25);
  check.expect(std::abs(r1 - 4.223825968019963) < 1e-6,
               fmt("search_radius(1, 3, 0.25) = %.9f, expected 4.223825968", r1));
  const double r4 = search_radius(4.0, 7.5, 0.25);
  check.expect(std::abs(r4 - 9.947651936039926) < 1e-6,
               fmt("search_radius(4, 7.5, 0.25) = %.9f, expected 9.947651936", r4));
}

void criterion_yaw_invariance(Check& check) {
  Rng rng(2026);
  const HistogramSpec spec;
  std::size_t failures = 0;
  for (int cloud_idx = 0; cloud_idx < 100; ++cloud_idx) {
    const std::size_t n = 200 + rng.uniform_index(1800);
    const PointCloud cloud = random_box_cloud(rng, n, 30.0, -2.0, 8.0);
    const Descriptor base = extract_descriptor(cloud, spec);
    for (int rot = 0; rot < 10; ++rot) {
      const double yaw = rng.uniform(-M_PI, M_PI);
      const Descriptor turned = extract_descriptor(rotate_yaw(cloud, yaw), spec);
      for (int f = 0; f < kNumType1Features; ++f) {
        const double a = base.type1[f], b = turned.type1[f];
        if (std::abs(a - b) > 1e-9 + 1e-6 * std::max(std::abs(a), std::abs(b)))
          ++failures;
      }
      for (int k = 0; k < kNumHistograms; ++k)
        if (base.type2[k] != turned.type2[k]) ++failures;
    }
  }
  check.expect(failures == 0,
               fmt("%g invariance violations over 100 clouds x 10 yaws",
                   static_cast<double>(failures)));
}

void criterion_adaboost(Check& check) {
  // (a) Hand-computed round: one misclassification among 4 uniform weights.
  std::vector<LabeledPair> four(4);
  const double values[4] = {0, 1, 2, 3};
  const bool labels[4] = {true, true, false, true};
  for (int i = 0; i < 4; ++i) {
    four[i].comparison.fill(0.0);
    four[i].comparison[0] = values[i];
    four[i].is_loop = labels[i];
  }
  std::vector<TrainingRound> trace;
  train_detector(four, 1, &trace);
  check.expect(trace.size() == 1 && std::abs(trace[0].epsilon - 0.25) < 1e-12,
               "first-round weighted error must be exactly 0.25");
  check.expect(std::abs(trace[0].alpha - 0.5493061443340549) < 1e-12,
               fmt("alpha = %.16f, expected 0.5*ln3", trace[0].alpha));

  // (b) Separable toy set: training error 0 by T = 10.
  Rng rng(5);
  std::vector<LabeledPair> toy;
  for (int i = 0; i < 30; ++i) {
    LabeledPair p;
    p.comparison.fill(0.0);
    p.is_loop = i % 2 == 0;
    p.comparison[4] = p.is_loop ? rng.uniform(-2.0, -0.1) : rng.uniform(1.0, 2.0);
    toy.push_back(p);
  }
  const DetectorModel toy_model = train_detector(toy, 10);
  std::size_t wrong = 0;
  for (const LabeledPair& p : toy) {
    double h = 0;
    for (const DecisionStump& s : toy_model.stumps)
      h += s.alpha * s.vote(p.comparison);
    if ((h > 0) != p.is_loop) ++wrong;
  }
  check.expect(wrong == 0, "separable toy set not fit to zero training error");

  // (c) The boosting bound holds every round on an overlapping set.
  std::vector<LabeledPair> noisy;
  for (int i = 0; i < 400; ++i) {
    LabeledPair p;
    p.comparison.fill(0.0);
    p.is_loop = rng.uniform() < 0.5;
    p.comparison[0] = rng.normal(p.is_loop ? 0.5 : -0.5, 1.0);
    p.comparison[1] = rng.normal(p.is_loop ? -0.2 : 0.2, 1.2);
    noisy.push_back(p);
  }
  trace.clear();
  const DetectorModel noisy_model = train_detector(noisy, 30, &trace);
  double bound = 1.0;
  DetectorModel prefix;
  bool bound_ok = true;
  for (std::size_t t = 0; t < trace.size(); ++t) {
    bound *= 2.0 * std::sqrt(trace[t].epsilon * (1.0 - trace[t].epsilon));
    prefix.stumps.push_back(noisy_model.stumps[t]);
    std::size_t errors = 0;
    for (const LabeledPair& p : noisy) {
      double h = 0;
      for (const DecisionStump& s : prefix.stumps)
        h += s.alpha * s.vote(p.comparison);
      if ((h > 0) != p.is_loop) ++errors;
    }
    if (static_cast<double>(errors) / noisy.size() > bound + 1e-12)
      bound_ok = false;
  }
  check.expect(bound_ok, "training error exceeded the boosting bound");
}

void criterion_threshold_tuning(Check& check) {
  // Contract, brute-forced over random held-out sets.
  Rng rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<ScoredPair> scored;
    for (int i = 0; i < 300; ++i) {
      const bool label = rng.uniform() < 0.25;
      scored.push_back(
          {label ? rng.uniform(0.2, 1.0) : rng.uniform(0.0, 0.8), label});
    }
    const double target = rng.uniform(0.01, 0.2);
    const ThresholdTuning tuned = tune_threshold_scored(scored, target);
    if (!tuned.target_met) continue;
    check.expect(evaluate_scored(scored, tuned.p_min).false_alarm_rate < target,
                 "tuned threshold misses the FA target");
    for (const ScoredPair& s : scored) {
      if (s.probability >= tuned.p_min) continue;
      if (evaluate_scored(scored, s.probability).false_alarm_rate < target) {
        check.expect(false, "a smaller candidate threshold also met the target");
        break;
      }
    }
  }

  // Synthetic-world detector at T = 50 with the 3 m loop distance.
  const DetectorAssets& assets = detector_assets();
  check.note(fmt("held-out tuning: p_min=%.4f D=%.3f FA=%.5f",
                 assets.tuning.p_min, assets.tuning.detection_rate,
                 assets.tuning.false_alarm_rate));
  check.note(fmt("build+train+tune: %.1f s for %g nodes", assets.build_seconds,
                 static_cast<double>(assets.train_world.scans.size())));
  check.expect(assets.tuning.target_met &&
                   assets.tuning.false_alarm_rate < 0.01,
               "tuned FA must be below 1%");
  check.expect(assets.tuning.detection_rate > 0.30, "tuned D must exceed 30%");
  check.expect(assets.build_seconds < 60.0,
               fmt("detector pipeline took %.1f s (budget 60 s)",
                   assets.build_seconds));
}

void criterion_registration_recovery(Check& check) {
  const RegistrationParams params = synth_registration_params();
  int recovered = 0;
  double worst_seconds = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    const auto pair =
        make_registration_pair(1000 + trial, 0.3, 3.0, 0.01);
    const auto t0 = Clock::now();
    const RegistrationResult result =
        register_pair(pair.current, pair.candidate, params);
    const double elapsed = seconds_since(t0);
    worst_seconds = std::max(worst_seconds, elapsed);
    if (!result.accepted) continue;
    const double t_err =
        (result.transform.translation - pair.true_transform.translation).norm();
    const double r_err =
        RigidTransform{result.transform.rotation *
                           pair.true_transform.rotation.transpose(),
                       Eigen::Vector3d::Zero()}
            .rotation_angle();
    if (t_err <= 0.1 && r_err <= 2.0 * M_PI / 180.0) ++recovered;
    // Accepted results always satisfy the three criteria.
    if (result.accepted) {
      if (result.processed_size_current < params.n_p_min ||
          result.processed_size_candidate < params.n_p_min ||
          result.inlier_count < params.n_inliers ||
          result.transform.translation.norm() > params.t_max)
        check.expect(false, "accepted result violates a verification criterion");
    }
  }
  check.note(fmt("recovered %g/20 pairs, slowest %.2f s",
                 static_cast<double>(recovered), worst_seconds));
  check.expect(recovered >= 19, "at least 95% of pairs must recover the pose");
  check.expect(worst_seconds <= 10.0, "every pair must register within 10 s");
}

void criterion_svd_ransac(Check& check) {
  Rng rng(13);
  // SVD exactness on noise-free correspondences.
  double worst_rot = 0.0, worst_trans = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    PointCloud a = random_box_cloud(rng, 40, 8.0);
    RigidTransform truth;
    const Eigen::Vector3d axis =
        Eigen::Vector3d(rng.normal(), rng.normal(), rng.normal()).normalized();
    truth.rotation =
        Eigen::AngleAxisd(rng.uniform(-M_PI, M_PI), axis).toRotationMatrix();
    truth.translation = {rng.uniform(-10, 10), rng.uniform(-10, 10),
                         rng.uniform(-10, 10)};
    const PointCloud b = lidarloop::testing::transform_cloud(a, truth);
    CorrespondenceSet all;
    for (std::size_t i = 0; i < a.size(); ++i)
      all.push_back({static_cast<int>(i), static_cast<int>(i)});
    const RigidTransform est = estimate_svd(all, a, b);
    worst_rot = std::max(worst_rot, (est.rotation - truth.rotation).norm());
    worst_trans =
        std::max(worst_trans, (est.translation - truth.translation).norm());
  }
  check.note(fmt("svd worst errors: rotation %.2e, translation %.2e", worst_rot,
                 worst_trans));
  check.expect(worst_rot < 1e-9 && worst_trans < 1e-9,
               "noise-free SVD recovery must be exact to 1e-9");

  // RANSAC with 20% planted outliers: exact inlier recovery in >= 99 seeds.
  int exact = 0;
  for (int seed = 0; seed < 100; ++seed) {
    Rng trial_rng(500 + seed);
    PointCloud a = random_box_cloud(trial_rng, 50, 8.0);
    RigidTransform truth;
    const Eigen::Vector3d axis = Eigen::Vector3d(trial_rng.normal(),
                                                 trial_rng.normal(),
                                                 trial_rng.normal())
                                     .normalized();
    truth.rotation = Eigen::AngleAxisd(trial_rng.uniform(-M_PI, M_PI), axis)
                         .toRotationMatrix();
    truth.translation = {trial_rng.uniform(-3, 3), trial_rng.uniform(-3, 3),
                         trial_rng.uniform(-3, 3)};
    PointCloud b = lidarloop::testing::transform_cloud(a, truth);
    std::set<std::size_t> planted;
    while (planted.size() < 10) planted.insert(trial_rng.uniform_index(50));
    for (std::size_t i : planted) {
      const Eigen::Vector3d dir = Eigen::Vector3d(trial_rng.normal(),
                                                  trial_rng.normal(),
                                                  trial_rng.normal())
                                      .normalized();
      b.points[i].x += 2.5 * dir.x();
      b.points[i].y += 2.5 * dir.y();
      b.points[i].z += 2.5 * dir.z();
    }
    CorrespondenceSet all;
    for (std::size_t i = 0; i < a.size(); ++i)
      all.push_back({static_cast<int>(i), static_cast<int>(i)});
    const CorrespondenceSet inliers =
        ransac_reject(all, a, b, 0.5, 1000, 900 + seed);
    std::set<int> got;
    for (const Correspondence& c : inliers) got.insert(c.index_a);
    std::set<int> expected;
    for (std::size_t i = 0; i < a.size(); ++i)
      if (!planted.contains(i)) expected.insert(static_cast<int>(i));
    if (got == expected) ++exact;
  }
  check.note(fmt("ransac exact recovery in %g/100 seeds",
                 static_cast<double>(exact)));
  check.expect(exact >= 99, "RANSAC must recover the planted set in >= 99 seeds");
}

void criterion_verification_gates(Check& check) {
  const auto pair = make_registration_pair(4242, 0.4, 1.8, 0.0);

  RegistrationParams gate = synth_registration_params();
  gate.filter.n_p_max = 2000000;
  gate.n_p_min = 1000000;
  RegistrationResult r = register_pair(pair.current, pair.candidate, gate);
  check.expect(!r.accepted && r.reason == RejectReason::too_few_points,
               "undersized processed cloud must reject with too_few_points");

  gate = synth_registration_params();
  gate.n_inliers = 1000000;
  r = register_pair(pair.current, pair.candidate, gate);
  check.expect(!r.accepted && r.reason == RejectReason::too_few_inliers,
               "inlier deficit must reject with too_few_inliers");

  const auto far = make_registration_pair(4243, 3.3, 3.8, 0.0);
  gate = synth_registration_params();
  r = register_pair(far.current, far.candidate, gate);
  check.expect(!r.accepted, "a pair beyond t_max must be rejected");
  check.expect(r.reason == RejectReason::translation_too_large ||
                   r.reason == RejectReason::too_few_inliers,
               std::string("unexpected rejection reason: ") + to_string(r.reason));

  gate = synth_registration_params();
  r = register_pair(pair.current, pair.candidate, gate);
  if (r.accepted) {
    check.expect(r.processed_size_current >= gate.n_p_min &&
                     r.processed_size_candidate >= gate.n_p_min &&
                     r.inlier_count >= gate.n_inliers &&
                     r.transform.translation.norm() <= gate.t_max,
                 "accepted result must satisfy all three criteria");
  } else {
    check.expect(false, "the nominal fixture pair should register");
  }
}

void criterion_state_machine(Check& check) {
  SearchConfig config;
  config.p_min = 0.524;
  config.n_v = 1;
  config.n_ms = 2;
  config.r_ms = 5.0;
  config.n_start = 3;
  config.alpha_min = 0.5;
  config.n_buffer = 5;
  config.n_n_max = 200;

  // Session 0: 40 map nodes in a line, 1 m apart.
  WorkingMemory wm;
  wm.buffer_size = config.n_buffer;
  for (int i = 0; i < 40; ++i) {
    MapNode node;
    node.id = i;
    node.session_id = 0;
    node.pose = {double(i), 0.0, 0.0};
    wm.nodes.push_back(std::move(node));
  }

  SearchState state;
  state.enter_global(40);

  // Scripted probabilities keyed by candidate id; the verification neighbor
  // of a target also fires so local-mode checks can pass later.
  std::map<int, double> hot;
  const LoopPredictor predictor = [&hot](const Descriptor&,
                                         const MapNode& candidate) {
    auto it = hot.find(candidate.id);
    return it == hot.end() ? 0.05 : it->second;
  };

  int accepted = 0;
  bool pending_accept = false;
  std::vector<int> request_nodes;
  bool buffer_violated = false;
  bool premature_local = false;

  // Session 1 nodes arrive; targets walk along old nodes 10, 11, 12, ...
  // The scripted localization ratio stays below alpha_min until update 7,
  // so the transition must wait for both conditions.
  for (int k = 0; k < 10; ++k) {
    const int id = 40 + k;
    MapNode node;
    node.id = id;
    node.session_id = 1;
    node.pose = {0.0, double(k), 0.0};  // session-local frame
    wm.nodes.push_back(std::move(node));

    if (pending_accept) {
      notify_registration_outcome(state, true);
      ++accepted;
      pending_accept = false;
    }

    const std::size_t n_local = k >= 7 ? wm.size() : std::size_t(k + 1);

    hot.clear();
    hot[10 + k] = 0.9;
    hot[9 + k] = 0.8;  // verification neighbor for local mode

    const UpdateResult r =
        process_map_update(wm, id, state, config, predictor, n_local);

    for (const Detection& d : r.scored) {
      const std::size_t idx = static_cast<std::size_t>(wm.index_of(d.node_id));
      if (idx + config.n_buffer >= wm.size()) buffer_violated = true;
    }
    if (r.request) {
      request_nodes.push_back(id);
      check.expect(r.verified, "request emitted without verification");
      check.expect(r.request->probability > config.p_min,
                   "request emitted at or below p_min");
      pending_accept = true;
    }
    if (state.mode == SearchMode::local && accepted < config.n_start)
      premature_local = true;
    if (accepted >= config.n_start && k < 7)
      check.expect(state.mode == SearchMode::global,
                   "alpha below alpha_min must keep the global mode");
    if (k >= 7)
      check.expect(state.mode == SearchMode::local,
                   "the mode must switch once both conditions hold");
  }

  check.expect(!premature_local,
               "global mode must persist until n_start accepted loops");
  check.expect(!buffer_violated, "buffer nodes must never be scored");
  check.expect(state.mode == SearchMode::local,
               "the state machine must end in local mode");

  int to_local = 0;
  for (const ModeTransition& t : state.transitions)
    if (t.to == SearchMode::local) ++to_local;
  check.expect(to_local == 1, fmt("expected exactly 1 transition to local, saw %g",
                                  static_cast<double>(to_local)));
  check.note(fmt("accepted %g scripted loops, %g requests",
                 static_cast<double>(accepted),
                 static_cast<double>(request_nodes.size())));
  check.expect(accepted >= config.n_start, "script must accept n_start loops");
}

void criterion_candidate_oracle(Check& check) {
  Rng rng(17);
  std::size_t mismatches = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const int n = 2 + static_cast<int>(rng.uniform_index(120));
    WorkingMemory wm;
    wm.buffer_size = static_cast<int>(rng.uniform_index(11));
    for (int i = 0; i < n; ++i) {
      MapNode node;
      node.id = i;
      node.pose = {rng.uniform(-50, 50), rng.uniform(-50, 50), 0};
      wm.nodes.push_back(std::move(node));
    }
    const int current = static_cast<int>(rng.uniform_index(n));
    const double radius = rng.uniform(0.0, 60.0);
    const std::vector<int> got =
        candidate_set(wm, current, radius, wm.size() + 1, trial);

    std::set<int> expected;
    const Eigen::Vector2d center = wm.nodes[current].pose.position();
    const std::size_t eligible =
        wm.size() - std::min<std::size_t>(wm.buffer_size, wm.size());
    for (std::size_t i = 0; i < eligible; ++i) {
      if (wm.nodes[i].id == current) continue;
      if ((wm.nodes[i].pose.position() - center).norm() <= radius)
        expected.insert(wm.nodes[i].id);
    }
    if (std::set<int>(got.begin(), got.end()) != expected) ++mismatches;
  }
  check.expect(mismatches == 0,
               fmt("%g/1000 randomized configurations disagreed with brute force",
                   static_cast<double>(mismatches)));
}

void criterion_end_to_end(Check& check) {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "lidarloop_acceptance_e2e";
  fs::remove_all(dir);
  fs::create_directories(dir);

  // Square-loop world with odometry drift, replayed with the cross-world
  // detector from the tuning criterion.
  SynthConfig cfg = acceptance_world();
  cfg.odom_yaw_bias = 0.002;
  const SynthResult world = synth_world(cfg, 303);
  const DatasetManifest manifest =
      write_synth_dataset(world, HistogramSpec{}, 3.0, dir.string());
  const Dataset dataset = build_dataset(manifest);

  const DetectorAssets& assets = detector_assets();

  ReplayOptions options;
  options.search = SearchConfig{};
  options.search.p_min = assets.model.p_min;
  options.search.beta = 1.0;
  options.registration = synth_registration_params();
  options.odom_sigma_xy = 0.02;

  const ReplayReport report = replay(dataset, assets.model, options);
  check.note(fmt("loops attempted=%g verified=%g accepted=%g",
                 static_cast<double>(report.attempted),
                 static_cast<double>(report.verified),
                 static_cast<double>(report.accepted)));
  check.note(fmt("endpoint error: odometry %.3f m -> optimized %.3f m",
                 report.endpoint_error_odom, report.endpoint_error_optimized));

  check.expect(report.accepted >= 1, "the replay must close at least one loop");
  check.expect(report.funnel_ok(), "loop funnel inequality violated");
  check.expect(report.endpoint_metrics, "endpoint metrics missing");
  check.expect(report.endpoint_error_odom > 0.3,
               "odometry drift too small for the criterion to be meaningful");
  check.expect(report.endpoint_error_optimized <=
                   0.1 * report.endpoint_error_odom,
               "endpoint error must drop by at least 90%");
  check.expect(report.optimize_monotone,
               "optimizer residual must be non-increasing");
  fs::remove_all(dir);
}

void criterion_prediction_latency(Check& check) {
  const DetectorAssets& assets = detector_assets();
  const Descriptor& current = assets.held_descriptors.front();

  // One search step: compare + predict over 200 candidates.
  const std::size_t candidates = 200;
  const int sweeps = 50;
  double sink = 0.0;
  const auto t0 = Clock::now();
  for (int sweep = 0; sweep < sweeps; ++sweep) {
    for (std::size_t i = 0; i < candidates; ++i) {
      const Descriptor& cand =
          assets.train_descriptors[i % assets.train_descriptors.size()];
      sink += predict_proba(assets.model, compare_descriptors(current, cand));
    }
  }
  const double per_sweep_ms = seconds_since(t0) * 1000.0 / sweeps;
  check.note(fmt("mean sweep over 200 candidates: %.3f ms (sink %.1f)",
                 per_sweep_ms, sink));
  check.expect(per_sweep_ms < 50.0,
               fmt("latency %.3f ms exceeds the 50 ms budget", per_sweep_ms));
}

}  // namespace

int main() {
  Suite suite;
  suite.run("C1  search radius matches the hand-derived values",
            criterion_search_radius);
  suite.run("C2  descriptor yaw invariance (100 clouds x 10 rotations)",
            criterion_yaw_invariance);
  suite.run("C3  adaboost round, separable fit, error bound", criterion_adaboost);
  suite.run("C4  threshold tuning contract and synthetic detector quality",
            criterion_threshold_tuning);
  suite.run("C5  registration recovery on 20 planted pairs",
            criterion_registration_recovery);
  suite.run("C6  SVD exactness and RANSAC planted-inlier recovery",
            criterion_svd_ransac);
  suite.run("C7  verification gates produce the matching verdicts",
            criterion_verification_gates);
  suite.run("C8  multi-session state machine on a scripted replay",
            criterion_state_machine);
  suite.run("C9  candidate set equals the brute-force filter (1000 configs)",
            criterion_candidate_oracle);
  suite.run("C10 end-to-end replay closes the loop and repairs the endpoint",
            criterion_end_to_end);
  suite.run("C11 detector latency over 200 candidates", criterion_prediction_latency);

  if (suite.failures == 0) {
    std::printf("acceptance: all criteria passed\n");
    return 0;
  }
  std::printf("acceptance: %d criterion(s) failed\n", suite.failures);
  return 1;
}
