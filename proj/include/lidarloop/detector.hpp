// Copyright 2026 The lidarloop Authors
// SPDX-License-Identifier: Apache-2.0
//
// AdaBoost loop classifier over the 41-entry comparison vector:
// training-set construction (distance-labeled pairs, balanced negative
// subsampling), discrete boosting of decision stumps, probability output,
// threshold tuning against a false-alarm target, ROC, and selection among
// detectors trained on different negative subsets.

#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "lidarloop/descriptor.hpp"

namespace lidarloop {

struct LabeledPair {
  ComparisonVector comparison{};
  bool is_loop = false;
  int node_i = -1;
  int node_j = -1;
  double distance = 0.0;  // ground distance between the nodes, m
};

struct DecisionStump {
  int feature = 0;         // index into the comparison vector
  double threshold = 0.0;
  int polarity = 1;        // +1: vote loop when value > threshold; -1: when <
  double alpha = 0.0;

  int vote(const ComparisonVector& x) const {
    const double v = x[static_cast<std::size_t>(feature)];
    const bool fires = polarity > 0 ? v > threshold : v < threshold;
    return fires ? 1 : -1;
  }
};

struct DetectorModel {
  std::vector<DecisionStump> stumps;
  int rounds = 0;               // requested training rounds T
  double p_min = 0.5;           // tuned decision threshold
  std::string spec_fingerprint; // HistogramSpec the model was trained under

  bool empty() const { return stumps.empty(); }
};

/// Per-round training trace: weighted error and stump weight.
struct TrainingRound {
  double epsilon = 0.0;
  double alpha = 0.0;
};

/// All unordered node pairs, including self-pairs, labeled positive when the
/// ground distance is < loop_distance. Negatives are subsampled
/// (seed-deterministically) down to the positive count. Zero positive pairs
/// is an error; fewer negatives than positives keeps all negatives.
std::vector<LabeledPair> build_training_set(
    const std::vector<Eigen::Vector2d>& positions,
    const std::vector<Descriptor>& descriptors, double loop_distance,
    std::uint64_t seed);

/// All unordered pairs without subsampling (evaluation populations).
std::vector<LabeledPair> build_all_pairs(
    const std::vector<Eigen::Vector2d>& positions,
    const std::vector<Descriptor>& descriptors, double loop_distance);

/// Discrete AdaBoost for `rounds` rounds: per round the best stump over all
/// features and candidate thresholds (midpoints of consecutive sorted
/// values), weighted error eps, alpha = 0.5*ln((1-eps)/eps), exponential
/// reweighting. Stops early when eps hits 0 or reaches 0.5. Both classes
/// must be present.
DetectorModel train_detector(const std::vector<LabeledPair>& pairs, int rounds,
                             std::vector<TrainingRound>* trace = nullptr);

/// Normalized-margin probability (1 + H(x)/sum|alpha|)/2 in [0, 1].
double predict_proba(const DetectorModel& model, const ComparisonVector& x);

struct ThresholdTuning {
  double p_min = 1.0;
  double detection_rate = 0.0;
  double false_alarm_rate = 0.0;
  bool target_met = false;  // false: no candidate threshold met the target
};

/// Smallest candidate threshold (scanning sorted unique predicted
/// probabilities ascending) whose false alarm rate on the held-out pairs is
/// < fa_target. A pair fires when p > p_min. If no candidate qualifies the
/// returned threshold is 1.0 with target_met = false.
ThresholdTuning tune_threshold(const DetectorModel& model,
                               const std::vector<LabeledPair>& heldout,
                               double fa_target);

struct EvaluationResult {
  std::int64_t tp = 0, fp = 0, tn = 0, fn = 0;
  double detection_rate = 0.0;   // TP / P
  double false_alarm_rate = 0.0; // FP / N
  bool d_defined = false;        // false when no positives present
  bool fa_defined = false;       // false when no negatives present
};

EvaluationResult evaluate_detector(const DetectorModel& model, double p_min,
                                   const std::vector<LabeledPair>& pairs);

struct RocPoint {
  double threshold = 0.0;
  double false_alarm_rate = 0.0;
  double detection_rate = 0.0;
};

/// One point per candidate threshold ({0} plus each unique predicted
/// probability, ascending); D and FA are non-increasing along the curve.
std::vector<RocPoint> roc_points(const DetectorModel& model,
                                 const std::vector<LabeledPair>& pairs);

struct SelectionOutcome {
  std::size_t index = 0;
  bool target_met = false;
  std::vector<EvaluationResult> evaluations;
};

/// Among models with tuned thresholds, pick the one with maximal D among
/// those meeting FA < fa_target on the held-out pairs; ties break toward
/// lower FA, then lower index. If none meets the target, the lowest-FA model
/// is returned with target_met = false.
SelectionOutcome select_best(const std::vector<DetectorModel>& candidates,
                             const std::vector<LabeledPair>& heldout,
                             double fa_target);

// ---- streaming variants ------------------------------------------------
// For large pair populations the (probability, label) view avoids holding
// comparison vectors in memory. The LabeledPair overloads above reduce to
// these.

struct ScoredPair {
  double probability = 0.0;
  bool is_loop = false;
};

ThresholdTuning tune_threshold_scored(const std::vector<ScoredPair>& heldout,
                                      double fa_target);
EvaluationResult evaluate_scored(const std::vector<ScoredPair>& pairs,
                                 double p_min);
std::vector<RocPoint> roc_points_scored(const std::vector<ScoredPair>& pairs);

std::vector<ScoredPair> score_pairs(const DetectorModel& model,
                                    const std::vector<LabeledPair>& pairs);

}  // namespace lidarloop
