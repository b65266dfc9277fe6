// Copyright 2026 The lidarloop Authors
// SPDX-License-Identifier: Apache-2.0

#include "lidarloop/detector.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "lidarloop/error.hpp"
#include "lidarloop/rng.hpp"

namespace lidarloop {

namespace {

constexpr double kEpsilonClamp = 1e-12;

}  // namespace

std::vector<LabeledPair> build_training_set(
    const std::vector<Eigen::Vector2d>& positions,
    const std::vector<Descriptor>& descriptors, double loop_distance,
    std::uint64_t seed) {
  require(positions.size() == descriptors.size(), ErrorCode::invalid_argument,
          "build_training_set: positions/descriptors size mismatch");
  require(positions.size() >= 2, ErrorCode::precondition,
          "build_training_set: need at least 2 nodes");

  // Enumerate index pairs first; comparison vectors are only computed for
  // pairs that survive subsampling.
  struct IndexPair {
    int i, j;
    double distance;
  };
  std::vector<IndexPair> positives, negatives;
  const int n = static_cast<int>(positions.size());
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) {
      const double dist = (positions[i] - positions[j]).norm();
      if (dist < loop_distance)
        positives.push_back({i, j, dist});
      else
        negatives.push_back({i, j, dist});
    }
  }
  require(!positives.empty(), ErrorCode::precondition,
          "build_training_set: no positive pairs; detector is untrainable");

  std::vector<IndexPair> kept_negatives;
  if (negatives.size() > positives.size()) {
    Rng rng(seed);
    for (std::size_t idx :
         rng.sample_without_replacement(negatives.size(), positives.size()))
      kept_negatives.push_back(negatives[idx]);
  } else {
    kept_negatives = negatives;
  }

  std::vector<LabeledPair> out;
  out.reserve(positives.size() + kept_negatives.size());
  auto emit = [&](const IndexPair& p, bool label) {
    LabeledPair lp;
    lp.comparison = compare_descriptors(descriptors[p.i], descriptors[p.j]);
    lp.is_loop = label;
    lp.node_i = p.i;
    lp.node_j = p.j;
    lp.distance = p.distance;
    out.push_back(std::move(lp));
  };
  for (const IndexPair& p : positives) emit(p, true);
  for (const IndexPair& p : kept_negatives) emit(p, false);
  return out;
}

std::vector<LabeledPair> build_all_pairs(
    const std::vector<Eigen::Vector2d>& positions,
    const std::vector<Descriptor>& descriptors, double loop_distance) {
  require(positions.size() == descriptors.size(), ErrorCode::invalid_argument,
          "build_all_pairs: positions/descriptors size mismatch");
  std::vector<LabeledPair> out;
  const int n = static_cast<int>(positions.size());
  out.reserve(static_cast<std::size_t>(n) * (n + 1) / 2);
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) {
      LabeledPair lp;
      lp.comparison = compare_descriptors(descriptors[i], descriptors[j]);
      lp.distance = (positions[i] - positions[j]).norm();
      lp.is_loop = lp.distance < loop_distance;
      lp.node_i = i;
      lp.node_j = j;
      out.push_back(std::move(lp));
    }
  }
  return out;
}

DetectorModel train_detector(const std::vector<LabeledPair>& pairs, int rounds,
                             std::vector<TrainingRound>* trace) {
  require(rounds >= 1, ErrorCode::invalid_argument, "train: rounds must be >= 1");
  const std::size_t n = pairs.size();
  require(n >= 2, ErrorCode::precondition, "train: need at least 2 pairs");
  bool has_pos = false, has_neg = false;
  for (const LabeledPair& p : pairs) (p.is_loop ? has_pos : has_neg) = true;
  require(has_pos && has_neg, ErrorCode::precondition,
          "train: both classes must be present");

  // Sample order per feature, computed once; each round scans features in
  // sorted order with cumulative class weights.
  std::array<std::vector<std::uint32_t>, kComparisonDim> order;
  for (int f = 0; f < kComparisonDim; ++f) {
    order[f].resize(n);
    for (std::size_t i = 0; i < n; ++i) order[f][i] = static_cast<std::uint32_t>(i);
    std::stable_sort(order[f].begin(), order[f].end(),
                     [&](std::uint32_t a, std::uint32_t b) {
                       return pairs[a].comparison[f] < pairs[b].comparison[f];
                     });
  }

  std::vector<double> weights(n, 1.0 / static_cast<double>(n));
  DetectorModel model;
  model.rounds = rounds;

  for (int t = 0; t < rounds; ++t) {
    double total_pos = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      if (pairs[i].is_loop) total_pos += weights[i];
    const double total_neg = 1.0 - total_pos;

    // Best stump under current weights. For threshold th between sorted
    // positions k and k+1 with below = weight of positives at value <= th:
    //   polarity +1 (vote loop when v > th): error = below_pos + (neg above)
    //   polarity -1 (vote loop when v < th): error = below_neg + (pos above)
    double best_eps = std::numeric_limits<double>::infinity();
    DecisionStump best{};
    for (int f = 0; f < kComparisonDim; ++f) {
      const auto& ord = order[f];
      double below_pos = 0.0, below_neg = 0.0;
      for (std::size_t k = 0; k + 1 < n; ++k) {
        const LabeledPair& cur = pairs[ord[k]];
        if (cur.is_loop)
          below_pos += weights[ord[k]];
        else
          below_neg += weights[ord[k]];
        const double v0 = cur.comparison[f];
        const double v1 = pairs[ord[k + 1]].comparison[f];
        if (v1 <= v0) continue;  // no distinct midpoint here
        const double th = 0.5 * (v0 + v1);
        const double err_pos_above = below_pos + (total_neg - below_neg);
        const double err_neg_above = below_neg + (total_pos - below_pos);
        if (err_pos_above < best_eps) {
          best_eps = err_pos_above;
          best = {f, th, +1, 0.0};
        }
        if (err_neg_above < best_eps) {
          best_eps = err_neg_above;
          best = {f, th, -1, 0.0};
        }
      }
    }

    if (!std::isfinite(best_eps) || best_eps >= 0.5) break;  // no usable stump

    const double eps =
        std::clamp(best_eps, kEpsilonClamp, 1.0 - kEpsilonClamp);
    best.alpha = 0.5 * std::log((1.0 - eps) / eps);
    model.stumps.push_back(best);
    if (trace) trace->push_back({best_eps, best.alpha});

    if (best_eps <= 0.0) break;  // perfect stump; remaining rounds unused

    double norm = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const int y = pairs[i].is_loop ? 1 : -1;
      const int h = best.vote(pairs[i].comparison);
      weights[i] *= std::exp(-best.alpha * y * h);
      norm += weights[i];
    }
    for (double& w : weights) w /= norm;
  }

  require(!model.stumps.empty(), ErrorCode::numeric,
          "train: no separating stump found");
  return model;
}

double predict_proba(const DetectorModel& model, const ComparisonVector& x) {
  require(!model.empty(), ErrorCode::precondition, "predict: empty model");
  double h = 0.0, total = 0.0;
  for (const DecisionStump& s : model.stumps) {
    h += s.alpha * s.vote(x);
    total += std::abs(s.alpha);
  }
  if (total <= 0.0) return 0.5;
  return std::clamp(0.5 * (1.0 + h / total), 0.0, 1.0);
}

std::vector<ScoredPair> score_pairs(const DetectorModel& model,
                                    const std::vector<LabeledPair>& pairs) {
  std::vector<ScoredPair> out(pairs.size());
  for (std::size_t i = 0; i < pairs.size(); ++i)
    out[i] = {predict_proba(model, pairs[i].comparison), pairs[i].is_loop};
  return out;
}

EvaluationResult evaluate_scored(const std::vector<ScoredPair>& pairs,
                                 double p_min) {
  EvaluationResult r;
  for (const ScoredPair& s : pairs) {
    const bool fired = s.probability > p_min;
    if (s.is_loop)
      fired ? ++r.tp : ++r.fn;
    else
      fired ? ++r.fp : ++r.tn;
  }
  const std::int64_t p = r.tp + r.fn, n = r.fp + r.tn;
  if (p > 0) {
    r.detection_rate = static_cast<double>(r.tp) / static_cast<double>(p);
    r.d_defined = true;
  }
  if (n > 0) {
    r.false_alarm_rate = static_cast<double>(r.fp) / static_cast<double>(n);
    r.fa_defined = true;
  }
  return r;
}

ThresholdTuning tune_threshold_scored(const std::vector<ScoredPair>& heldout,
                                      double fa_target) {
  require(!heldout.empty(), ErrorCode::precondition,
          "tune_threshold: empty held-out set");
  std::vector<double> candidates;
  candidates.reserve(heldout.size());
  for (const ScoredPair& s : heldout) candidates.push_back(s.probability);
  std::sort(candidates.begin(), candidates.end());
  candidates.erase(std::unique(candidates.begin(), candidates.end()),
                   candidates.end());

  for (double th : candidates) {
    const EvaluationResult e = evaluate_scored(heldout, th);
    const double fa = e.fa_defined ? e.false_alarm_rate : 0.0;
    if (fa < fa_target) {
      return {th, e.detection_rate, fa, true};
    }
  }
  // Threshold 1.0 never fires (p <= 1 for all pairs).
  const EvaluationResult e = evaluate_scored(heldout, 1.0);
  return {1.0, e.detection_rate, e.fa_defined ? e.false_alarm_rate : 0.0, false};
}

std::vector<RocPoint> roc_points_scored(const std::vector<ScoredPair>& pairs) {
  bool has_pos = false, has_neg = false;
  for (const ScoredPair& s : pairs) (s.is_loop ? has_pos : has_neg) = true;
  require(has_pos && has_neg, ErrorCode::precondition,
          "roc: both classes must be present");

  std::vector<double> thresholds{0.0};
  for (const ScoredPair& s : pairs) thresholds.push_back(s.probability);
  std::sort(thresholds.begin(), thresholds.end());
  thresholds.erase(std::unique(thresholds.begin(), thresholds.end()),
                   thresholds.end());

  std::vector<RocPoint> out;
  out.reserve(thresholds.size());
  for (double th : thresholds) {
    const EvaluationResult e = evaluate_scored(pairs, th);
    out.push_back({th, e.false_alarm_rate, e.detection_rate});
  }
  return out;
}

ThresholdTuning tune_threshold(const DetectorModel& model,
                               const std::vector<LabeledPair>& heldout,
                               double fa_target) {
  bool has_pos = false, has_neg = false;
  for (const LabeledPair& p : heldout) (p.is_loop ? has_pos : has_neg) = true;
  require(has_pos && has_neg, ErrorCode::precondition,
          "tune_threshold: held-out set must contain both classes");
  return tune_threshold_scored(score_pairs(model, heldout), fa_target);
}

EvaluationResult evaluate_detector(const DetectorModel& model, double p_min,
                                   const std::vector<LabeledPair>& pairs) {
  require(!pairs.empty(), ErrorCode::precondition, "evaluate: no pairs");
  return evaluate_scored(score_pairs(model, pairs), p_min);
}

std::vector<RocPoint> roc_points(const DetectorModel& model,
                                 const std::vector<LabeledPair>& pairs) {
  return roc_points_scored(score_pairs(model, pairs));
}

SelectionOutcome select_best(const std::vector<DetectorModel>& candidates,
                             const std::vector<LabeledPair>& heldout,
                             double fa_target) {
  require(!candidates.empty(), ErrorCode::precondition,
          "select_best: no candidate models");
  SelectionOutcome out;
  out.evaluations.reserve(candidates.size());
  for (const DetectorModel& m : candidates)
    out.evaluations.push_back(evaluate_detector(m, m.p_min, heldout));

  std::optional<std::size_t> best;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    const EvaluationResult& e = out.evaluations[i];
    const double fa = e.fa_defined ? e.false_alarm_rate : 0.0;
    if (fa >= fa_target) continue;
    if (!best) {
      best = i;
      continue;
    }
    const EvaluationResult& b = out.evaluations[*best];
    if (e.detection_rate > b.detection_rate ||
        (e.detection_rate == b.detection_rate &&
         e.false_alarm_rate < b.false_alarm_rate))
      best = i;
  }
  if (best) {
    out.index = *best;
    out.target_met = true;
    return out;
  }
  // None met the target: lowest FA wins, ties toward lower index.
  std::size_t lowest = 0;
  for (std::size_t i = 1; i < candidates.size(); ++i)
    if (out.evaluations[i].false_alarm_rate <
        out.evaluations[lowest].false_alarm_rate)
      lowest = i;
  out.index = lowest;
  out.target_met = false;
  return out;
}

}  // namespace lidarloop
