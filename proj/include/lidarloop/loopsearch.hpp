// Copyright 2026 The lidarloop Authors
// SPDX-License-Identifier: Apache-2.0
//
// Detection-side loop search: the variable search radius driven by the
// position covariance, random candidate sampling, probability gating,
// neighborhood verification, and the multi-session global-search logic with
// the localization-ratio criterion for switching back to local search.

#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "lidarloop/descriptor.hpp"
#include "lidarloop/detector.hpp"
#include "lidarloop/geometry.hpp"

namespace lidarloop {

/// 95% chi-square quantile for 2 degrees of freedom; the longest axis of the
/// 95% confidence ellipse is 2*sqrt(kChiSquare95TwoDof * lambda_max).
inline constexpr double kChiSquare95TwoDof = 5.991;

struct MapNode {
  int id = -1;
  int session_id = 0;
  Pose2 pose;
  Eigen::Matrix2d covariance = Eigen::Matrix2d::Zero();
  Descriptor descriptor;
};

/// Map nodes eligible for loop search, ordered by creation. The newest
/// `buffer_size` nodes are never loop candidates.
struct WorkingMemory {
  std::vector<MapNode> nodes;
  int buffer_size = 20;

  std::size_t size() const { return nodes.size(); }
  const MapNode& at(int id) const;
  int index_of(int id) const;  // -1 when absent
};

struct SearchConfig {
  double r_min = 3.0;
  double beta = 0.25;
  double p_min = 0.5;
  int n_v = 1;
  std::size_t n_n_max = 200;
  double alpha_min = 0.5;
  int n_ms = 2;
  double r_ms = 5.0;
  int n_start = 3;
  int n_buffer = 20;
  std::uint64_t seed = 0;

  void validate() const;
};

enum class SearchMode { local, global };

struct ModeTransition {
  int node_id = -1;
  SearchMode from = SearchMode::local;
  SearchMode to = SearchMode::local;
};

struct SearchState {
  SearchMode mode = SearchMode::local;
  int accepted_loops = 0;
  /// Consecutive multi-session candidates forming the current cluster.
  std::vector<std::pair<int, Eigen::Vector2d>> ms_window;
  std::vector<ModeTransition> transitions;

  void enter_global(int node_id);
};

/// Eq.-style search radius: r_min + beta * 2*sqrt(5.991 * lambda_max).
double search_radius(double lambda_max, double r_min, double beta);

/// Larger eigenvalue of a symmetric PSD 2x2 covariance (closed form).
double lambda_max(const Eigen::Matrix2d& covariance);

/// Nodes within `radius` of the current node's estimated position, excluding
/// the newest buffer_size nodes and the current node itself; at most n_n_max
/// survive via a seed-deterministic uniform sample. Returns node ids.
std::vector<int> candidate_set(const WorkingMemory& wm, int current_id,
                               double radius, std::size_t n_n_max,
                               std::uint64_t seed);

/// Loop probability for (current scan, candidate node). The production
/// predictor wraps a DetectorModel; tests may script probabilities.
using LoopPredictor =
    std::function<double(const Descriptor& current, const MapNode& candidate)>;

/// Predictor backed by a trained model; refuses descriptors whose
/// HistogramSpec does not match the model's fingerprint.
LoopPredictor make_predictor(const DetectorModel& model);

struct Detection {
  int node_id = -1;
  double probability = 0.0;
};

/// Highest-probability candidate above p_min (ties break toward the lower
/// node id), or nothing. Optionally reports every scored candidate.
std::optional<Detection> detect(const Descriptor& current,
                                const WorkingMemory& wm,
                                const std::vector<int>& candidate_ids,
                                const LoopPredictor& predictor, double p_min,
                                std::vector<Detection>* scored = nullptr);

/// True iff at least one of the n_v predecessors or n_v successors of
/// best_id (existing nodes only, current node excluded) also fires above
/// p_min against the current descriptor.
bool verify_neighborhood(const Descriptor& current, int current_id, int best_id,
                         const WorkingMemory& wm, int n_v,
                         const LoopPredictor& predictor, double p_min);

enum class MultisessionVerdict { pending, accept };

/// Appends the candidate to the consecutive-cluster window: kept when within
/// r_ms of every window member (pairwise), otherwise the window resets to
/// the candidate alone. Accepts when the window reaches n_ms members.
MultisessionVerdict multisession_step(SearchState& state, int candidate_id,
                                      const Eigen::Vector2d& position, int n_ms,
                                      double r_ms);

/// alpha = n_local / n_wm.
double localization_ratio(std::size_t n_local, std::size_t n_wm);

struct LoopRequest {
  int current_id = -1;
  int candidate_id = -1;
  double probability = 0.0;
  SearchMode mode = SearchMode::local;
};

struct UpdateResult {
  std::optional<Detection> detection;       // best candidate above p_min
  bool verified = false;                    // neighborhood / multi-session passed
  std::optional<LoopRequest> request;       // registration request to emit
  std::optional<ModeTransition> transition; // mode change applied this update
  double search_radius_used = 0.0;          // local mode only
  std::vector<Detection> scored;            // every scored candidate
};

/// One search step for the current node. In local mode: variable-radius
/// candidate search, detection, neighborhood verification. In global
/// (multi-session) mode: detection over the whole WM minus the buffer, then
/// the consecutive-cluster criterion. Before searching, a global state with
/// at least n_start accepted loops switches to local once
/// localization_ratio(n_local, |WM|) >= alpha_min.
UpdateResult process_map_update(const WorkingMemory& wm, int current_id,
                                SearchState& state, const SearchConfig& config,
                                const LoopPredictor& predictor,
                                std::size_t n_local);

/// Registration outcome for a previously emitted request.
void notify_registration_outcome(SearchState& state, bool accepted);

}  // namespace lidarloop
