// Copyright 2026 The lidarloop Authors
// SPDX-License-Identifier: Apache-2.0

#include "lidarloop/loopsearch.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "lidarloop/error.hpp"
#include "lidarloop/rng.hpp"

namespace lidarloop {

const MapNode& WorkingMemory::at(int id) const {
  const int idx = index_of(id);
  require(idx >= 0, ErrorCode::precondition,
          "WorkingMemory: node " + std::to_string(id) + " not present");
  return nodes[idx];
}

int WorkingMemory::index_of(int id) const {
  // Ids are unique and ascending by creation; binary search.
  auto it = std::lower_bound(nodes.begin(), nodes.end(), id,
                             [](const MapNode& n, int v) { return n.id < v; });
  if (it == nodes.end() || it->id != id) return -1;
  return static_cast<int>(it - nodes.begin());
}

void SearchConfig::validate() const {
  require(r_min > 0, ErrorCode::invalid_argument, "r_min must be > 0");
  require(beta >= 0, ErrorCode::invalid_argument, "beta must be >= 0");
  require(p_min >= 0 && p_min <= 1, ErrorCode::invalid_argument,
          "p_min must be in [0, 1]");
  require(n_v >= 1 && n_n_max >= 1 && n_ms >= 1 && n_start >= 1,
          ErrorCode::invalid_argument, "counts must be >= 1");
  require(n_buffer >= 0, ErrorCode::invalid_argument, "n_buffer must be >= 0");
  require(r_ms > 0, ErrorCode::invalid_argument, "r_ms must be > 0");
  require(alpha_min >= 0 && alpha_min <= 1, ErrorCode::invalid_argument,
          "alpha_min must be in [0, 1]");
}

void SearchState::enter_global(int node_id) {
  if (mode == SearchMode::global) return;
  transitions.push_back({node_id, mode, SearchMode::global});
  mode = SearchMode::global;
  accepted_loops = 0;
  ms_window.clear();
}

double search_radius(double lambda_max, double r_min, double beta) {
  require(lambda_max >= 0, ErrorCode::precondition,
          "search_radius: lambda_max must be >= 0");
  return r_min + beta * 2.0 * std::sqrt(kChiSquare95TwoDof * lambda_max);
}

double lambda_max(const Eigen::Matrix2d& covariance) {
  require(covariance.allFinite(), ErrorCode::invalid_argument,
          "lambda_max: covariance has non-finite entries");
  require(std::abs(covariance(0, 1) - covariance(1, 0)) <=
              1e-9 * std::max(1.0, covariance.cwiseAbs().maxCoeff()),
          ErrorCode::invalid_argument, "lambda_max: covariance not symmetric");
  const double half_trace = 0.5 * (covariance(0, 0) + covariance(1, 1));
  const double det = covariance(0, 0) * covariance(1, 1) -
                     covariance(0, 1) * covariance(1, 0);
  const double disc = std::max(half_trace * half_trace - det, 0.0);
  return half_trace + std::sqrt(disc);
}

std::vector<int> candidate_set(const WorkingMemory& wm, int current_id,
                               double radius, std::size_t n_n_max,
                               std::uint64_t seed) {
  require(n_n_max >= 1, ErrorCode::invalid_argument, "n_n_max must be >= 1");
  const int current_idx = wm.index_of(current_id);
  require(current_idx >= 0, ErrorCode::precondition,
          "candidate_set: current node not in working memory");
  const Eigen::Vector2d center = wm.nodes[current_idx].pose.position();

  const std::size_t n = wm.size();
  const std::size_t buffer =
      std::min<std::size_t>(static_cast<std::size_t>(std::max(wm.buffer_size, 0)), n);
  const std::size_t eligible_end = n - buffer;

  std::vector<int> in_radius;
  for (std::size_t i = 0; i < eligible_end; ++i) {
    const MapNode& node = wm.nodes[i];
    if (node.id == current_id) continue;
    if ((node.pose.position() - center).norm() <= radius)
      in_radius.push_back(node.id);
  }
  if (in_radius.size() <= n_n_max) return in_radius;

  Rng rng(seed);
  std::vector<int> sampled;
  sampled.reserve(n_n_max);
  for (std::size_t idx :
       rng.sample_without_replacement(in_radius.size(), n_n_max))
    sampled.push_back(in_radius[idx]);
  return sampled;
}

LoopPredictor make_predictor(const DetectorModel& model) {
  return [&model](const Descriptor& current, const MapNode& candidate) {
    require(model.spec_fingerprint.empty() ||
                (current.spec.fingerprint() == model.spec_fingerprint &&
                 candidate.descriptor.spec.fingerprint() == model.spec_fingerprint),
            ErrorCode::dimension_mismatch,
            "predictor: descriptor spec does not match the trained model");
    return predict_proba(model,
                         compare_descriptors(current, candidate.descriptor));
  };
}

std::optional<Detection> detect(const Descriptor& current,
                                const WorkingMemory& wm,
                                const std::vector<int>& candidate_ids,
                                const LoopPredictor& predictor, double p_min,
                                std::vector<Detection>* scored) {
  std::optional<Detection> best;
  for (int id : candidate_ids) {
    const MapNode& node = wm.at(id);
    const double p = predictor(current, node);
    if (scored) scored->push_back({id, p});
    if (p <= p_min) continue;
    if (!best || p > best->probability ||
        (p == best->probability && id < best->node_id))
      best = Detection{id, p};
  }
  return best;
}

bool verify_neighborhood(const Descriptor& current, int current_id, int best_id,
                         const WorkingMemory& wm, int n_v,
                         const LoopPredictor& predictor, double p_min) {
  const int best_idx = wm.index_of(best_id);
  require(best_idx >= 0, ErrorCode::precondition,
          "verify_neighborhood: candidate not in working memory");
  auto check = [&](int idx) {
    if (idx < 0 || idx >= static_cast<int>(wm.size())) return false;
    const MapNode& node = wm.nodes[idx];
    if (node.id == current_id) return false;
    return predictor(current, node) > p_min;
  };
  for (int k = 1; k <= n_v; ++k) {
    if (check(best_idx - k)) return true;
    if (check(best_idx + k)) return true;
  }
  return false;
}

MultisessionVerdict multisession_step(SearchState& state, int candidate_id,
                                      const Eigen::Vector2d& position, int n_ms,
                                      double r_ms) {
  bool fits = true;
  for (const auto& [id, pos] : state.ms_window) {
    if ((pos - position).norm() > r_ms) {
      fits = false;
      break;
    }
  }
  if (!fits) state.ms_window.clear();
  state.ms_window.emplace_back(candidate_id, position);
  if (state.ms_window.size() > static_cast<std::size_t>(n_ms))
    state.ms_window.erase(state.ms_window.begin());
  return state.ms_window.size() >= static_cast<std::size_t>(n_ms)
             ? MultisessionVerdict::accept
             : MultisessionVerdict::pending;
}

double localization_ratio(std::size_t n_local, std::size_t n_wm) {
  require(n_wm >= 1, ErrorCode::precondition,
          "localization_ratio: empty working memory");
  require(n_local <= n_wm, ErrorCode::precondition,
          "localization_ratio: n_local exceeds n_wm");
  return static_cast<double>(n_local) / static_cast<double>(n_wm);
}

UpdateResult process_map_update(const WorkingMemory& wm, int current_id,
                                SearchState& state, const SearchConfig& config,
                                const LoopPredictor& predictor,
                                std::size_t n_local) {
  config.validate();
  UpdateResult out;
  const MapNode& current = wm.at(current_id);

  if (state.mode == SearchMode::global &&
      state.accepted_loops >= config.n_start &&
      localization_ratio(n_local, wm.size()) >= config.alpha_min) {
    const ModeTransition t{current_id, SearchMode::global, SearchMode::local};
    state.mode = SearchMode::local;
    state.ms_window.clear();
    state.transitions.push_back(t);
    out.transition = t;
  }

  const std::uint64_t update_seed =
      mix_seed(config.seed, static_cast<std::uint64_t>(current_id));

  if (state.mode == SearchMode::local) {
    const double radius =
        search_radius(lambda_max(current.covariance), config.r_min, config.beta);
    out.search_radius_used = radius;
    const std::vector<int> candidates =
        candidate_set(wm, current_id, radius, config.n_n_max, update_seed);
    out.detection = detect(current.descriptor, wm, candidates, predictor,
                           config.p_min, &out.scored);
    if (out.detection &&
        verify_neighborhood(current.descriptor, current_id,
                            out.detection->node_id, wm, config.n_v, predictor,
                            config.p_min)) {
      out.verified = true;
      out.request = LoopRequest{current_id, out.detection->node_id,
                                out.detection->probability, SearchMode::local};
    }
  } else {
    const std::vector<int> candidates =
        candidate_set(wm, current_id, std::numeric_limits<double>::infinity(),
                      config.n_n_max, update_seed);
    out.detection = detect(current.descriptor, wm, candidates, predictor,
                           config.p_min, &out.scored);
    if (out.detection) {
      const MapNode& best = wm.at(out.detection->node_id);
      if (multisession_step(state, best.id, best.pose.position(), config.n_ms,
                            config.r_ms) == MultisessionVerdict::accept) {
        out.verified = true;
        out.request = LoopRequest{current_id, best.id,
                                  out.detection->probability, SearchMode::global};
      }
    }
  }
  return out;
}

void notify_registration_outcome(SearchState& state, bool accepted) {
  if (accepted) ++state.accepted_loops;
}

}  // namespace lidarloop
