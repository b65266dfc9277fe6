// Copyright 2026 The lidarloop Authors
// SPDX-License-Identifier: Apache-2.0
//
// Minimal planar pose graph: odometry chain with first-order covariance
// accumulation, loop edges from accepted registrations, and Gauss-Newton
// optimization with node 0 anchored. Multi-session operation is supported
// through session-start nodes that open a new odometry chain; disconnected
// components stay anchored at their lowest node until a loop edge joins
// them to the main map.

#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <string>
#include <vector>

#include "lidarloop/geometry.hpp"
#include "lidarloop/registration.hpp"

namespace lidarloop {

struct OdometryEdge {
  int from = -1;
  int to = -1;                  // must be from + 1
  Pose2 relative;
  Eigen::Matrix2d step_covariance = Eigen::Matrix2d::Zero();
};

struct LoopEdge {
  int from = -1;
  int to = -1;
  Pose2 relative;  // pose_to ~= pose_from ⊕ relative
};

struct GraphNode {
  Pose2 pose;
  Eigen::Matrix2d covariance = Eigen::Matrix2d::Zero();
  bool session_start = false;
};

class PoseGraph {
public:
  /// Covariance floor applied when a loop closure resets uncertainty.
  static constexpr double kCovarianceFloor = 1e-4;

  explicit PoseGraph(const Pose2& origin = {});

  /// Appends node `edge.to`; the new pose is the previous pose composed with
  /// the relative transform, the new position covariance is the previous one
  /// plus the step covariance rotated by the current heading.
  int add_odometry(const OdometryEdge& edge);

  /// Opens a new odometry chain (multi-session); no edge to the previous
  /// node is created.
  int add_session_start(const Pose2& pose);

  /// Stores a loop edge (duplicate node pairs replace the previous edge) and
  /// resets the newer node's covariance to the floor.
  void add_loop(const LoopEdge& edge);

  /// Builds the planar loop edge from an accepted registration result;
  /// rejected results are refused.
  void add_loop_from_registration(int from, int to,
                                  const RegistrationResult& result);

  struct OptimizeResult {
    int iterations = 0;
    double initial_chi2 = 0.0;
    double final_chi2 = 0.0;
    bool converged = false;
    bool diverged = false;  // a step increased the residual; best kept
    std::vector<double> chi2_history;
  };

  /// Gauss-Newton over all poses with unit information on every edge.
  /// Node 0 (and the lowest node of any component not yet connected to it)
  /// stays fixed. The total squared residual is non-increasing across the
  /// returned history; a diverging step returns the best-so-far poses.
  OptimizeResult optimize(int max_iterations = 50, double tolerance = 1e-9);

  void reset_covariance(int node_id, double floor = kCovarianceFloor);

  std::size_t size() const { return nodes_.size(); }
  const GraphNode& node(int id) const { return nodes_.at(id); }
  const std::vector<GraphNode>& nodes() const { return nodes_; }
  const std::vector<OdometryEdge>& odometry_edges() const { return odometry_edges_; }
  const std::vector<LoopEdge>& loop_edges() const { return loop_edges_; }

  /// Number of nodes connected to `node_id` through odometry or loop edges
  /// (including itself).
  std::size_t component_size(int node_id) const;
  bool connected(int a, int b) const;

  /// CSV dumps: `id,x,y,theta,cov_xx,cov_xy,cov_yy` and
  /// `type,from,to,dx,dy,dtheta`.
  void dump_nodes_csv(const std::string& path) const;
  void dump_edges_csv(const std::string& path) const;

private:
  std::vector<int> component_labels() const;
  double chi2() const;

  std::vector<GraphNode> nodes_;
  std::vector<OdometryEdge> odometry_edges_;
  std::vector<LoopEdge> loop_edges_;
};

}  // namespace lidarloop
