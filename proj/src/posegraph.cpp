// Copyright 2026 The lidarloop Authors
// SPDX-License-Identifier: Apache-2.0

#include "lidarloop/posegraph.hpp"

#include <Eigen/Sparse>
#include <algorithm>
#include <fstream>
#include <functional>
#include <numeric>

#include "lidarloop/error.hpp"

namespace lidarloop {

PoseGraph::PoseGraph(const Pose2& origin) {
  GraphNode n;
  n.pose = origin;
  n.session_start = true;
  nodes_.push_back(n);
}

int PoseGraph::add_odometry(const OdometryEdge& edge) {
  const int last = static_cast<int>(nodes_.size()) - 1;
  require(edge.from == last && edge.to == last + 1, ErrorCode::precondition,
          "add_odometry: edge must extend the chain");
  const GraphNode& prev = nodes_.back();
  GraphNode next;
  next.pose = prev.pose.compose(edge.relative);
  const double c = std::cos(prev.pose.theta), s = std::sin(prev.pose.theta);
  Eigen::Matrix2d rot;
  rot << c, -s, s, c;
  next.covariance = prev.covariance + rot * edge.step_covariance * rot.transpose();
  nodes_.push_back(next);
  odometry_edges_.push_back(edge);
  return edge.to;
}

int PoseGraph::add_session_start(const Pose2& pose) {
  GraphNode n;
  n.pose = pose;
  n.session_start = true;
  nodes_.push_back(n);
  return static_cast<int>(nodes_.size()) - 1;
}

void PoseGraph::add_loop(const LoopEdge& edge) {
  require(edge.from >= 0 && edge.from < static_cast<int>(nodes_.size()) &&
              edge.to >= 0 && edge.to < static_cast<int>(nodes_.size()),
          ErrorCode::precondition, "add_loop: edge references a missing node");
  require(edge.from != edge.to, ErrorCode::invalid_argument,
          "add_loop: self edge");
  // Same unordered pair replaces the stored edge.
  for (LoopEdge& e : loop_edges_) {
    if ((e.from == edge.from && e.to == edge.to) ||
        (e.from == edge.to && e.to == edge.from)) {
      e = edge;
      reset_covariance(std::max(edge.from, edge.to));
      return;
    }
  }
  loop_edges_.push_back(edge);
  reset_covariance(std::max(edge.from, edge.to));
}

void PoseGraph::add_loop_from_registration(int from, int to,
                                           const RegistrationResult& result) {
  require(result.accepted, ErrorCode::precondition,
          "add_loop: registration result was rejected");
  add_loop({from, to, result.transform.to_planar()});
}

void PoseGraph::reset_covariance(int node_id, double floor) {
  require(node_id >= 0 && node_id < static_cast<int>(nodes_.size()),
          ErrorCode::precondition, "reset_covariance: missing node");
  nodes_[node_id].covariance = Eigen::Matrix2d::Identity() * floor;
}

std::vector<int> PoseGraph::component_labels() const {
  std::vector<int> parent(nodes_.size());
  std::iota(parent.begin(), parent.end(), 0);
  std::function<int(int)> find = [&](int x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  };
  auto unite = [&](int a, int b) { parent[find(a)] = find(b); };
  for (const OdometryEdge& e : odometry_edges_) unite(e.from, e.to);
  for (const LoopEdge& e : loop_edges_) unite(e.from, e.to);
  std::vector<int> label(nodes_.size());
  for (std::size_t i = 0; i < nodes_.size(); ++i)
    label[i] = find(static_cast<int>(i));
  return label;
}

std::size_t PoseGraph::component_size(int node_id) const {
  const std::vector<int> label = component_labels();
  require(node_id >= 0 && node_id < static_cast<int>(nodes_.size()),
          ErrorCode::precondition, "component_size: missing node");
  std::size_t count = 0;
  for (int l : label)
    if (l == label[node_id]) ++count;
  return count;
}

bool PoseGraph::connected(int a, int b) const {
  const std::vector<int> label = component_labels();
  return label.at(a) == label.at(b);
}

namespace {

Eigen::Vector3d edge_residual(const Pose2& xi, const Pose2& xj, const Pose2& z) {
  const Pose2 pred = xi.between(xj);
  return {pred.x - z.x, pred.y - z.y, wrap_angle(pred.theta - z.theta)};
}

}  // namespace

double PoseGraph::chi2() const {
  double total = 0.0;
  auto add = [&](int from, int to, const Pose2& z) {
    total += edge_residual(nodes_[from].pose, nodes_[to].pose, z).squaredNorm();
  };
  for (const OdometryEdge& e : odometry_edges_) add(e.from, e.to, e.relative);
  for (const LoopEdge& e : loop_edges_) add(e.from, e.to, e.relative);
  return total;
}

PoseGraph::OptimizeResult PoseGraph::optimize(int max_iterations,
                                              double tolerance) {
  OptimizeResult result;
  result.initial_chi2 = chi2();
  result.final_chi2 = result.initial_chi2;
  result.chi2_history.push_back(result.initial_chi2);
  if (nodes_.size() < 2 || (odometry_edges_.empty() && loop_edges_.empty())) {
    result.converged = true;
    return result;
  }

  // Anchor node 0 plus the lowest node of every component not containing 0.
  const std::vector<int> label = component_labels();
  std::vector<std::uint8_t> anchored(nodes_.size(), 0);
  anchored[0] = 1;
  {
    std::vector<int> seen;
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
      if (label[i] == label[0]) continue;
      if (std::find(seen.begin(), seen.end(), label[i]) == seen.end()) {
        seen.push_back(label[i]);
        anchored[i] = 1;  // lowest id in the component (ids are ascending)
      }
    }
  }

  std::vector<int> var_index(nodes_.size(), -1);
  int n_vars = 0;
  for (std::size_t i = 0; i < nodes_.size(); ++i)
    if (!anchored[i]) var_index[i] = n_vars++;
  if (n_vars == 0) {
    result.converged = true;
    return result;
  }

  struct EdgeRef {
    int from, to;
    const Pose2* z;
  };
  std::vector<EdgeRef> edges;
  edges.reserve(odometry_edges_.size() + loop_edges_.size());
  for (const OdometryEdge& e : odometry_edges_)
    edges.push_back({e.from, e.to, &e.relative});
  for (const LoopEdge& e : loop_edges_)
    edges.push_back({e.from, e.to, &e.relative});

  std::vector<GraphNode> best_nodes = nodes_;
  double best_chi2 = result.initial_chi2;
  double prev_chi2 = result.initial_chi2;

  for (int it = 0; it < max_iterations; ++it) {
    std::vector<Eigen::Triplet<double>> triplets;
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(3 * n_vars);

    for (const EdgeRef& e : edges) {
      const Pose2& xi = nodes_[e.from].pose;
      const Pose2& xj = nodes_[e.to].pose;
      const Eigen::Vector3d r = edge_residual(xi, xj, *e.z);

      const double c = std::cos(xi.theta), s = std::sin(xi.theta);
      const double dx = xj.x - xi.x, dy = xj.y - xi.y;
      // d residual / d xi and d xj (unit information).
      Eigen::Matrix3d ji = Eigen::Matrix3d::Zero();
      ji(0, 0) = -c;  ji(0, 1) = -s;  ji(0, 2) = -s * dx + c * dy;
      ji(1, 0) = s;   ji(1, 1) = -c;  ji(1, 2) = -c * dx - s * dy;
      ji(2, 2) = -1.0;
      Eigen::Matrix3d jj = Eigen::Matrix3d::Zero();
      jj(0, 0) = c;   jj(0, 1) = s;
      jj(1, 0) = -s;  jj(1, 1) = c;
      jj(2, 2) = 1.0;

      const int vi = var_index[e.from], vj = var_index[e.to];
      auto add_block = [&](int row_var, const Eigen::Matrix3d& a, int col_var,
                           const Eigen::Matrix3d& b) {
        const Eigen::Matrix3d block = a.transpose() * b;
        for (int r0 = 0; r0 < 3; ++r0)
          for (int c0 = 0; c0 < 3; ++c0)
            triplets.emplace_back(3 * row_var + r0, 3 * col_var + c0,
                                  block(r0, c0));
      };
      if (vi >= 0) {
        add_block(vi, ji, vi, ji);
        rhs.segment<3>(3 * vi) -= ji.transpose() * r;
      }
      if (vj >= 0) {
        add_block(vj, jj, vj, jj);
        rhs.segment<3>(3 * vj) -= jj.transpose() * r;
      }
      if (vi >= 0 && vj >= 0) {
        add_block(vi, ji, vj, jj);
        add_block(vj, jj, vi, ji);
      }
    }

    Eigen::SparseMatrix<double> h(3 * n_vars, 3 * n_vars);
    h.setFromTriplets(triplets.begin(), triplets.end());
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver(h);
    if (solver.info() != Eigen::Success) break;
    const Eigen::VectorXd delta = solver.solve(rhs);
    if (solver.info() != Eigen::Success) break;

    for (std::size_t i = 0; i < nodes_.size(); ++i) {
      const int v = var_index[i];
      if (v < 0) continue;
      nodes_[i].pose.x += delta(3 * v);
      nodes_[i].pose.y += delta(3 * v + 1);
      nodes_[i].pose.theta = wrap_angle(nodes_[i].pose.theta + delta(3 * v + 2));
    }

    const double current = chi2();
    result.iterations = it + 1;
    if (current > best_chi2 + 1e-12) {
      nodes_ = best_nodes;  // revert the diverging step
      result.diverged = true;
      break;
    }
    result.chi2_history.push_back(current);
    best_chi2 = current;
    best_nodes = nodes_;
    if (std::abs(prev_chi2 - current) < tolerance) {
      result.converged = true;
      break;
    }
    prev_chi2 = current;
  }

  result.final_chi2 = best_chi2;
  return result;
}

void PoseGraph::dump_nodes_csv(const std::string& path) const {
  std::ofstream out(path);
  if (!out) fail(ErrorCode::io, "cannot write " + path);
  out << "id,x,y,theta,cov_xx,cov_xy,cov_yy\n";
  out.precision(12);
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    const GraphNode& n = nodes_[i];
    out << i << ',' << n.pose.x << ',' << n.pose.y << ',' << n.pose.theta << ','
        << n.covariance(0, 0) << ',' << n.covariance(0, 1) << ','
        << n.covariance(1, 1) << '\n';
  }
}

void PoseGraph::dump_edges_csv(const std::string& path) const {
  std::ofstream out(path);
  if (!out) fail(ErrorCode::io, "cannot write " + path);
  out << "type,from,to,dx,dy,dtheta\n";
  out.precision(12);
  for (const OdometryEdge& e : odometry_edges_)
    out << "odometry," << e.from << ',' << e.to << ',' << e.relative.x << ','
        << e.relative.y << ',' << e.relative.theta << '\n';
  for (const LoopEdge& e : loop_edges_)
    out << "loop," << e.from << ',' << e.to << ',' << e.relative.x << ','
        << e.relative.y << ',' << e.relative.theta << '\n';
}

}  // namespace lidarloop
