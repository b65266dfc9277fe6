// Copyright 2026 The lidarloop Authors
// SPDX-License-Identifier: Apache-2.0
//
// Minimal 3D kd-tree for nearest-neighbor and radius queries over a fixed
// point set. Build once, query from any thread.

#pragma once

#include <Eigen/Core>
#include <algorithm>
#include <cstdint>
#include <limits>
#include <vector>

namespace lidarloop {

class KdTree3 {
public:
  KdTree3() = default;

  explicit KdTree3(std::vector<Eigen::Vector3d> points) { build(std::move(points)); }

  void build(std::vector<Eigen::Vector3d> points) {
    points_ = std::move(points);
    indices_.resize(points_.size());
    for (std::size_t i = 0; i < indices_.size(); ++i)
      indices_[i] = static_cast<std::uint32_t>(i);
    nodes_.clear();
    nodes_.reserve(points_.size());
    if (!points_.empty()) root_ = build_node(0, points_.size());
  }

  std::size_t size() const { return points_.size(); }
  const std::vector<Eigen::Vector3d>& points() const { return points_; }

  struct Neighbor {
    int index = -1;
    double squared_distance = std::numeric_limits<double>::infinity();
  };

  /// Nearest neighbor; index -1 on an empty tree.
  Neighbor nearest(const Eigen::Vector3d& query) const {
    Neighbor best;
    if (root_ >= 0) search_nearest(root_, query, best);
    return best;
  }

  /// Nearest neighbor within max_distance; index -1 if none qualifies.
  Neighbor nearest_within(const Eigen::Vector3d& query, double max_distance) const {
    Neighbor best;
    best.squared_distance = max_distance * max_distance;
    best.index = -1;
    if (root_ >= 0) search_nearest(root_, query, best);
    return best;
  }

  /// Indices of all points within `radius` of the query (order unspecified).
  std::vector<int> radius_search(const Eigen::Vector3d& query, double radius) const {
    std::vector<int> out;
    if (root_ >= 0) search_radius(root_, query, radius * radius, out);
    return out;
  }

private:
  struct Node {
    Eigen::Vector3d point;
    std::uint32_t index;
    std::int32_t left = -1, right = -1;
    std::uint8_t axis = 0;
  };

  std::int32_t build_node(std::size_t begin, std::size_t end) {
    Eigen::Vector3d lo = points_[indices_[begin]], hi = lo;
    for (std::size_t i = begin + 1; i < end; ++i) {
      lo = lo.cwiseMin(points_[indices_[i]]);
      hi = hi.cwiseMax(points_[indices_[i]]);
    }
    int axis = 0;
    (hi - lo).maxCoeff(&axis);
    const std::size_t mid = begin + (end - begin) / 2;
    std::nth_element(indices_.begin() + begin, indices_.begin() + mid,
                     indices_.begin() + end,
                     [&](std::uint32_t a, std::uint32_t b) {
                       return points_[a](axis) < points_[b](axis);
                     });
    Node node;
    node.point = points_[indices_[mid]];
    node.index = indices_[mid];
    node.axis = static_cast<std::uint8_t>(axis);
    const std::int32_t id = static_cast<std::int32_t>(nodes_.size());
    nodes_.push_back(node);
    if (mid > begin) nodes_[id].left = build_node(begin, mid);
    if (mid + 1 < end) nodes_[id].right = build_node(mid + 1, end);
    return id;
  }

  void search_nearest(std::int32_t id, const Eigen::Vector3d& q, Neighbor& best) const {
    const Node& node = nodes_[id];
    const double d2 = (node.point - q).squaredNorm();
    if (d2 < best.squared_distance) {
      best.squared_distance = d2;
      best.index = static_cast<int>(node.index);
    }
    const double delta = q(node.axis) - node.point(node.axis);
    const std::int32_t near = delta < 0 ? node.left : node.right;
    const std::int32_t far = delta < 0 ? node.right : node.left;
    if (near >= 0) search_nearest(near, q, best);
    if (far >= 0 && delta * delta < best.squared_distance)
      search_nearest(far, q, best);
  }

  void search_radius(std::int32_t id, const Eigen::Vector3d& q, double r2,
                     std::vector<int>& out) const {
    const Node& node = nodes_[id];
    if ((node.point - q).squaredNorm() <= r2)
      out.push_back(static_cast<int>(node.index));
    const double delta = q(node.axis) - node.point(node.axis);
    const std::int32_t near = delta < 0 ? node.left : node.right;
    const std::int32_t far = delta < 0 ? node.right : node.left;
    if (near >= 0) search_radius(near, q, r2, out);
    if (far >= 0 && delta * delta <= r2) search_radius(far, q, r2, out);
  }

  std::vector<Eigen::Vector3d> points_;
  std::vector<std::uint32_t> indices_;
  std::vector<Node> nodes_;
  std::int32_t root_ = -1;
};

}  // namespace lidarloop
