// Copyright 2026 The lidarloop Authors
// SPDX-License-Identifier: Apache-2.0
//
// Dataset ingestion: a JSON manifest names a scan directory, pose files and
// the histogram spec; build_dataset decodes every scan, extracts its
// descriptor (clamped to the spec) and caches the result on disk so replays
// and training skip recomputation.

#pragma once

#include <Eigen/Core>
#include <optional>
#include <string>
#include <vector>

#include "lidarloop/descriptor.hpp"
#include "lidarloop/geometry.hpp"

namespace lidarloop {

struct DatasetManifest {
  std::string scan_dir;
  std::string pose_file;              // ground truth / best-known poses
  std::string odom_file;              // optional; replay odometry input
  std::vector<std::size_t> session_boundaries{0};  // node index starting each session
  HistogramSpec spec;
  std::string cache_path;             // optional descriptor cache
  double loop_distance = 3.0;

  void validate() const;

  /// Relative paths in the manifest resolve against its own directory.
  static DatasetManifest load(const std::string& path);
  void save(const std::string& path) const;
};

struct DatasetNode {
  int id = 0;
  int session = 0;
  Pose2 pose;        // from pose_file
  Pose2 odom;        // from odom_file (=pose when absent)
  Descriptor descriptor;
  std::string scan_path;
};

struct Dataset {
  DatasetManifest manifest;
  std::vector<DatasetNode> nodes;
  bool descriptors_from_cache = false;

  std::size_t size() const { return nodes.size(); }
  std::vector<Eigen::Vector2d> positions() const;
  std::vector<Descriptor> descriptors() const;
};

/// Poses from either format: KITTI ground-truth lines (12 floats, row-major
/// 3x4, camera frame projected onto the ground plane) for `.txt`, or CSV
/// with header `x,y,theta` otherwise.
std::vector<Pose2> load_poses(const std::string& path);

/// Project one KITTI 3x4 row-major pose onto the planar frame
/// (x = t_z, y = -t_x, heading of the camera forward axis).
Pose2 kitti_pose_to_planar(const double m[12]);

Dataset build_dataset(const DatasetManifest& manifest);
Dataset build_dataset_from_file(const std::string& manifest_path);

}  // namespace lidarloop
