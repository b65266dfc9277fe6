// Copyright 2026 The lidarloop Authors
// SPDX-License-Identifier: Apache-2.0
//
// Procedural datasets: a structured scene of boxes and pillars on a ground
// plane, sampled by a simulated 360-degree multi-beam scanner along a square
// circuit with revisits. Ground truth is retained; odometry noise is
// injected on top of it. Everything is a pure function of the seed.

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "lidarloop/dataset.hpp"
#include "lidarloop/geometry.hpp"
#include "lidarloop/pointcloud.hpp"

namespace lidarloop {

struct SynthConfig {
  // Trajectory: a square circuit, one node every `spacing` meters.
  double side = 30.0;
  double spacing = 1.0;
  int laps = 2;
  double lateral_jitter = 0.3;     // m, per-node offset of the true pose

  // Sessions: 1 = single session; 2 = a second traversal of part of the
  // circuit recorded as a new session (odometry restarts at its own origin).
  int sessions = 1;
  double session_start_fraction = 0.3;  // where along the circuit it begins
  double session_overlap = 0.7;         // fraction of the circuit it covers

  // Odometry noise on each step, applied to ground-truth deltas.
  double odom_sigma_xy = 0.02;     // m
  double odom_sigma_theta = 0.002; // rad
  double odom_yaw_bias = 0.0;      // rad per step, systematic drift

  // Scene.
  int n_boxes = 45;
  int n_pillars = 30;
  double clearance = 1.6;          // m, kept free around the path
  double margin = 12.0;            // m, scene extent beyond the circuit

  // Scanner.
  double sensor_height = 0.8;      // m above ground
  int beams = 16;                  // elevation fan, -15..+15 degrees
  int azimuth_steps = 360;
  double max_range = 45.0;         // m
  double range_noise = 0.0;        // m, std of per-return range noise
  double ground_intensity = 3.0;   // below the usual i_lim cutoff

  void validate() const;
};

struct SynthResult {
  std::vector<Pose2> ground_truth;
  std::vector<Pose2> odometry;     // session-local frames, noise injected
  std::vector<PointCloud> scans;   // sensor frame
  std::vector<std::size_t> session_boundaries;
};

SynthResult synth_world(const SynthConfig& config, std::uint64_t seed);

/// One scan of the seeded scene from an arbitrary pose. The scene is the
/// same one synth_world(config, scene_seed) samples.
PointCloud synth_scan(const SynthConfig& config, std::uint64_t scene_seed,
                      const Pose2& pose, std::uint64_t noise_seed);

/// Writes scans/%06d.bin (KITTI float32 layout), poses.csv, odom.csv and
/// manifest.json into `out_dir`. Byte-identical for a fixed seed.
DatasetManifest write_synth_dataset(const SynthResult& result,
                                    const HistogramSpec& spec,
                                    double loop_distance,
                                    const std::string& out_dir);

}  // namespace lidarloop
