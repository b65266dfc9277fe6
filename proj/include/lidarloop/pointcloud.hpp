// Copyright 2026 The lidarloop Authors
// SPDX-License-Identifier: Apache-2.0
//
// Point cloud container, the five consecutive preprocessing filters
// (voxel grid, height, intensity, range, random downsampling), range
// clamping for descriptor extraction, and scan file ingestion.

#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

namespace lidarloop {

struct Point {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
  double intensity = 0.0;

  double range() const { return std::sqrt(x * x + y * y + z * z); }
  double planar_range() const { return std::sqrt(x * x + y * y); }
};

/// Ordered set of points in the sensor frame (origin at the sensor).
struct PointCloud {
  std::vector<Point> points;

  std::size_t size() const { return points.size(); }
  bool empty() const { return points.empty(); }
};

/// Parameters of the five-filter preprocessing pipeline.
struct FilterParams {
  double voxel_size = 0.03;       // l, m
  double z_lim = 0.3;             // m; points below are removed
  double i_lim = 5.0;             // points with lower intensity are removed
  double r_lim = 30.0;            // m; points farther away are removed
  std::size_t n_p_max = 10000;    // random downsampling target
  std::uint64_t seed = 0;

  void validate() const;
};

/// Move points with range > r_max toward the origin so that range == r_max.
/// Points already within r_max (and the origin itself) are unchanged;
/// the point count is preserved.
PointCloud range_clamp(const PointCloud& cloud, double r_max);

/// One point per occupied cubic cell of side `voxel_size`: the centroid of
/// the cell's points, intensity averaged. Cells are emitted in order of
/// first occurrence.
PointCloud voxel_grid_filter(const PointCloud& cloud, double voxel_size);

/// Keep points with z >= z_lim.
PointCloud height_filter(const PointCloud& cloud, double z_lim);

/// Keep points with intensity >= i_lim.
PointCloud intensity_filter(const PointCloud& cloud, double i_lim);

/// Keep points with range <= r_lim.
PointCloud range_filter(const PointCloud& cloud, double r_lim);

/// Identity if the cloud has at most n_p_max points; otherwise a uniform
/// random subset of exactly n_p_max points (input order preserved,
/// deterministic for a fixed seed).
PointCloud random_downsample(const PointCloud& cloud, std::size_t n_p_max,
                             std::uint64_t seed);

/// The five filters executed consecutively:
/// voxel grid -> height -> intensity -> range -> random downsampling.
PointCloud preprocess(const PointCloud& cloud, const FilterParams& params);

/// KITTI velodyne `.bin`: packed little-endian float32 (x, y, z, reflectance).
PointCloud load_kitti_bin(const std::string& path);

/// CSV interchange with header `x,y,z,intensity`, one point per row.
PointCloud load_cloud_csv(const std::string& path);
void save_cloud_csv(const PointCloud& cloud, const std::string& path);

/// Dispatch on extension: `.bin` -> KITTI, `.csv` -> CSV.
PointCloud load_cloud(const std::string& path);

}  // namespace lidarloop
