// Copyright 2026 The lidarloop Authors
// SPDX-License-Identifier: Apache-2.0

#include "lidarloop/pointcloud.hpp"

#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <unordered_map>

#include "lidarloop/error.hpp"
#include "lidarloop/rng.hpp"

namespace lidarloop {

void FilterParams::validate() const {
  require(voxel_size > 0.0, ErrorCode::invalid_argument, "voxel_size must be > 0");
  require(r_lim > 0.0, ErrorCode::invalid_argument, "r_lim must be > 0");
  require(n_p_max > 0, ErrorCode::invalid_argument, "n_p_max must be > 0");
}

PointCloud range_clamp(const PointCloud& cloud, double r_max) {
  require(r_max > 0.0, ErrorCode::invalid_argument, "r_max must be > 0");
  PointCloud out;
  out.points.reserve(cloud.size());
  for (const Point& p : cloud.points) {
    Point q = p;
    // Re-check after scaling: rounding can leave the recomputed range a few
    // ulp above r_max, and the output must satisfy the bound exactly so a
    // second clamp is the identity.
    for (double r = q.range(); r > r_max; r = q.range()) {
      double s = r_max / r;
      if (s >= 1.0) s = std::nextafter(1.0, 0.0);
      q.x *= s;
      q.y *= s;
      q.z *= s;
    }
    out.points.push_back(q);
  }
  return out;
}

namespace {

struct CellKey {
  std::int64_t ix, iy, iz;
  bool operator==(const CellKey&) const = default;
};

struct CellKeyHash {
  std::size_t operator()(const CellKey& k) const {
    std::uint64_t h = 1469598103934665603ull;
    for (std::int64_t v : {k.ix, k.iy, k.iz}) {
      h ^= static_cast<std::uint64_t>(v);
      h *= 1099511628211ull;
    }
    return static_cast<std::size_t>(h);
  }
};

std::int64_t cell_index(double v, double l) {
  return static_cast<std::int64_t>(std::floor(v / l));
}

}  // namespace

PointCloud voxel_grid_filter(const PointCloud& cloud, double voxel_size) {
  require(voxel_size > 0.0, ErrorCode::invalid_argument, "voxel_size must be > 0");
  struct Accum {
    double x = 0, y = 0, z = 0, intensity = 0;
    std::size_t count = 0;
    std::size_t order = 0;
  };
  std::unordered_map<CellKey, Accum, CellKeyHash> cells;
  cells.reserve(cloud.size());
  std::size_t next_order = 0;
  for (const Point& p : cloud.points) {
    const CellKey key{cell_index(p.x, voxel_size), cell_index(p.y, voxel_size),
                      cell_index(p.z, voxel_size)};
    auto [it, inserted] = cells.try_emplace(key);
    Accum& a = it->second;
    if (inserted) a.order = next_order++;
    a.x += p.x;
    a.y += p.y;
    a.z += p.z;
    a.intensity += p.intensity;
    ++a.count;
  }
  PointCloud out;
  out.points.resize(cells.size());
  for (const auto& [key, a] : cells) {
    const double n = static_cast<double>(a.count);
    out.points[a.order] = {a.x / n, a.y / n, a.z / n, a.intensity / n};
  }
  return out;
}

PointCloud height_filter(const PointCloud& cloud, double z_lim) {
  PointCloud out;
  out.points.reserve(cloud.size());
  for (const Point& p : cloud.points)
    if (p.z >= z_lim) out.points.push_back(p);
  return out;
}

PointCloud intensity_filter(const PointCloud& cloud, double i_lim) {
  PointCloud out;
  out.points.reserve(cloud.size());
  for (const Point& p : cloud.points)
    if (p.intensity >= i_lim) out.points.push_back(p);
  return out;
}

PointCloud range_filter(const PointCloud& cloud, double r_lim) {
  PointCloud out;
  out.points.reserve(cloud.size());
  for (const Point& p : cloud.points)
    if (p.range() <= r_lim) out.points.push_back(p);
  return out;
}

PointCloud random_downsample(const PointCloud& cloud, std::size_t n_p_max,
                             std::uint64_t seed) {
  require(n_p_max > 0, ErrorCode::invalid_argument, "n_p_max must be > 0");
  if (cloud.size() <= n_p_max) return cloud;
  Rng rng(seed);
  const std::vector<std::size_t> keep =
      rng.sample_without_replacement(cloud.size(), n_p_max);
  PointCloud out;
  out.points.reserve(n_p_max);
  for (std::size_t i : keep) out.points.push_back(cloud.points[i]);
  return out;
}

PointCloud preprocess(const PointCloud& cloud, const FilterParams& params) {
  params.validate();
  PointCloud out = voxel_grid_filter(cloud, params.voxel_size);
  out = height_filter(out, params.z_lim);
  out = intensity_filter(out, params.i_lim);
  out = range_filter(out, params.r_lim);
  out = random_downsample(out, params.n_p_max, params.seed);
  return out;
}

PointCloud load_kitti_bin(const std::string& path) {
  std::ifstream in(path, std::ios::binary | std::ios::ate);
  if (!in) fail(ErrorCode::io, "cannot open " + path);
  const std::streamoff size = in.tellg();
  if (size % 16 != 0)
    fail(ErrorCode::format,
         path + ": size " + std::to_string(size) + " not a multiple of 16");
  in.seekg(0);
  const std::size_t n = static_cast<std::size_t>(size) / 16;
  std::vector<float> raw(n * 4);
  if (n > 0) {
    in.read(reinterpret_cast<char*>(raw.data()), size);
    if (!in) fail(ErrorCode::io, "short read on " + path);
  }
  PointCloud cloud;
  cloud.points.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    cloud.points[i] = {static_cast<double>(raw[4 * i]),
                       static_cast<double>(raw[4 * i + 1]),
                       static_cast<double>(raw[4 * i + 2]),
                       static_cast<double>(raw[4 * i + 3])};
  }
  return cloud;
}

PointCloud load_cloud_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::io, "cannot open " + path);
  std::string line;
  if (!std::getline(in, line)) return {};
  // Header row is required.
  if (line.rfind("x,y,z,intensity", 0) != 0)
    fail(ErrorCode::format, path + ": expected header x,y,z,intensity");
  PointCloud cloud;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    Point p;
    char c1, c2, c3;
    std::istringstream ss(line);
    if (!(ss >> p.x >> c1 >> p.y >> c2 >> p.z >> c3 >> p.intensity) ||
        c1 != ',' || c2 != ',' || c3 != ',')
      fail(ErrorCode::format, path + ": bad row at line " + std::to_string(lineno));
    cloud.points.push_back(p);
  }
  return cloud;
}

void save_cloud_csv(const PointCloud& cloud, const std::string& path) {
  std::ofstream out(path);
  if (!out) fail(ErrorCode::io, "cannot write " + path);
  out << "x,y,z,intensity\n";
  out.precision(17);
  for (const Point& p : cloud.points)
    out << p.x << ',' << p.y << ',' << p.z << ',' << p.intensity << '\n';
  if (!out) fail(ErrorCode::io, "write failed on " + path);
}

PointCloud load_cloud(const std::string& path) {
  const std::string ext = std::filesystem::path(path).extension().string();
  if (ext == ".bin") return load_kitti_bin(path);
  if (ext == ".csv") return load_cloud_csv(path);
  fail(ErrorCode::invalid_argument, path + ": unknown cloud extension " + ext);
}

}  // namespace lidarloop
