// Copyright 2026 The lidarloop Authors
// SPDX-License-Identifier: Apache-2.0

#include "lidarloop/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "lidarloop/error.hpp"
#include "lidarloop/rng.hpp"

namespace fs = std::filesystem;

namespace lidarloop {

void SynthConfig::validate() const {
  require(side > 0 && spacing > 0 && laps >= 1, ErrorCode::invalid_argument,
          "synth: bad trajectory parameters");
  require(sessions == 1 || sessions == 2, ErrorCode::invalid_argument,
          "synth: sessions must be 1 or 2");
  require(session_overlap > 0 && session_overlap <= 1 &&
              session_start_fraction >= 0 && session_start_fraction < 1,
          ErrorCode::invalid_argument, "synth: bad session parameters");
  require(beams >= 2 && azimuth_steps >= 8, ErrorCode::invalid_argument,
          "synth: bad scanner resolution");
  require(max_range > 0 && sensor_height > 0, ErrorCode::invalid_argument,
          "synth: bad scanner geometry");
}

namespace {

struct Box {
  Eigen::Vector3d lo, hi;
  double intensity;
};

struct Pillar {
  double cx, cy, radius, height, intensity;
};

struct Scene {
  std::vector<Box> boxes;
  std::vector<Pillar> pillars;
  double ground_intensity = 3.0;
};

// Slab-method ray/AABB intersection; returns the nearest positive hit.
bool ray_box(const Eigen::Vector3d& origin, const Eigen::Vector3d& dir,
             const Box& box, double& t_hit) {
  double t0 = 0.0, t1 = std::numeric_limits<double>::infinity();
  for (int k = 0; k < 3; ++k) {
    if (std::abs(dir(k)) < 1e-12) {
      if (origin(k) < box.lo(k) || origin(k) > box.hi(k)) return false;
      continue;
    }
    double a = (box.lo(k) - origin(k)) / dir(k);
    double b = (box.hi(k) - origin(k)) / dir(k);
    if (a > b) std::swap(a, b);
    t0 = std::max(t0, a);
    t1 = std::min(t1, b);
    if (t0 > t1) return false;
  }
  if (t0 <= 1e-9) return false;  // origin inside or behind
  t_hit = t0;
  return true;
}

bool ray_pillar(const Eigen::Vector3d& origin, const Eigen::Vector3d& dir,
                const Pillar& p, double& t_hit) {
  const double ox = origin.x() - p.cx, oy = origin.y() - p.cy;
  const double a = dir.x() * dir.x() + dir.y() * dir.y();
  if (a < 1e-12) return false;
  const double b = 2.0 * (ox * dir.x() + oy * dir.y());
  const double c = ox * ox + oy * oy - p.radius * p.radius;
  const double disc = b * b - 4 * a * c;
  if (disc < 0) return false;
  const double sq = std::sqrt(disc);
  for (double t : {(-b - sq) / (2 * a), (-b + sq) / (2 * a)}) {
    if (t <= 1e-9) continue;
    const double z = origin.z() + t * dir.z();
    if (z < 0.0 || z > p.height) continue;
    t_hit = t;
    return true;
  }
  return false;
}

struct Hit {
  double t;
  double intensity;
};

bool cast_ray(const Scene& scene, const Eigen::Vector3d& origin,
              const Eigen::Vector3d& dir, double max_range, Hit& hit) {
  double best = max_range;
  double intensity = 0.0;
  bool found = false;
  if (dir.z() < -1e-9) {
    const double t = -origin.z() / dir.z();
    if (t > 1e-9 && t < best) {
      best = t;
      intensity = scene.ground_intensity;
      found = true;
    }
  }
  double t;
  for (const Box& b : scene.boxes)
    if (ray_box(origin, dir, b, t) && t < best) {
      best = t;
      intensity = b.intensity;
      found = true;
    }
  for (const Pillar& p : scene.pillars)
    if (ray_pillar(origin, dir, p, t) && t < best) {
      best = t;
      intensity = p.intensity;
      found = true;
    }
  if (!found) return false;
  hit = {best, intensity};
  return true;
}

// Distance from a point to the square circuit's perimeter (centered at the
// origin, half side h).
double distance_to_circuit(double x, double y, double h) {
  const double ax = std::abs(x), ay = std::abs(y);
  const double m = std::max(ax, ay);
  if (m >= h) {
    // Outside: distance to the square boundary.
    const double dx = std::max(ax - h, 0.0), dy = std::max(ay - h, 0.0);
    return std::sqrt(dx * dx + dy * dy);
  }
  return h - m;  // inside: distance to the nearest side
}

Scene make_scene(const SynthConfig& cfg, Rng& rng) {
  Scene scene;
  scene.ground_intensity = cfg.ground_intensity;
  const double half = cfg.side / 2.0;
  const double extent = half + cfg.margin;
  auto placeable = [&](double x, double y, double footprint) {
    return distance_to_circuit(x, y, half) > footprint + cfg.clearance;
  };
  int guard = 0;
  while (static_cast<int>(scene.boxes.size()) < cfg.n_boxes && guard++ < 10000) {
    const double cx = rng.uniform(-extent, extent);
    const double cy = rng.uniform(-extent, extent);
    const double w = rng.uniform(0.6, 4.0);
    const double d = rng.uniform(0.6, 4.0);
    // Low boxes expose their top faces to the scanner, anchoring the
    // vertical direction during registration.
    const double h = rng.uniform(0.5, 5.0);
    if (!placeable(cx, cy, std::max(w, d) / 2.0)) continue;
    Box box;
    box.lo = {cx - w / 2.0, cy - d / 2.0, 0.0};
    box.hi = {cx + w / 2.0, cy + d / 2.0, h};
    box.intensity = rng.uniform(20.0, 200.0);
    scene.boxes.push_back(box);
  }
  guard = 0;
  while (static_cast<int>(scene.pillars.size()) < cfg.n_pillars &&
         guard++ < 10000) {
    Pillar p;
    p.cx = rng.uniform(-extent, extent);
    p.cy = rng.uniform(-extent, extent);
    p.radius = rng.uniform(0.12, 0.5);
    p.height = rng.uniform(2.0, 6.0);
    p.intensity = rng.uniform(20.0, 200.0);
    if (!placeable(p.cx, p.cy, p.radius)) continue;
    scene.pillars.push_back(p);
  }
  return scene;
}

// Pose on the square circuit at arc length s (counter-clockwise, starting at
// the bottom-left corner heading +x).
Pose2 circuit_pose(double s, double side) {
  const double h = side / 2.0;
  const double perimeter = 4.0 * side;
  s = std::fmod(s, perimeter);
  if (s < 0) s += perimeter;
  if (s < side) return {-h + s, -h, 0.0};
  if (s < 2 * side) return {h, -h + (s - side), M_PI / 2.0};
  if (s < 3 * side) return {h - (s - 2 * side), h, M_PI};
  return {-h, h - (s - 3 * side), -M_PI / 2.0};
}

PointCloud scan_scene(const Scene& scene, const Pose2& pose,
                      const SynthConfig& cfg, Rng& rng) {
  PointCloud cloud;
  const Eigen::Vector3d origin{pose.x, pose.y, cfg.sensor_height};
  const double c = std::cos(pose.theta), s = std::sin(pose.theta);
  for (int b = 0; b < cfg.beams; ++b) {
    // Elevation fan from -15 to +15 degrees.
    const double elev =
        (-15.0 + 30.0 * b / (cfg.beams - 1)) * M_PI / 180.0;
    const double ce = std::cos(elev), se = std::sin(elev);
    for (int a = 0; a < cfg.azimuth_steps; ++a) {
      const double az = 2.0 * M_PI * a / cfg.azimuth_steps;
      const double ca = std::cos(az), sa = std::sin(az);
      const Eigen::Vector3d dir_sensor{ce * ca, ce * sa, se};
      const Eigen::Vector3d dir_world{c * dir_sensor.x() - s * dir_sensor.y(),
                                      s * dir_sensor.x() + c * dir_sensor.y(),
                                      dir_sensor.z()};
      Hit hit;
      if (!cast_ray(scene, origin, dir_world, cfg.max_range, hit)) continue;
      double range = hit.t;
      if (cfg.range_noise > 0) range += rng.normal(0.0, cfg.range_noise);
      if (range <= 0) continue;
      cloud.points.push_back({dir_sensor.x() * range, dir_sensor.y() * range,
                              dir_sensor.z() * range, hit.intensity});
    }
  }
  return cloud;
}

}  // namespace

SynthResult synth_world(const SynthConfig& cfg, std::uint64_t seed) {
  cfg.validate();
  Rng scene_rng(mix_seed(seed, 1));
  const Scene scene = make_scene(cfg, scene_rng);

  const double perimeter = 4.0 * cfg.side;
  SynthResult result;
  result.session_boundaries.push_back(0);

  // Ground-truth poses: session 0 covers `laps` circuits; an optional second
  // session re-enters part of the circuit.
  Rng traj_rng(mix_seed(seed, 2));
  std::vector<Pose2> gt;
  const auto add_circuit_nodes = [&](double s_begin, double length) {
    for (double s = s_begin; s < s_begin + length; s += cfg.spacing) {
      Pose2 p = circuit_pose(s, cfg.side);
      const double lateral = traj_rng.uniform(-cfg.lateral_jitter, cfg.lateral_jitter);
      p.x += -std::sin(p.theta) * lateral;
      p.y += std::cos(p.theta) * lateral;
      gt.push_back(p);
    }
  };
  add_circuit_nodes(0.0, perimeter * cfg.laps);
  if (cfg.sessions == 2) {
    result.session_boundaries.push_back(gt.size());
    add_circuit_nodes(perimeter * cfg.session_start_fraction,
                      perimeter * cfg.session_overlap);
  }
  result.ground_truth = gt;

  // Odometry: integrate true deltas with injected noise; each session
  // restarts in its own frame at the origin.
  Rng noise_rng(mix_seed(seed, 3));
  result.odometry.resize(gt.size());
  for (std::size_t i = 0; i < gt.size(); ++i) {
    const bool session_start =
        std::find(result.session_boundaries.begin(),
                  result.session_boundaries.end(),
                  i) != result.session_boundaries.end();
    if (i == 0) {
      result.odometry[i] = gt[i];
    } else if (session_start) {
      result.odometry[i] = Pose2{0.0, 0.0, 0.0};
    } else {
      Pose2 delta = gt[i - 1].between(gt[i]);
      delta.x += noise_rng.normal(0.0, cfg.odom_sigma_xy);
      delta.y += noise_rng.normal(0.0, cfg.odom_sigma_xy);
      delta.theta = wrap_angle(delta.theta +
                               noise_rng.normal(0.0, cfg.odom_sigma_theta) +
                               cfg.odom_yaw_bias);
      result.odometry[i] = result.odometry[i - 1].compose(delta);
    }
  }

  Rng scan_rng(mix_seed(seed, 4));
  result.scans.reserve(gt.size());
  for (const Pose2& pose : gt)
    result.scans.push_back(scan_scene(scene, pose, cfg, scan_rng));
  return result;
}

PointCloud synth_scan(const SynthConfig& config, std::uint64_t scene_seed,
                      const Pose2& pose, std::uint64_t noise_seed) {
  config.validate();
  Rng scene_rng(mix_seed(scene_seed, 1));
  const Scene scene = make_scene(config, scene_rng);
  Rng noise_rng(noise_seed);
  return scan_scene(scene, pose, config, noise_rng);
}

namespace {

void write_poses_csv(const std::vector<Pose2>& poses, const std::string& path) {
  std::ofstream out(path);
  if (!out) fail(ErrorCode::io, "cannot write " + path);
  out << "x,y,theta\n";
  out.precision(17);
  for (const Pose2& p : poses)
    out << p.x << ',' << p.y << ',' << p.theta << '\n';
}

void write_kitti_bin(const PointCloud& cloud, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::io, "cannot write " + path);
  std::vector<float> raw;
  raw.reserve(cloud.size() * 4);
  for (const Point& p : cloud.points) {
    raw.push_back(static_cast<float>(p.x));
    raw.push_back(static_cast<float>(p.y));
    raw.push_back(static_cast<float>(p.z));
    raw.push_back(static_cast<float>(p.intensity));
  }
  out.write(reinterpret_cast<const char*>(raw.data()),
            static_cast<std::streamsize>(raw.size() * sizeof(float)));
  if (!out) fail(ErrorCode::io, "write failed on " + path);
}

}  // namespace

DatasetManifest write_synth_dataset(const SynthResult& result,
                                    const HistogramSpec& spec,
                                    double loop_distance,
                                    const std::string& out_dir) {
  fs::create_directories(fs::path(out_dir) / "scans");
  char name[32];
  for (std::size_t i = 0; i < result.scans.size(); ++i) {
    std::snprintf(name, sizeof(name), "%06zu.bin", i);
    write_kitti_bin(result.scans[i], (fs::path(out_dir) / "scans" / name).string());
  }
  write_poses_csv(result.ground_truth, (fs::path(out_dir) / "poses.csv").string());
  write_poses_csv(result.odometry, (fs::path(out_dir) / "odom.csv").string());

  // The stored manifest uses paths relative to its own location; reloading
  // resolves them, so the dataset directory stays relocatable.
  DatasetManifest manifest;
  manifest.scan_dir = "scans";
  manifest.pose_file = "poses.csv";
  manifest.odom_file = "odom.csv";
  manifest.session_boundaries = result.session_boundaries;
  manifest.spec = spec;
  manifest.cache_path = "descriptors.json";
  manifest.loop_distance = loop_distance;
  const std::string manifest_path = (fs::path(out_dir) / "manifest.json").string();
  manifest.save(manifest_path);
  return DatasetManifest::load(manifest_path);
}

}  // namespace lidarloop
