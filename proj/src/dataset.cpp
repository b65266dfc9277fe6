// Copyright 2026 The lidarloop Authors
// SPDX-License-Identifier: Apache-2.0

#include "lidarloop/dataset.hpp"

#include <algorithm>
#include <atomic>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include "lidarloop/error.hpp"
#include "lidarloop/json_io.hpp"
#include "lidarloop/pointcloud.hpp"

namespace fs = std::filesystem;

namespace lidarloop {

using nlohmann::json;

void DatasetManifest::validate() const {
  require(!scan_dir.empty(), ErrorCode::invalid_argument,
          "manifest: scan_dir missing");
  require(!pose_file.empty(), ErrorCode::invalid_argument,
          "manifest: pose_file missing");
  require(!session_boundaries.empty() && session_boundaries.front() == 0,
          ErrorCode::invalid_argument,
          "manifest: session_boundaries must start at 0");
  for (std::size_t i = 1; i < session_boundaries.size(); ++i)
    require(session_boundaries[i] > session_boundaries[i - 1],
            ErrorCode::invalid_argument,
            "manifest: session_boundaries must be strictly increasing");
  require(loop_distance > 0, ErrorCode::invalid_argument,
          "manifest: loop_distance must be > 0");
  spec.validate();
}

namespace {

std::string resolve(const fs::path& base, const std::string& p) {
  if (p.empty()) return p;
  fs::path path(p);
  if (path.is_absolute()) return p;
  return (base / path).string();
}

}  // namespace

DatasetManifest DatasetManifest::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::io, "cannot open manifest " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    fail(ErrorCode::format, path + ": " + e.what());
  }
  DatasetManifest m;
  const fs::path base = fs::path(path).parent_path();
  try {
    m.scan_dir = resolve(base, j.at("scan_dir").get<std::string>());
    m.pose_file = resolve(base, j.at("pose_file").get<std::string>());
    if (j.contains("odom_file"))
      m.odom_file = resolve(base, j["odom_file"].get<std::string>());
    if (j.contains("session_boundaries"))
      m.session_boundaries =
          j["session_boundaries"].get<std::vector<std::size_t>>();
    if (j.contains("spec")) m.spec = spec_from_json(j["spec"]);
    if (j.contains("cache"))
      m.cache_path = resolve(base, j["cache"].get<std::string>());
    if (j.contains("loop_distance")) m.loop_distance = j["loop_distance"];
  } catch (const json::exception& e) {
    fail(ErrorCode::format, path + ": " + e.what());
  }
  m.validate();
  return m;
}

void DatasetManifest::save(const std::string& path) const {
  json j{{"scan_dir", scan_dir},
         {"pose_file", pose_file},
         {"session_boundaries", session_boundaries},
         {"spec", spec_to_json(spec)},
         {"loop_distance", loop_distance}};
  if (!odom_file.empty()) j["odom_file"] = odom_file;
  if (!cache_path.empty()) j["cache"] = cache_path;
  std::ofstream out(path);
  if (!out) fail(ErrorCode::io, "cannot write " + path);
  out << j.dump(2) << '\n';
}

Pose2 kitti_pose_to_planar(const double m[12]) {
  // Camera frame: x right, y down, z forward. Planar frame: x = forward
  // (camera z), y = left (-camera x); heading from the forward column.
  const double tx = m[3], tz = m[11];
  const double r02 = m[2], r22 = m[10];
  return {tz, -tx, std::atan2(-r02, r22)};
}

std::vector<Pose2> load_poses(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::io, "cannot open pose file " + path);
  std::vector<Pose2> poses;
  std::string line;
  const bool kitti = fs::path(path).extension() == ".txt";
  std::size_t lineno = 0;
  bool header_checked = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    if (kitti) {
      std::istringstream ss(line);
      double m[12];
      for (int i = 0; i < 12; ++i)
        if (!(ss >> m[i]))
          fail(ErrorCode::format,
               path + ": expected 12 floats at line " + std::to_string(lineno));
      poses.push_back(kitti_pose_to_planar(m));
    } else {
      if (!header_checked) {
        header_checked = true;
        if (line.rfind("x,y,theta", 0) != 0)
          fail(ErrorCode::format, path + ": expected header x,y,theta");
        continue;
      }
      Pose2 p;
      char c1, c2;
      std::istringstream ss(line);
      if (!(ss >> p.x >> c1 >> p.y >> c2 >> p.theta) || c1 != ',' || c2 != ',')
        fail(ErrorCode::format,
             path + ": bad row at line " + std::to_string(lineno));
      poses.push_back(p);
    }
  }
  return poses;
}

namespace {

std::vector<std::string> list_scans(const std::string& dir) {
  require(fs::is_directory(dir), ErrorCode::io,
          "scan_dir is not a directory: " + dir);
  std::vector<std::string> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    const std::string ext = entry.path().extension().string();
    if (ext == ".bin" || ext == ".csv") files.push_back(entry.path().string());
  }
  std::sort(files.begin(), files.end());
  return files;
}

bool load_descriptor_cache(const std::string& path, const HistogramSpec& spec,
                           std::size_t expected, std::vector<Descriptor>& out) {
  std::ifstream in(path);
  if (!in) return false;
  json j;
  try {
    in >> j;
    if (j.at("spec_fingerprint").get<std::string>() != spec.fingerprint())
      return false;
    const auto& ds = j.at("descriptors");
    if (ds.size() != expected) return false;
    out.clear();
    out.reserve(expected);
    for (const auto& d : ds) out.push_back(descriptor_from_json(d));
  } catch (const std::exception&) {
    return false;  // stale or corrupt cache; rebuild
  }
  return true;
}

void save_descriptor_cache(const std::string& path, const HistogramSpec& spec,
                           const std::vector<Descriptor>& descriptors) {
  json ds = json::array();
  for (const Descriptor& d : descriptors) ds.push_back(descriptor_to_json(d));
  json j{{"spec_fingerprint", spec.fingerprint()}, {"descriptors", ds}};
  std::ofstream out(path);
  if (!out) fail(ErrorCode::io, "cannot write cache " + path);
  out << j.dump() << '\n';
}

}  // namespace

Dataset build_dataset(const DatasetManifest& manifest) {
  manifest.validate();
  Dataset ds;
  ds.manifest = manifest;

  const std::vector<std::string> scans = list_scans(manifest.scan_dir);
  const std::vector<Pose2> poses = load_poses(manifest.pose_file);
  require(scans.size() == poses.size(), ErrorCode::precondition,
          "dataset: " + std::to_string(scans.size()) + " scans but " +
              std::to_string(poses.size()) + " poses");
  require(!scans.empty(), ErrorCode::precondition, "dataset: no scans found");
  require(manifest.session_boundaries.back() < scans.size(),
          ErrorCode::invalid_argument,
          "dataset: session boundary beyond node count");

  std::vector<Pose2> odom = poses;
  if (!manifest.odom_file.empty()) {
    odom = load_poses(manifest.odom_file);
    require(odom.size() == poses.size(), ErrorCode::precondition,
            "dataset: odometry pose count differs from scan count");
  }

  const std::size_t n = scans.size();
  std::vector<Descriptor> descriptors;
  if (!manifest.cache_path.empty() &&
      load_descriptor_cache(manifest.cache_path, manifest.spec, n, descriptors)) {
    ds.descriptors_from_cache = true;
  } else {
    descriptors.resize(n);
    std::atomic<std::size_t> next{0};
    std::atomic<bool> failed{false};
    std::string error_message;
    std::mutex error_mutex;
    auto worker = [&]() {
      for (;;) {
        const std::size_t i = next.fetch_add(1);
        if (i >= n || failed.load()) return;
        try {
          descriptors[i] =
              extract_descriptor(load_cloud(scans[i]), manifest.spec);
        } catch (const std::exception& e) {
          std::lock_guard<std::mutex> lock(error_mutex);
          failed = true;
          error_message = "scan " + std::to_string(i) + " (" + scans[i] +
                          "): " + e.what();
        }
      }
    };
    const unsigned n_threads =
        std::max(1u, std::min<unsigned>(std::thread::hardware_concurrency(),
                                        static_cast<unsigned>(n)));
    std::vector<std::thread> threads;
    for (unsigned t = 0; t < n_threads; ++t) threads.emplace_back(worker);
    for (std::thread& t : threads) t.join();
    if (failed) fail(ErrorCode::format, "dataset: " + error_message);
    if (!manifest.cache_path.empty())
      save_descriptor_cache(manifest.cache_path, manifest.spec, descriptors);
  }

  ds.nodes.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    DatasetNode& node = ds.nodes[i];
    node.id = static_cast<int>(i);
    node.session = 0;
    for (std::size_t s = 0; s < manifest.session_boundaries.size(); ++s)
      if (i >= manifest.session_boundaries[s]) node.session = static_cast<int>(s);
    node.pose = poses[i];
    node.odom = odom[i];
    node.descriptor = std::move(descriptors[i]);
    node.scan_path = scans[i];
  }
  return ds;
}

Dataset build_dataset_from_file(const std::string& manifest_path) {
  return build_dataset(DatasetManifest::load(manifest_path));
}

std::vector<Eigen::Vector2d> Dataset::positions() const {
  std::vector<Eigen::Vector2d> out(nodes.size());
  for (std::size_t i = 0; i < nodes.size(); ++i)
    out[i] = nodes[i].pose.position();
  return out;
}

std::vector<Descriptor> Dataset::descriptors() const {
  std::vector<Descriptor> out(nodes.size());
  for (std::size_t i = 0; i < nodes.size(); ++i) out[i] = nodes[i].descriptor;
  return out;
}

}  // namespace lidarloop
