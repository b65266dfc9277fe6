// Copyright 2026 The lidarloop Authors
// SPDX-License-Identifier: Apache-2.0
//
// Coarse-to-fine scan registration: five-filter preprocessing, normal
// estimation, FPFH features on persistent keypoints, nearest-neighbor
// correspondence matching, RANSAC outlier rejection, SVD initial alignment,
// point-to-point ICP refinement, and the three acceptance criteria
// (processed sizes, inlier count, translation bound).

#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "lidarloop/geometry.hpp"
#include "lidarloop/pointcloud.hpp"

namespace lidarloop {

inline constexpr int kFpfhBinsPerAngle = 11;
inline constexpr int kFpfhDim = 3 * kFpfhBinsPerAngle;  // 33

/// 33-bin FPFH signature, normalized to sum 100. Points without neighbors
/// carry a zero signature with valid = false.
struct FpfhSignature {
  std::array<double, kFpfhDim> bins{};
  bool valid = false;
};

struct NormalCloud {
  std::vector<Eigen::Vector3d> normals;
  std::vector<std::uint8_t> valid;
};

/// A correspondence by cloud point index (a in the source, b in the target).
struct Correspondence {
  int index_a = -1;
  int index_b = -1;
};
using CorrespondenceSet = std::vector<Correspondence>;

/// Keypoint indices with their match-time FPFH signatures.
struct FeaturePoints {
  std::vector<int> point_indices;
  std::vector<std::array<double, kFpfhDim>> signatures;

  std::size_t size() const { return point_indices.size(); }
  bool empty() const { return point_indices.empty(); }
};

struct RegistrationParams {
  FilterParams filter;

  double normal_radius = 1.0;                      // m
  double fpfh_radius = 1.6;                        // m, match-time signatures
  std::vector<double> persistence_radii = {0.8, 1.2, 1.6};
  double persistence_gamma = 1.0;

  int ransac_iterations = 1000;
  double ransac_inlier_distance = 0.5;             // m

  int icp_max_iterations = 50;
  double icp_convergence_eps = 1e-4;               // m (+rad) transform change
  double icp_max_correspondence_distance = 1.5;    // m
  // Fraction of the worst-residual matches dropped per iteration (trimmed
  // ICP); 0 keeps every match. Guards against partial-overlap edge pulls.
  double icp_trim_fraction = 0.0;

  std::size_t n_p_min = 7000;   // both processed scans must keep this many
  int n_inliers = 1000;         // correspondences surviving RANSAC
  double t_max = 3.0;           // m, translational bound on the result

  std::uint64_t seed = 0;

  void validate() const;
};

enum class RejectReason {
  none,
  too_few_points,        // processed size < n_p_min
  too_few_keypoints,     // persistent keypoints insufficient to match
  no_correspondences,
  too_few_inliers,       // RANSAC inliers < n_inliers
  icp_failed,
  translation_too_large  // ||t|| > t_max
};

const char* to_string(RejectReason reason);

struct RegistrationResult {
  RigidTransform transform;  // candidate ~= transform * current
  int inlier_count = 0;
  std::size_t processed_size_current = 0;
  std::size_t processed_size_candidate = 0;
  bool accepted = false;
  RejectReason reason = RejectReason::none;
  double icp_residual = 0.0;
  int icp_iterations = 0;
};

/// Normals from the smallest eigenvector of the local covariance within
/// `radius`, sign-oriented toward the sensor origin. Points with fewer than
/// 3 in-radius neighbors (including themselves) are flagged invalid.
NormalCloud compute_normals(const PointCloud& cloud, double radius);

/// Two-pass FPFH: per-point simplified histograms over the three pair
/// angles, then 1/distance-weighted neighbor accumulation; 11 bins per
/// angle, whole signature normalized to sum 100.
std::vector<FpfhSignature> compute_fpfh(const PointCloud& cloud,
                                        const NormalCloud& normals,
                                        double radius);

/// Indices salient at every radius: per radius, a point is salient when its
/// signature's distance from the mean signature exceeds mean + gamma * std
/// of that distance distribution.
std::vector<int> select_persistent(
    const std::vector<std::vector<FpfhSignature>>& per_radius, double gamma);

/// For each keypoint of a, the nearest neighbor of b in feature space.
CorrespondenceSet match_correspondences(const FeaturePoints& a,
                                        const FeaturePoints& b);

/// Seeded RANSAC rounds of 3-point rigid fits; returns the inlier set of the
/// best round (correspondences within inlier_distance after the fit).
CorrespondenceSet ransac_reject(const CorrespondenceSet& correspondences,
                                const PointCloud& cloud_a,
                                const PointCloud& cloud_b,
                                double inlier_distance, int iterations,
                                std::uint64_t seed);

/// Least-squares rigid transform over the correspondences (centroid
/// subtraction, SVD of the cross-covariance, reflection fix).
/// Needs >= 3 non-collinear correspondences.
RigidTransform estimate_svd(const CorrespondenceSet& correspondences,
                            const PointCloud& cloud_a, const PointCloud& cloud_b);

struct IcpResult {
  RigidTransform transform;
  int iterations = 0;
  double mean_residual = 0.0;
  std::vector<double> residual_history;
  bool converged = false;
};

/// Point-to-point ICP from an initial guess; correspondences beyond
/// max_correspondence_distance are ignored, and the worst trim_fraction of
/// the remaining matches is dropped each iteration.
IcpResult icp_refine(const PointCloud& cloud_a, const PointCloud& cloud_b,
                     const RigidTransform& initial, int max_iterations,
                     double convergence_eps, double max_correspondence_distance,
                     double trim_fraction = 0.0);

/// Full pipeline (preprocess -> size gate -> persistent FPFH -> match ->
/// RANSAC -> inlier gate -> SVD -> ICP -> translation gate). All failures
/// are verdicts, never exceptions.
RegistrationResult register_pair(const PointCloud& current,
                                 const PointCloud& candidate,
                                 const RegistrationParams& params);

}  // namespace lidarloop
