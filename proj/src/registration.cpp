// Copyright 2026 The lidarloop Authors
// SPDX-License-Identifier: Apache-2.0

#include "lidarloop/registration.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>

#include "lidarloop/error.hpp"
#include "lidarloop/kdtree.hpp"
#include "lidarloop/rng.hpp"

namespace lidarloop {

void RegistrationParams::validate() const {
  filter.validate();
  require(normal_radius > 0 && fpfh_radius > 0, ErrorCode::invalid_argument,
          "feature radii must be > 0");
  require(persistence_radii.size() >= 2, ErrorCode::invalid_argument,
          "need at least 2 persistence radii");
  for (double r : persistence_radii)
    require(r > 0, ErrorCode::invalid_argument, "persistence radii must be > 0");
  require(ransac_iterations > 0 && ransac_inlier_distance > 0,
          ErrorCode::invalid_argument, "bad RANSAC parameters");
  require(icp_max_iterations > 0 && icp_convergence_eps > 0 &&
              icp_max_correspondence_distance > 0,
          ErrorCode::invalid_argument, "bad ICP parameters");
  require(n_p_min <= filter.n_p_max, ErrorCode::invalid_argument,
          "n_p_min must be <= n_p_max");
  require(n_inliers > 0 && t_max > 0, ErrorCode::invalid_argument,
          "bad verification parameters");
}

const char* to_string(RejectReason reason) {
  switch (reason) {
    case RejectReason::none: return "none";
    case RejectReason::too_few_points: return "too_few_points";
    case RejectReason::too_few_keypoints: return "too_few_keypoints";
    case RejectReason::no_correspondences: return "no_correspondences";
    case RejectReason::too_few_inliers: return "too_few_inliers";
    case RejectReason::icp_failed: return "icp_failed";
    case RejectReason::translation_too_large: return "translation_too_large";
  }
  return "unknown";
}

namespace {

std::vector<Eigen::Vector3d> to_vectors(const PointCloud& cloud) {
  std::vector<Eigen::Vector3d> v(cloud.size());
  for (std::size_t i = 0; i < cloud.size(); ++i)
    v[i] = {cloud.points[i].x, cloud.points[i].y, cloud.points[i].z};
  return v;
}

}  // namespace

NormalCloud compute_normals(const PointCloud& cloud, double radius) {
  require(radius > 0, ErrorCode::invalid_argument, "normal radius must be > 0");
  NormalCloud out;
  out.normals.assign(cloud.size(), Eigen::Vector3d::Zero());
  out.valid.assign(cloud.size(), 0);
  if (cloud.empty()) return out;

  KdTree3 tree(to_vectors(cloud));
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    const Eigen::Vector3d p{cloud.points[i].x, cloud.points[i].y,
                            cloud.points[i].z};
    const std::vector<int> nbrs = tree.radius_search(p, radius);
    if (nbrs.size() < 3) continue;
    Eigen::Vector3d mean = Eigen::Vector3d::Zero();
    for (int j : nbrs) mean += tree.points()[j];
    mean /= static_cast<double>(nbrs.size());
    Eigen::Matrix3d cov = Eigen::Matrix3d::Zero();
    for (int j : nbrs) {
      const Eigen::Vector3d d = tree.points()[j] - mean;
      cov += d * d.transpose();
    }
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(cov);
    Eigen::Vector3d n = es.eigenvectors().col(0);
    // Orient toward the sensor origin.
    if (n.dot(p) > 0) n = -n;
    out.normals[i] = n;
    out.valid[i] = 1;
  }
  return out;
}

namespace {

// The three Darboux-frame pair angles (f1, f2, f3) between (p1, n1) and
// (p2, n2); the point whose normal is better aligned with the connecting
// line acts as source. Returns false for coincident points or a degenerate
// frame.
bool pair_angles(const Eigen::Vector3d& p1, const Eigen::Vector3d& n1,
                 const Eigen::Vector3d& p2, const Eigen::Vector3d& n2,
                 double& f1, double& f2, double& f3) {
  Eigen::Vector3d dp = p2 - p1;
  const double dist = dp.norm();
  if (dist <= 0.0) return false;
  dp /= dist;
  Eigen::Vector3d ns = n1, nt = n2;
  const double a1 = ns.dot(dp);
  const double a2 = nt.dot(dp);
  double f3_candidate = a1;
  if (std::acos(std::abs(a1)) > std::acos(std::abs(a2))) {
    std::swap(ns, nt);
    dp = -dp;
    f3_candidate = a2;
  }
  Eigen::Vector3d v = dp.cross(ns);
  const double vnorm = v.norm();
  if (vnorm <= 1e-12) return false;
  v /= vnorm;
  const Eigen::Vector3d w = ns.cross(v);
  f2 = v.dot(nt);
  f1 = std::atan2(w.dot(nt), ns.dot(nt));
  f3 = f3_candidate;
  return true;
}

int angle_bin(double value, double lo, double hi) {
  const double t = (value - lo) / (hi - lo);
  int b = static_cast<int>(std::floor(t * kFpfhBinsPerAngle));
  return std::clamp(b, 0, kFpfhBinsPerAngle - 1);
}

using RawHistogram = std::array<double, kFpfhDim>;

void accumulate_pair(RawHistogram& h, double f1, double f2, double f3) {
  h[angle_bin(f1, -M_PI, M_PI)] += 1.0;
  h[kFpfhBinsPerAngle + angle_bin(f2, -1.0, 1.0)] += 1.0;
  h[2 * kFpfhBinsPerAngle + angle_bin(f3, -1.0, 1.0)] += 1.0;
}

}  // namespace

std::vector<FpfhSignature> compute_fpfh(const PointCloud& cloud,
                                        const NormalCloud& normals,
                                        double radius) {
  require(radius > 0, ErrorCode::invalid_argument, "fpfh radius must be > 0");
  require(normals.normals.size() == cloud.size(), ErrorCode::dimension_mismatch,
          "fpfh: normals do not match cloud");
  const std::size_t n = cloud.size();
  std::vector<FpfhSignature> out(n);
  if (n == 0) return out;

  const std::vector<Eigen::Vector3d> pts = to_vectors(cloud);
  KdTree3 tree(pts);

  std::vector<std::vector<int>> neighborhoods(n);
  std::vector<RawHistogram> spfh(n);
  std::vector<std::uint8_t> has_spfh(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    spfh[i].fill(0.0);
    if (!normals.valid[i]) continue;
    std::vector<int> nbrs = tree.radius_search(pts[i], radius);
    std::erase_if(nbrs, [&](int j) {
      return j == static_cast<int>(i) || !normals.valid[j];
    });
    neighborhoods[i] = std::move(nbrs);
    bool any = false;
    for (int j : neighborhoods[i]) {
      double f1, f2, f3;
      if (!pair_angles(pts[i], normals.normals[i], pts[j], normals.normals[j],
                       f1, f2, f3))
        continue;
      accumulate_pair(spfh[i], f1, f2, f3);
      any = true;
    }
    has_spfh[i] = any ? 1 : 0;
  }

  for (std::size_t i = 0; i < n; ++i) {
    if (!has_spfh[i]) continue;  // zero signature, flagged invalid
    RawHistogram acc = spfh[i];
    double weighted_neighbors = 0.0;
    RawHistogram nbr_sum{};
    for (int j : neighborhoods[i]) {
      if (!has_spfh[j]) continue;
      const double dist = (pts[i] - pts[j]).norm();
      if (dist <= 0.0) continue;
      const double w = 1.0 / dist;
      for (int b = 0; b < kFpfhDim; ++b) nbr_sum[b] += w * spfh[j][b];
      weighted_neighbors += 1.0;
    }
    if (weighted_neighbors > 0.0)
      for (int b = 0; b < kFpfhDim; ++b)
        acc[b] += nbr_sum[b] / weighted_neighbors;

    double total = 0.0;
    for (double v : acc) total += v;
    if (total <= 0.0) continue;
    for (int b = 0; b < kFpfhDim; ++b) out[i].bins[b] = acc[b] * 100.0 / total;
    out[i].valid = true;
  }
  return out;
}

std::vector<int> select_persistent(
    const std::vector<std::vector<FpfhSignature>>& per_radius, double gamma) {
  require(per_radius.size() >= 2, ErrorCode::precondition,
          "select_persistent: need at least 2 radii");
  const std::size_t n = per_radius.front().size();
  for (const auto& sigs : per_radius)
    require(sigs.size() == n, ErrorCode::dimension_mismatch,
            "select_persistent: signature sets differ in size");

  std::vector<std::uint8_t> persistent(n, 1);
  for (const auto& sigs : per_radius) {
    Eigen::VectorXd mean = Eigen::VectorXd::Zero(kFpfhDim);
    std::size_t valid_count = 0;
    for (const FpfhSignature& s : sigs) {
      if (!s.valid) continue;
      for (int b = 0; b < kFpfhDim; ++b) mean(b) += s.bins[b];
      ++valid_count;
    }
    if (valid_count == 0) return {};
    mean /= static_cast<double>(valid_count);

    std::vector<double> dist(n, -1.0);
    double dmean = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (!sigs[i].valid) continue;
      double sq = 0.0;
      for (int b = 0; b < kFpfhDim; ++b) {
        const double d = sigs[i].bins[b] - mean(b);
        sq += d * d;
      }
      dist[i] = std::sqrt(sq);
      dmean += dist[i];
    }
    dmean /= static_cast<double>(valid_count);
    double var = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      if (dist[i] >= 0.0) var += (dist[i] - dmean) * (dist[i] - dmean);
    const double dstd = std::sqrt(var / static_cast<double>(valid_count));

    const double cut = dmean + gamma * dstd;
    for (std::size_t i = 0; i < n; ++i)
      if (dist[i] < 0.0 || dist[i] <= cut) persistent[i] = 0;
  }

  std::vector<int> out;
  for (std::size_t i = 0; i < n; ++i)
    if (persistent[i]) out.push_back(static_cast<int>(i));
  return out;
}

CorrespondenceSet match_correspondences(const FeaturePoints& a,
                                        const FeaturePoints& b) {
  require(!a.empty() && !b.empty(), ErrorCode::precondition,
          "match_correspondences: empty feature set");
  CorrespondenceSet out;
  out.reserve(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    double best = std::numeric_limits<double>::infinity();
    int best_j = -1;
    for (std::size_t j = 0; j < b.size(); ++j) {
      double sq = 0.0;
      for (int k = 0; k < kFpfhDim; ++k) {
        const double d = a.signatures[i][k] - b.signatures[j][k];
        sq += d * d;
        if (sq >= best) break;
      }
      if (sq < best) {
        best = sq;
        best_j = static_cast<int>(j);
      }
    }
    out.push_back({a.point_indices[i], b.point_indices[best_j]});
  }
  return out;
}

namespace {

bool collinear(const Eigen::Vector3d& a, const Eigen::Vector3d& b,
               const Eigen::Vector3d& c) {
  const Eigen::Vector3d u = b - a, v = c - a;
  const double denom = u.norm() * v.norm();
  if (denom <= 0.0) return true;
  return u.cross(v).norm() / denom < 1e-6;
}

RigidTransform svd_from_points(const std::vector<Eigen::Vector3d>& a,
                               const std::vector<Eigen::Vector3d>& b) {
  const double n = static_cast<double>(a.size());
  Eigen::Vector3d ca = Eigen::Vector3d::Zero(), cb = Eigen::Vector3d::Zero();
  for (std::size_t i = 0; i < a.size(); ++i) {
    ca += a[i];
    cb += b[i];
  }
  ca /= n;
  cb /= n;
  Eigen::Matrix3d h = Eigen::Matrix3d::Zero();
  for (std::size_t i = 0; i < a.size(); ++i)
    h += (a[i] - ca) * (b[i] - cb).transpose();
  Eigen::JacobiSVD<Eigen::Matrix3d> svd(h, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Eigen::Vector3d& sv = svd.singularValues();
  // Collinear correspondences leave the rotation about the line unresolved.
  require(sv(1) > 1e-12 * std::max(sv(0), 1e-300), ErrorCode::numeric,
          "estimate_svd: rank-deficient correspondence configuration");
  Eigen::Matrix3d u = svd.matrixU(), v = svd.matrixV();
  Eigen::Matrix3d d = Eigen::Matrix3d::Identity();
  d(2, 2) = (v * u.transpose()).determinant() < 0 ? -1.0 : 1.0;
  RigidTransform t;
  t.rotation = v * d * u.transpose();
  t.translation = cb - t.rotation * ca;
  return t;
}

}  // namespace

RigidTransform estimate_svd(const CorrespondenceSet& correspondences,
                            const PointCloud& cloud_a, const PointCloud& cloud_b) {
  require(correspondences.size() >= 3, ErrorCode::precondition,
          "estimate_svd: need at least 3 correspondences");
  std::vector<Eigen::Vector3d> a, b;
  a.reserve(correspondences.size());
  b.reserve(correspondences.size());
  for (const Correspondence& c : correspondences) {
    const Point& pa = cloud_a.points.at(static_cast<std::size_t>(c.index_a));
    const Point& pb = cloud_b.points.at(static_cast<std::size_t>(c.index_b));
    a.push_back({pa.x, pa.y, pa.z});
    b.push_back({pb.x, pb.y, pb.z});
  }
  return svd_from_points(a, b);
}

CorrespondenceSet ransac_reject(const CorrespondenceSet& correspondences,
                                const PointCloud& cloud_a,
                                const PointCloud& cloud_b,
                                double inlier_distance, int iterations,
                                std::uint64_t seed) {
  require(correspondences.size() >= 3, ErrorCode::precondition,
          "ransac_reject: need at least 3 correspondences");
  const std::size_t n = correspondences.size();
  std::vector<Eigen::Vector3d> a(n), b(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Point& pa =
        cloud_a.points.at(static_cast<std::size_t>(correspondences[i].index_a));
    const Point& pb =
        cloud_b.points.at(static_cast<std::size_t>(correspondences[i].index_b));
    a[i] = {pa.x, pa.y, pa.z};
    b[i] = {pb.x, pb.y, pb.z};
  }

  Rng rng(seed);
  const double d2 = inlier_distance * inlier_distance;
  std::size_t best_count = 0;
  RigidTransform best_transform;
  bool have_best = false;

  // A minimal sample is usable when its source points are spread out and
  // non-collinear and the pairwise distances survive on the target side
  // (rigidity); everything else cannot produce the right transform.
  const auto sample_ok = [&](const std::vector<std::size_t>& s) {
    for (int i = 0; i < 3; ++i)
      for (int j = i + 1; j < 3; ++j) {
        const double da = (a[s[i]] - a[s[j]]).norm();
        const double db = (b[s[i]] - b[s[j]]).norm();
        if (da < 2.0 * inlier_distance) return false;
        if (std::abs(da - db) > 2.0 * inlier_distance) return false;
      }
    return !collinear(a[s[0]], a[s[1]], a[s[2]]);
  };

  for (int it = 0; it < iterations; ++it) {
    const std::vector<std::size_t> sample = rng.sample_without_replacement(n, 3);
    if (!sample_ok(sample)) continue;
    RigidTransform t;
    try {
      t = svd_from_points({a[sample[0]], a[sample[1]], a[sample[2]]},
                          {b[sample[0]], b[sample[1]], b[sample[2]]});
    } catch (const Error&) {
      continue;  // degenerate sample
    }
    std::size_t count = 0;
    for (std::size_t i = 0; i < n; ++i)
      if ((t.apply(a[i]) - b[i]).squaredNorm() < d2) ++count;
    if (count > best_count) {
      best_count = count;
      best_transform = t;
      have_best = true;
    }
  }

  CorrespondenceSet inliers;
  if (!have_best) return inliers;
  for (std::size_t i = 0; i < n; ++i)
    if ((best_transform.apply(a[i]) - b[i]).squaredNorm() < d2)
      inliers.push_back(correspondences[i]);
  return inliers;
}

IcpResult icp_refine(const PointCloud& cloud_a, const PointCloud& cloud_b,
                     const RigidTransform& initial, int max_iterations,
                     double convergence_eps, double max_correspondence_distance,
                     double trim_fraction) {
  require(!cloud_a.empty() && !cloud_b.empty(), ErrorCode::precondition,
          "icp_refine: empty cloud");
  require(trim_fraction >= 0.0 && trim_fraction < 1.0, ErrorCode::invalid_argument,
          "icp_refine: trim fraction must be in [0, 1)");
  const std::vector<Eigen::Vector3d> a = to_vectors(cloud_a);
  KdTree3 tree(to_vectors(cloud_b));

  IcpResult result;
  result.transform = initial;

  for (int it = 0; it < max_iterations; ++it) {
    struct Match {
      Eigen::Vector3d src, dst;
      double distance;
    };
    std::vector<Match> matches;
    matches.reserve(a.size());
    for (const Eigen::Vector3d& p : a) {
      const Eigen::Vector3d q = result.transform.apply(p);
      const KdTree3::Neighbor nb =
          tree.nearest_within(q, max_correspondence_distance);
      if (nb.index < 0) continue;
      matches.push_back(
          {p, tree.points()[nb.index], std::sqrt(nb.squared_distance)});
    }
    if (trim_fraction > 0.0 && matches.size() > 3) {
      const std::size_t keep = std::max<std::size_t>(
          3, static_cast<std::size_t>(
                 std::ceil((1.0 - trim_fraction) * matches.size())));
      std::nth_element(matches.begin(), matches.begin() + keep - 1,
                       matches.end(), [](const Match& x, const Match& y) {
                         return x.distance < y.distance;
                       });
      matches.resize(keep);
    }
    if (matches.size() < 3)
      fail(ErrorCode::numeric,
           "icp_refine: no correspondences within the match distance");
    std::vector<Eigen::Vector3d> src, dst;
    src.reserve(matches.size());
    dst.reserve(matches.size());
    double residual_sum = 0.0;
    for (const Match& m : matches) {
      src.push_back(m.src);
      dst.push_back(m.dst);
      residual_sum += m.distance;
    }
    result.mean_residual = residual_sum / static_cast<double>(src.size());
    result.residual_history.push_back(result.mean_residual);

    RigidTransform updated;
    try {
      updated = svd_from_points(src, dst);
    } catch (const Error&) {
      break;  // degenerate correspondence geometry; keep current estimate
    }
    const double dt = (updated.translation - result.transform.translation).norm();
    const double dr =
        RigidTransform{updated.rotation * result.transform.rotation.transpose(),
                       Eigen::Vector3d::Zero()}
            .rotation_angle();
    result.transform = updated;
    result.iterations = it + 1;
    if (dt + dr < convergence_eps) {
      result.converged = true;
      break;
    }
  }

  // Residual of the final transform.
  double residual_sum = 0.0;
  std::size_t matched = 0;
  for (const Eigen::Vector3d& p : a) {
    const KdTree3::Neighbor nb = tree.nearest_within(
        result.transform.apply(p), max_correspondence_distance);
    if (nb.index < 0) continue;
    residual_sum += std::sqrt(nb.squared_distance);
    ++matched;
  }
  if (matched == 0)
    fail(ErrorCode::numeric,
         "icp_refine: no correspondences within the match distance");
  result.mean_residual = residual_sum / static_cast<double>(matched);
  result.residual_history.push_back(result.mean_residual);
  return result;
}

namespace {

FeaturePoints keypoint_features(const PointCloud& cloud,
                                const RegistrationParams& params) {
  const NormalCloud normals = compute_normals(cloud, params.normal_radius);
  std::vector<std::vector<FpfhSignature>> per_radius;
  per_radius.reserve(params.persistence_radii.size());
  for (double r : params.persistence_radii)
    per_radius.push_back(compute_fpfh(cloud, normals, r));
  const std::vector<int> keys =
      select_persistent(per_radius, params.persistence_gamma);

  const std::vector<FpfhSignature> match_sigs =
      compute_fpfh(cloud, normals, params.fpfh_radius);
  FeaturePoints out;
  for (int idx : keys) {
    if (!match_sigs[idx].valid) continue;
    out.point_indices.push_back(idx);
    out.signatures.push_back(match_sigs[idx].bins);
  }
  return out;
}

}  // namespace

RegistrationResult register_pair(const PointCloud& current,
                                 const PointCloud& candidate,
                                 const RegistrationParams& params) {
  params.validate();
  RegistrationResult result;

  FilterParams filter_b = params.filter;
  filter_b.seed = mix_seed(params.filter.seed, 1);
  const PointCloud a = preprocess(current, params.filter);
  const PointCloud b = preprocess(candidate, filter_b);
  result.processed_size_current = a.size();
  result.processed_size_candidate = b.size();

  if (a.size() < params.n_p_min || b.size() < params.n_p_min) {
    result.reason = RejectReason::too_few_points;
    return result;
  }

  const FeaturePoints fa = keypoint_features(a, params);
  const FeaturePoints fb = keypoint_features(b, params);
  if (fa.size() < 3 || fb.size() < 3) {
    result.reason = RejectReason::too_few_keypoints;
    return result;
  }

  // Match in both directions; the union gives the consensus search more
  // true correspondences to lock onto under partial overlap.
  CorrespondenceSet raw = match_correspondences(fa, fb);
  for (const Correspondence& c : match_correspondences(fb, fa)) {
    const Correspondence flipped{c.index_b, c.index_a};
    bool duplicate = false;
    for (const Correspondence& existing : raw)
      if (existing.index_a == flipped.index_a &&
          existing.index_b == flipped.index_b) {
        duplicate = true;
        break;
      }
    if (!duplicate) raw.push_back(flipped);
  }
  if (raw.size() < 3) {
    result.reason = RejectReason::no_correspondences;
    return result;
  }

  const CorrespondenceSet inliers =
      ransac_reject(raw, a, b, params.ransac_inlier_distance,
                    params.ransac_iterations, mix_seed(params.seed, 2));
  result.inlier_count = static_cast<int>(inliers.size());
  if (inliers.size() < static_cast<std::size_t>(params.n_inliers) ||
      inliers.size() < 3) {
    result.reason = RejectReason::too_few_inliers;
    return result;
  }

  RigidTransform initial;
  try {
    initial = estimate_svd(inliers, a, b);
    // Consensus refinement: re-collect the correspondences consistent with
    // the current estimate and re-fit. Tightens the initial alignment when
    // the minimal-sample fit was slightly off.
    for (int round = 0; round < 2; ++round) {
      CorrespondenceSet consistent;
      for (const Correspondence& c : raw) {
        const Point& pa = a.points[static_cast<std::size_t>(c.index_a)];
        const Point& pb = b.points[static_cast<std::size_t>(c.index_b)];
        if ((initial.apply({pa.x, pa.y, pa.z}) -
             Eigen::Vector3d{pb.x, pb.y, pb.z})
                .norm() < params.ransac_inlier_distance)
          consistent.push_back(c);
      }
      if (consistent.size() < inliers.size() || consistent.size() < 3) break;
      initial = estimate_svd(consistent, a, b);
    }
  } catch (const Error&) {
    result.reason = RejectReason::too_few_inliers;
    return result;
  }

  IcpResult icp;
  try {
    icp = icp_refine(a, b, initial, params.icp_max_iterations,
                     params.icp_convergence_eps,
                     params.icp_max_correspondence_distance,
                     params.icp_trim_fraction);
  } catch (const Error&) {
    result.reason = RejectReason::icp_failed;
    return result;
  }
  result.transform = icp.transform;
  result.icp_residual = icp.mean_residual;
  result.icp_iterations = icp.iterations;

  if (result.transform.translation.norm() > params.t_max) {
    result.reason = RejectReason::translation_too_large;
    return result;
  }

  result.accepted = true;
  result.reason = RejectReason::none;
  return result;
}

}  // namespace lidarloop
