// Copyright 2026 The lidarloop Authors
// SPDX-License-Identifier: Apache-2.0

#include "lidarloop/descriptor.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "lidarloop/error.hpp"

namespace lidarloop {

void HistogramSpec::validate() const {
  for (double b : bin_widths)
    require(b > 0.0, ErrorCode::invalid_argument, "histogram bin width must be > 0");
  require(r_max > 0.0, ErrorCode::invalid_argument, "r_max must be > 0");
}

std::size_t HistogramSpec::histogram_dim(int k) const {
  return static_cast<std::size_t>(std::ceil(r_max / bin_widths[k]));
}

std::size_t HistogramSpec::total_entries() const {
  std::size_t n = kNumType1Features;
  for (int k = 0; k < kNumHistograms; ++k) n += histogram_dim(k);
  return n;
}

std::string HistogramSpec::fingerprint() const {
  std::ostringstream ss;
  ss.precision(17);
  for (int k = 0; k < kNumHistograms; ++k) {
    if (k) ss << ',';
    ss << bin_widths[k];
  }
  ss << '|' << r_max;
  return ss.str();
}

bool HistogramSpec::operator==(const HistogramSpec& other) const {
  return bin_widths == other.bin_widths && r_max == other.r_max;
}

namespace {

struct Moments {
  double mean = 0, std_dev = 0, skewness = 0, kurtosis = 0;
};

// Population moments; skewness/kurtosis fall back to 0 at zero variance.
Moments moments(const std::vector<double>& v) {
  Moments m;
  const double n = static_cast<double>(v.size());
  m.mean = std::accumulate(v.begin(), v.end(), 0.0) / n;
  double m2 = 0, m3 = 0, m4 = 0;
  for (double x : v) {
    const double d = x - m.mean;
    m2 += d * d;
    m3 += d * d * d;
    m4 += d * d * d * d;
  }
  m2 /= n;
  m3 /= n;
  m4 /= n;
  m.std_dev = std::sqrt(m2);
  if (m2 > 0.0) {
    m.skewness = m3 / (m2 * m.std_dev);
    m.kurtosis = m4 / (m2 * m2);
  }
  return m;
}

// Percentile by linear interpolation between closest ranks (values sorted).
double percentile(const std::vector<double>& sorted, double q) {
  const std::size_t n = sorted.size();
  if (n == 1) return sorted[0];
  const double pos = q * static_cast<double>(n - 1);
  const std::size_t lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, n - 1);
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] * (1.0 - frac) + sorted[hi] * frac;
}

struct SphereFit {
  double center_distance = 0, radius = 0, rms_residual = 0;
};

// Linear least squares on |p|^2 = 2 c·p + k with k = r^2 - |c|^2.
// Minimal-norm solution via SVD keeps degenerate clouds finite.
SphereFit fit_sphere(const std::vector<Eigen::Vector3d>& pts) {
  const auto n = static_cast<Eigen::Index>(pts.size());
  Eigen::MatrixXd a(n, 4);
  Eigen::VectorXd b(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Eigen::Vector3d& p = pts[static_cast<std::size_t>(i)];
    a.row(i) << 2.0 * p.x(), 2.0 * p.y(), 2.0 * p.z(), 1.0;
    b(i) = p.squaredNorm();
  }
  const Eigen::Vector4d sol =
      a.jacobiSvd(Eigen::ComputeThinU | Eigen::ComputeThinV).solve(b);
  const Eigen::Vector3d center = sol.head<3>();
  const double r2 = std::max(sol(3) + center.squaredNorm(), 0.0);
  SphereFit fit;
  fit.center_distance = center.norm();
  fit.radius = std::sqrt(r2);
  double sq = 0;
  for (const Eigen::Vector3d& p : pts) {
    const double d = (p - center).norm() - fit.radius;
    sq += d * d;
  }
  fit.rms_residual = std::sqrt(sq / static_cast<double>(n));
  return fit;
}

}  // namespace

Descriptor extract_descriptor(const PointCloud& raw, const HistogramSpec& spec) {
  spec.validate();
  require(!raw.empty(), ErrorCode::precondition,
          "extract_descriptor: empty cloud");

  const PointCloud cloud = range_clamp(raw, spec.r_max);
  const std::size_t n = cloud.size();
  const double nd = static_cast<double>(n);

  std::vector<double> ranges(n), zs(n), planar(n);
  std::vector<Eigen::Vector3d> pts(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Point& p = cloud.points[i];
    ranges[i] = p.range();
    zs[i] = p.z;
    planar[i] = p.planar_range();
    pts[i] = {p.x, p.y, p.z};
  }

  Descriptor d;
  d.spec = spec;

  const Moments mr = moments(ranges);
  std::vector<double> sorted_ranges = ranges;
  std::sort(sorted_ranges.begin(), sorted_ranges.end());

  d.type1[kPointCount] = nd;
  d.type1[kMeanRange] = mr.mean;
  d.type1[kRangeStd] = mr.std_dev;
  d.type1[kRangeSkewness] = mr.skewness;
  d.type1[kRangeKurtosis] = mr.kurtosis;
  d.type1[kMedianRange] = percentile(sorted_ranges, 0.5);
  d.type1[kRangeP25] = percentile(sorted_ranges, 0.25);
  d.type1[kRangeP75] = percentile(sorted_ranges, 0.75);
  d.type1[kMaxRange] = sorted_ranges.back();

  const double clamp_edge = spec.r_max * (1.0 - 1e-12);
  std::size_t clamped = 0;
  for (double r : ranges)
    if (r >= clamp_edge) ++clamped;
  d.type1[kClampedFraction] = static_cast<double>(clamped) / nd;

  const Moments mz = moments(zs);
  d.type1[kMeanZ] = mz.mean;
  d.type1[kZStd] = mz.std_dev;
  d.type1[kZSkewness] = mz.skewness;
  d.type1[kZKurtosis] = mz.kurtosis;
  d.type1[kMinZ] = *std::min_element(zs.begin(), zs.end());
  d.type1[kMaxZ] = *std::max_element(zs.begin(), zs.end());

  const Moments mp = moments(planar);
  d.type1[kMeanPlanarRange] = mp.mean;
  d.type1[kPlanarRangeStd] = mp.std_dev;

  Eigen::Vector3d centroid = Eigen::Vector3d::Zero();
  for (const auto& p : pts) centroid += p;
  centroid /= nd;
  d.type1[kCentroidDistance] = centroid.norm();

  std::vector<double> offsets(n);
  Eigen::Matrix3d cov = Eigen::Matrix3d::Zero();
  for (std::size_t i = 0; i < n; ++i) {
    const Eigen::Vector3d q = pts[i] - centroid;
    offsets[i] = q.norm();
    cov += q * q.transpose();
  }
  cov /= nd;
  const Moments mo = moments(offsets);
  d.type1[kMeanCentroidOffset] = mo.mean;
  d.type1[kCentroidOffsetStd] = mo.std_dev;

  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(cov);
  // Ascending from Eigen; we store descending, clamped at 0 against
  // numerical round-off.
  const double l1 = std::max(es.eigenvalues()(2), 0.0);
  const double l2 = std::max(es.eigenvalues()(1), 0.0);
  const double l3 = std::max(es.eigenvalues()(0), 0.0);
  d.type1[kEigen1] = l1;
  d.type1[kEigen2] = l2;
  d.type1[kEigen3] = l3;
  if (l1 > 0.0) {
    d.type1[kLinearity] = (l1 - l2) / l1;
    d.type1[kPlanarity] = (l2 - l3) / l1;
    d.type1[kSphericity] = l3 / l1;
    d.type1[kOmnivariance] = std::cbrt(l1 * l2 * l3);
    const double trace = l1 + l2 + l3;
    double entropy = 0.0;
    for (double l : {l1, l2, l3}) {
      const double lh = l / trace;
      if (lh > 0.0) entropy -= lh * std::log(lh);
    }
    d.type1[kEigenentropy] = entropy;
  }

  const SphereFit sphere = fit_sphere(pts);
  d.type1[kSphereCenterDistance] = sphere.center_distance;
  d.type1[kSphereRadius] = sphere.radius;
  d.type1[kSphereRmsResidual] = sphere.rms_residual;

  for (int k = 0; k < kNumHistograms; ++k) {
    const std::size_t dim = spec.histogram_dim(k);
    d.type2[k].assign(dim, 0);
    const double b = spec.bin_widths[k];
    for (double r : ranges) {
      std::size_t idx = static_cast<std::size_t>(std::floor(r / b));
      if (idx >= dim) idx = dim - 1;  // clamped points land in the last shell
      ++d.type2[k][idx];
    }
  }
  return d;
}

double pearson(const std::vector<std::uint32_t>& a,
               const std::vector<std::uint32_t>& b) {
  require(a.size() == b.size(), ErrorCode::dimension_mismatch,
          "pearson: length mismatch");
  require(a.size() >= 2, ErrorCode::precondition, "pearson: need length >= 2");
  const double n = static_cast<double>(a.size());
  double ma = 0, mb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ma += a[i];
    mb += b[i];
  }
  ma /= n;
  mb /= n;
  double num = 0, va = 0, vb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double da = a[i] - ma, db = b[i] - mb;
    num += da * db;
    va += da * da;
    vb += db * db;
  }
  if (va <= 0.0 || vb <= 0.0) return 0.0;
  return std::clamp(num / std::sqrt(va * vb), -1.0, 1.0);
}

ComparisonVector compare_descriptors(const Descriptor& a, const Descriptor& b) {
  require(a.spec == b.spec, ErrorCode::dimension_mismatch,
          "compare_descriptors: descriptors use different histogram specs");
  ComparisonVector c{};
  for (int i = 0; i < kNumType1Features; ++i)
    c[i] = std::abs(a.type1[i] - b.type1[i]);
  for (int k = 0; k < kNumHistograms; ++k)
    c[kNumType1Features + k] = pearson(a.type2[k], b.type2[k]);
  return c;
}

}  // namespace lidarloop
