// Copyright 2026 The lidarloop Authors
// SPDX-License-Identifier: Apache-2.0
//
// Global scan descriptor: 32 scalar (type I) features plus nine range
// histograms (type II) with configurable bin widths, and the 41-entry
// comparison vector fed to the loop classifier. All type-I features are
// invariant under rotation about the sensor z-axis.

#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "lidarloop/pointcloud.hpp"

namespace lidarloop {

inline constexpr int kNumType1Features = 32;
inline constexpr int kNumHistograms = 9;
inline constexpr int kComparisonDim = kNumType1Features + kNumHistograms;  // 41

/// Bin widths of the nine range histograms and the clamping range.
/// Clamping every scan to r_max fixes each histogram's dimension,
/// ceil(r_max / b), for all scans under one spec.
struct HistogramSpec {
  std::array<double, kNumHistograms> bin_widths{0.5, 1.0, 1.5, 2.0, 2.5,
                                                3.0, 4.0, 5.0, 10.0};
  double r_max = 40.0;

  void validate() const;
  std::size_t histogram_dim(int k) const;
  /// 32 + sum of histogram dimensions.
  std::size_t total_entries() const;
  /// Canonical text form, stored in trained models to guard against
  /// comparing descriptors from different specs.
  std::string fingerprint() const;
  bool operator==(const HistogramSpec& other) const;
};

/// The indices of the 32 type-I features (dimension of Descriptor::type1).
enum Type1Feature : int {
  kPointCount = 0,
  kMeanRange,
  kRangeStd,
  kRangeSkewness,
  kRangeKurtosis,
  kMedianRange,
  kRangeP25,
  kRangeP75,
  kMaxRange,
  kClampedFraction,
  kMeanZ,
  kZStd,
  kZSkewness,
  kZKurtosis,
  kMinZ,
  kMaxZ,
  kMeanPlanarRange,
  kPlanarRangeStd,
  kCentroidDistance,
  kMeanCentroidOffset,
  kCentroidOffsetStd,
  kEigen1,
  kEigen2,
  kEigen3,
  kLinearity,
  kPlanarity,
  kSphericity,
  kOmnivariance,
  kEigenentropy,
  kSphereCenterDistance,
  kSphereRadius,
  kSphereRmsResidual,
};

struct Descriptor {
  std::array<double, kNumType1Features> type1{};
  std::array<std::vector<std::uint32_t>, kNumHistograms> type2;
  HistogramSpec spec;
};

/// Absolute type-I differences (entries 0..31) followed by per-histogram
/// Pearson correlations (entries 32..40).
using ComparisonVector = std::array<double, kComparisonDim>;

/// Clamp the cloud to spec.r_max, then compute the descriptor.
/// The cloud must be non-empty.
Descriptor extract_descriptor(const PointCloud& cloud, const HistogramSpec& spec);

/// Sample Pearson correlation of two equal-length histograms (length >= 2).
/// Returns 0.0 when either input has zero variance.
double pearson(const std::vector<std::uint32_t>& a,
               const std::vector<std::uint32_t>& b);

/// Both descriptors must share the same HistogramSpec.
ComparisonVector compare_descriptors(const Descriptor& a, const Descriptor& b);

}  // namespace lidarloop
