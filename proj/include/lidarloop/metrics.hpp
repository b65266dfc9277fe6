// Copyright 2026 The lidarloop Authors
// SPDX-License-Identifier: Apache-2.0
//
// Pairwise evaluation matrices: the ground-truth distance matrix and the
// detector's classification matrix, with CSV and PGM writers for visual
// comparison.

#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <string>
#include <vector>

#include "lidarloop/descriptor.hpp"
#include "lidarloop/detector.hpp"

namespace lidarloop {

struct BinaryMatrix {
  std::size_t n = 0;
  std::vector<std::uint8_t> data;  // row-major n*n

  std::uint8_t at(std::size_t i, std::size_t j) const { return data[i * n + j]; }
  void set(std::size_t i, std::size_t j, bool v) { data[i * n + j] = v ? 1 : 0; }
};

/// Entry (i,j) = 1 iff the node positions are closer than loop_distance
/// (diagonal all ones, symmetric).
BinaryMatrix distance_matrix(const std::vector<Eigen::Vector2d>& positions,
                             double loop_distance);

/// Entry (i,j) = 1 iff predict_proba(compare(f_i, f_j)) > p_min; symmetric
/// because the comparison is.
BinaryMatrix classification_matrix(const std::vector<Descriptor>& descriptors,
                                   const DetectorModel& model, double p_min);

void write_matrix_csv(const BinaryMatrix& m, const std::string& path);

/// Binary PGM (P5), loop cells white on black.
void write_matrix_pgm(const BinaryMatrix& m, const std::string& path);

}  // namespace lidarloop
