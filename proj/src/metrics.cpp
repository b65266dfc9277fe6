// Copyright 2026 The lidarloop Authors
// SPDX-License-Identifier: Apache-2.0

#include "lidarloop/metrics.hpp"

#include <fstream>

#include "lidarloop/error.hpp"

namespace lidarloop {

BinaryMatrix distance_matrix(const std::vector<Eigen::Vector2d>& positions,
                             double loop_distance) {
  const std::size_t n = positions.size();
  BinaryMatrix m{n, std::vector<std::uint8_t>(n * n, 0)};
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) {
      const bool loop = (positions[i] - positions[j]).norm() < loop_distance;
      m.set(i, j, loop);
      m.set(j, i, loop);
    }
  }
  return m;
}

BinaryMatrix classification_matrix(const std::vector<Descriptor>& descriptors,
                                   const DetectorModel& model, double p_min) {
  const std::size_t n = descriptors.size();
  BinaryMatrix m{n, std::vector<std::uint8_t>(n * n, 0)};
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) {
      const double p =
          predict_proba(model, compare_descriptors(descriptors[i], descriptors[j]));
      const bool loop = p > p_min;
      m.set(i, j, loop);
      m.set(j, i, loop);
    }
  }
  return m;
}

void write_matrix_csv(const BinaryMatrix& m, const std::string& path) {
  std::ofstream out(path);
  if (!out) fail(ErrorCode::io, "cannot write " + path);
  for (std::size_t i = 0; i < m.n; ++i) {
    for (std::size_t j = 0; j < m.n; ++j) {
      if (j) out << ',';
      out << static_cast<int>(m.at(i, j));
    }
    out << '\n';
  }
}

void write_matrix_pgm(const BinaryMatrix& m, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::io, "cannot write " + path);
  out << "P5\n" << m.n << ' ' << m.n << "\n255\n";
  std::vector<std::uint8_t> row(m.n);
  for (std::size_t i = 0; i < m.n; ++i) {
    for (std::size_t j = 0; j < m.n; ++j) row[j] = m.at(i, j) ? 255 : 0;
    out.write(reinterpret_cast<const char*>(row.data()),
              static_cast<std::streamsize>(row.size()));
  }
}

}  // namespace lidarloop
