// Copyright 2026 The lidarloop Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Dense>
#include <cmath>

namespace lidarloop {

/// Wrap an angle to (-pi, pi].
inline double wrap_angle(double a) {
  a = std::fmod(a, 2.0 * M_PI);
  if (a > M_PI) a -= 2.0 * M_PI;
  if (a <= -M_PI) a += 2.0 * M_PI;
  return a;
}

/// Planar pose (x, y in meters, theta in radians).
struct Pose2 {
  double x = 0.0;
  double y = 0.0;
  double theta = 0.0;

  /// this ⊕ rel: rel expressed in this pose's frame.
  Pose2 compose(const Pose2& rel) const {
    const double c = std::cos(theta), s = std::sin(theta);
    return {x + c * rel.x - s * rel.y, y + s * rel.x + c * rel.y,
            wrap_angle(theta + rel.theta)};
  }

  Pose2 inverse() const {
    const double c = std::cos(theta), s = std::sin(theta);
    return {-(c * x + s * y), -(-s * x + c * y), wrap_angle(-theta)};
  }

  /// inv(this) ∘ other: the relative pose that takes this to other.
  Pose2 between(const Pose2& other) const {
    const double c = std::cos(theta), s = std::sin(theta);
    const double dx = other.x - x, dy = other.y - y;
    return {c * dx + s * dy, -s * dx + c * dy, wrap_angle(other.theta - theta)};
  }

  Eigen::Vector2d position() const { return {x, y}; }
};

/// SE(3) rigid transform: p' = rotation * p + translation.
struct RigidTransform {
  Eigen::Matrix3d rotation = Eigen::Matrix3d::Identity();
  Eigen::Vector3d translation = Eigen::Vector3d::Zero();

  static RigidTransform identity() { return {}; }

  Eigen::Vector3d apply(const Eigen::Vector3d& p) const {
    return rotation * p + translation;
  }

  RigidTransform compose(const RigidTransform& other) const {
    return {rotation * other.rotation, rotation * other.translation + translation};
  }

  RigidTransform inverse() const {
    Eigen::Matrix3d rt = rotation.transpose();
    return {rt, -(rt * translation)};
  }

  /// Orthonormality and det(+1) check within tol.
  bool is_valid(double tol = 1e-9) const {
    const Eigen::Matrix3d err =
        rotation.transpose() * rotation - Eigen::Matrix3d::Identity();
    return err.norm() <= tol && std::abs(rotation.determinant() - 1.0) <= tol &&
           translation.allFinite();
  }

  /// Total rotation angle in radians.
  double rotation_angle() const {
    const double c = std::clamp((rotation.trace() - 1.0) / 2.0, -1.0, 1.0);
    return std::acos(c);
  }

  /// Yaw about the +z axis.
  double yaw() const { return std::atan2(rotation(1, 0), rotation(0, 0)); }

  Eigen::Matrix4d matrix() const {
    Eigen::Matrix4d m = Eigen::Matrix4d::Identity();
    m.topLeftCorner<3, 3>() = rotation;
    m.topRightCorner<3, 1>() = translation;
    return m;
  }

  /// Project onto the z-up ground plane: (dx, dy, yaw).
  Pose2 to_planar() const { return {translation.x(), translation.y(), yaw()}; }
};

inline RigidTransform yaw_rotation(double yaw) {
  RigidTransform t;
  t.rotation = Eigen::AngleAxisd(yaw, Eigen::Vector3d::UnitZ()).toRotationMatrix();
  return t;
}

}  // namespace lidarloop
