#pragma once

#include <Eigen/Geometry>
#include <cmath>

#include "rfsearch/common.hpp"

namespace rfsearch::world {

// Pinhole sensor pose. The optical axis is the +Z axis of the camera frame;
// fov_h spans the camera X axis, fov_v the camera Y axis.
struct CameraPose {
  Vec3 position = Vec3::Zero();
  Eigen::Quaterniond orientation = Eigen::Quaterniond::Identity();
  double fov_h = 1.0471975511965976;  // 60 deg
  double fov_v = 0.7853981633974483;  // 45 deg
  double near = 0.05;
  double far = 1.5;

  bool valid() const {
    return std::abs(orientation.norm() - 1.0) < 1e-9 && near > 0.0 &&
           far > near && fov_h > 0.0 && fov_h < M_PI && fov_v > 0.0 &&
           fov_v < M_PI;
  }

  Vec3 forward() const { return orientation * Vec3::UnitZ(); }
  Vec3 right() const { return orientation * Vec3::UnitX(); }
  Vec3 up() const { return orientation * Vec3::UnitY(); }

  Vec3 to_camera(const Vec3& p_world) const {
    return orientation.conjugate() * (p_world - position);
  }

  Vec3 to_world(const Vec3& p_cam) const {
    return orientation * p_cam + position;
  }

  // Strict frustum membership test for a world point.
  bool contains(const Vec3& p_world) const {
    Vec3 c = to_camera(p_world);
    if (c.z() < near || c.z() > far) return false;
    double th = std::tan(0.5 * fov_h) * c.z();
    double tv = std::tan(0.5 * fov_v) * c.z();
    return std::abs(c.x()) <= th && std::abs(c.y()) <= tv;
  }

  // Angular distance (radians) from a world point to the optical axis.
  // Stays bounded and smooth for points beside or behind the sensor.
  double image_axis_distance(const Vec3& p_world) const {
    Vec3 c = to_camera(p_world);
    return std::atan2(c.head<2>().norm(), c.z());
  }
};

inline Eigen::Quaterniond quat_from_axis_angle(const Vec3& aa) {
  double angle = aa.norm();
  if (angle < 1e-12) return Eigen::Quaterniond::Identity();
  return Eigen::Quaterniond(Eigen::AngleAxisd(angle, aa / angle));
}

inline Vec3 axis_angle_from_quat(const Eigen::Quaterniond& q) {
  Eigen::AngleAxisd aa(q.normalized());
  double angle = aa.angle();
  // Keep the representation in the closed ball of radius pi.
  if (angle > M_PI) {
    angle = 2.0 * M_PI - angle;
    return -angle * aa.axis();
  }
  return angle * aa.axis();
}

// Rotation taking the camera forward axis (+Z) onto `dir`, with minimal twist.
inline Eigen::Quaterniond look_at(const Vec3& dir) {
  Vec3 d = dir.normalized();
  return Eigen::Quaterniond::FromTwoVectors(Vec3::UnitZ(), d);
}

}  // namespace rfsearch::world
