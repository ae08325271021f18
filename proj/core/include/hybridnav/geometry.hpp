#pragma once

#include <cmath>
#include <Eigen/Dense>

namespace hybridnav {

/// A 3D point in meters. LIDAR points additionally carry an intensity and
/// the laser ring index that produced them; ring < 0 means "no ring id".
struct Point3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
  double intensity = 0.0;
  int ring = -1;

  Point3() = default;
  Point3(double px, double py, double pz) : x(px), y(py), z(pz) {}
  Point3(double px, double py, double pz, double i, int r)
      : x(px), y(py), z(pz), intensity(i), ring(r) {}

  Eigen::Vector3d vec() const { return {x, y, z}; }
  static Point3 from_vec(const Eigen::Vector3d& v) { return {v.x(), v.y(), v.z()}; }

  bool finite() const {
    return std::isfinite(x) && std::isfinite(y) && std::isfinite(z);
  }
  double norm() const { return std::sqrt(x * x + y * y + z * z); }
};

inline Point3 operator+(const Point3& a, const Point3& b) {
  return {a.x + b.x, a.y + b.y, a.z + b.z};
}
inline Point3 operator-(const Point3& a, const Point3& b) {
  return {a.x - b.x, a.y - b.y, a.z - b.z};
}
inline Point3 operator*(const Point3& a, double s) {
  return {a.x * s, a.y * s, a.z * s};
}
inline double distance(const Point3& a, const Point3& b) { return (a - b).norm(); }

/// Wrap an angle to (-pi, pi].
inline double wrap_angle(double a) {
  a = std::fmod(a, 2.0 * M_PI);
  if (a <= -M_PI) a += 2.0 * M_PI;
  if (a > M_PI) a -= 2.0 * M_PI;
  return a;
}

/// Signed distance a-b on the unit circle, in (-pi, pi].
inline double s1_distance(double a, double b) { return wrap_angle(a - b); }

/// Vehicle pose: position plus roll/pitch/yaw, angles wrapped to (-pi, pi].
struct Pose {
  Point3 position;
  double roll = 0.0;
  double pitch = 0.0;
  double yaw = 0.0;
};

/// Rotation matrix from roll/pitch/yaw, composed Rx * Ry * Rz with the axis
/// blocks as used throughout the transform pipeline.
Eigen::Matrix3d rotation_matrix(double roll, double pitch, double yaw);
inline Eigen::Matrix3d rotation_matrix(const Pose& p) {
  return rotation_matrix(p.roll, p.pitch, p.yaw);
}

/// Recover roll/pitch/yaw from a rotation matrix produced by rotation_matrix().
void rpy_from_matrix(const Eigen::Matrix3d& rm, double& roll, double& pitch, double& yaw);

/// Pose whose rigid transform is the inverse of `p`'s.
Pose inverse(const Pose& p);

inline Point3 transform_point(const Pose& pose, const Point3& p) {
  Eigen::Vector3d v = rotation_matrix(pose) * p.vec() + pose.position.vec();
  Point3 out = Point3::from_vec(v);
  out.intensity = p.intensity;
  out.ring = p.ring;
  return out;
}

}  // namespace hybridnav
