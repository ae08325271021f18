#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "hybridnav/geometry.hpp"

namespace hybridnav {

enum class Frame { Sensor, Body, Odometry };

const char* frame_name(Frame f);
std::optional<Frame> frame_from_name(const std::string& name);

/// Frame-tagged point set. `sensor_origin` tracks where the producing sensor
/// sits in the cloud's current frame (the ring-variance filter needs ranges
/// relative to the sensor after the cloud has left the sensor frame).
struct PointCloud {
  std::vector<Point3> points;
  Frame frame = Frame::Sensor;
  double stamp = 0.0;
  Point3 sensor_origin{};

  std::size_t size() const { return points.size(); }
  bool empty() const { return points.empty(); }
};

enum class CloudStatus { EmptyOk, Noisy, Usable };

/// Plane ax + by + cz + d = 0 with (a,b,c) unit-norm.
struct Plane {
  double a = 0.0, b = 0.0, c = 0.0, d = 0.0;
  int inlier_count = 0;

  Eigen::Vector3d normal() const { return {a, b, c}; }
  double signed_distance(const Point3& p) const {
    return a * p.x + b * p.y + c * p.z + d;
  }
};

/// Voxel-grid downsample: one centroid per voxel holding at least
/// `min_points` finite, non-origin points. Output is sorted by voxel index.
PointCloud voxel_downsample(const PointCloud& cloud, double voxel_size, int min_points);

/// Rigid transform p' = R p + t of every point; the frame tag becomes
/// `target_frame`. Transforming a cloud onto its own frame tag is rejected.
PointCloud transform_cloud(const PointCloud& cloud, const Pose& pose, Frame target_frame);

/// Remove all points inside the closed box [box_min, box_max]. A degenerate
/// box (any min_i >= max_i) removes nothing.
PointCloud crop_box_remove(const PointCloud& cloud, const Point3& box_min,
                           const Point3& box_max);

CloudStatus classify_cloud_status(std::size_t raw_size, std::size_t processed_size);

/// Remove all points with distance <= radius from center.
PointCloud radius_remove(const PointCloud& cloud, const Point3& center, double radius);

/// Keep points with z in [z_min, z_max] and the requested y sign.
enum class YSign { Pos, Neg, Any };
PointCloud passthrough_filter(const PointCloud& cloud, double z_min, double z_max,
                              YSign y_sign);

struct DustFilterResult {
  PointCloud cloud;
  bool rings_missing = false;  // filter was a no-op: points carry no ring ids
};

/// Remove points whose sample variance of range-to-sensor, over a sliding
/// window of `window` consecutive same-ring points (ordered by azimuth),
/// exceeds `variance_threshold`. Solid surfaces have low in-ring variance;
/// airborne dust does not.
DustFilterResult dust_filter(const PointCloud& cloud, int window,
                             double variance_threshold);

/// Seeded RANSAC plane fit with a least-squares refit over the consensus
/// inliers. Fails on fewer than 3 points or a degenerate (collinear) cloud.
std::optional<Plane> fit_plane(const PointCloud& cloud, double inlier_tol,
                               int iterations, std::uint64_t rng_seed);

/// Total-least-squares plane through the points (smallest PCA axis).
std::optional<Plane> fit_plane_least_squares(const std::vector<Point3>& points);

// ASCII interchange: "cloudv1 <n> <frame>" then one "x y z [intensity [ring]]"
// line per point.
void write_cloud(std::ostream& os, const PointCloud& cloud);
std::optional<PointCloud> read_cloud(std::istream& is, std::string* error = nullptr);

}  // namespace hybridnav
