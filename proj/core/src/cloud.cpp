#include "hybridnav/cloud.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <map>
#include <ostream>
#include <random>
#include <sstream>
#include <stdexcept>
#include <tuple>

namespace hybridnav {

const char* frame_name(Frame f) {
  switch (f) {
    case Frame::Sensor: return "sensor";
    case Frame::Body: return "body";
    case Frame::Odometry: return "odometry";
  }
  return "unknown";
}

std::optional<Frame> frame_from_name(const std::string& name) {
  if (name == "sensor") return Frame::Sensor;
  if (name == "body") return Frame::Body;
  if (name == "odometry") return Frame::Odometry;
  return std::nullopt;
}

Eigen::Matrix3d rotation_matrix(double roll, double pitch, double yaw) {
  const double cr = std::cos(roll), sr = std::sin(roll);
  const double cp = std::cos(pitch), sp = std::sin(pitch);
  const double cy = std::cos(yaw), sy = std::sin(yaw);
  Eigen::Matrix3d rx, ry, rz;
  rx << 1, 0, 0,
        0, cr, -sr,
        0, sr, cr;
  ry << cp, 0, -sp,
        0, 1, 0,
        sp, 0, cp;
  rz << cy, -sy, 0,
        sy, cy, 0,
        0, 0, 1;
  return rx * ry * rz;
}

void rpy_from_matrix(const Eigen::Matrix3d& rm, double& roll, double& pitch, double& yaw) {
  // Inverts the Rx * Ry * Rz composition above: rm(0,2) = -sin(pitch).
  pitch = std::asin(std::clamp(-rm(0, 2), -1.0, 1.0));
  if (std::abs(std::cos(pitch)) > 1e-9) {
    yaw = std::atan2(-rm(0, 1), rm(0, 0));
    roll = std::atan2(-rm(1, 2), rm(2, 2));
  } else {
    // Gimbal-locked: yaw and roll are coupled; pick yaw = 0.
    yaw = 0.0;
    roll = std::atan2(rm(2, 1), rm(1, 1));
  }
}

Pose inverse(const Pose& p) {
  const Eigen::Matrix3d r = rotation_matrix(p);
  const Eigen::Matrix3d rt = r.transpose();
  const Eigen::Vector3d t = -rt * p.position.vec();
  Pose out;
  out.position = Point3::from_vec(t);
  rpy_from_matrix(rt, out.roll, out.pitch, out.yaw);
  return out;
}

PointCloud voxel_downsample(const PointCloud& cloud, double voxel_size, int min_points) {
  if (voxel_size <= 0.0) throw std::invalid_argument("voxel_size must be > 0");
  if (min_points < 1) throw std::invalid_argument("min_points must be >= 1");

  struct Accum {
    double sx = 0, sy = 0, sz = 0, si = 0;
    int n = 0;
    int ring = -1;
  };
  std::map<std::tuple<long, long, long>, Accum> voxels;
  for (const Point3& p : cloud.points) {
    if (!p.finite()) continue;
    if (p.x == 0.0 && p.y == 0.0 && p.z == 0.0) continue;  // sensor-origin returns
    const auto key = std::make_tuple(
        static_cast<long>(std::floor(p.x / voxel_size)),
        static_cast<long>(std::floor(p.y / voxel_size)),
        static_cast<long>(std::floor(p.z / voxel_size)));
    Accum& a = voxels[key];
    a.sx += p.x;
    a.sy += p.y;
    a.sz += p.z;
    a.si += p.intensity;
    if (a.n == 0) a.ring = p.ring;
    a.n += 1;
  }

  PointCloud out;
  out.frame = cloud.frame;
  out.stamp = cloud.stamp;
  out.sensor_origin = cloud.sensor_origin;
  for (const auto& [key, a] : voxels) {
    if (a.n < min_points) continue;
    Point3 c(a.sx / a.n, a.sy / a.n, a.sz / a.n);
    c.intensity = a.si / a.n;
    c.ring = a.ring;
    out.points.push_back(c);
  }
  return out;
}

PointCloud transform_cloud(const PointCloud& cloud, const Pose& pose, Frame target_frame) {
  if (cloud.frame == target_frame) {
    throw std::invalid_argument("transform_cloud: cloud is already in the target frame");
  }
  const Eigen::Matrix3d r = rotation_matrix(pose);
  const Eigen::Vector3d t = pose.position.vec();

  PointCloud out;
  out.frame = target_frame;
  out.stamp = cloud.stamp;
  out.sensor_origin = Point3::from_vec(r * cloud.sensor_origin.vec() + t);
  out.points.reserve(cloud.points.size());
  for (const Point3& p : cloud.points) {
    Point3 q = Point3::from_vec(r * p.vec() + t);
    q.intensity = p.intensity;
    q.ring = p.ring;
    out.points.push_back(q);
  }
  return out;
}

PointCloud crop_box_remove(const PointCloud& cloud, const Point3& box_min,
                           const Point3& box_max) {
  PointCloud out;
  out.frame = cloud.frame;
  out.stamp = cloud.stamp;
  out.sensor_origin = cloud.sensor_origin;
  const bool degenerate =
      !(box_min.x < box_max.x && box_min.y < box_max.y && box_min.z < box_max.z);
  if (degenerate) {
    out.points = cloud.points;
    return out;
  }
  for (const Point3& p : cloud.points) {
    const bool inside = p.x >= box_min.x && p.x <= box_max.x &&
                        p.y >= box_min.y && p.y <= box_max.y &&
                        p.z >= box_min.z && p.z <= box_max.z;
    if (!inside) out.points.push_back(p);
  }
  return out;
}

CloudStatus classify_cloud_status(std::size_t raw_size, std::size_t processed_size) {
  if (raw_size == 0) return CloudStatus::EmptyOk;
  if (processed_size == 0) return CloudStatus::Noisy;
  return CloudStatus::Usable;
}

PointCloud radius_remove(const PointCloud& cloud, const Point3& center, double radius) {
  PointCloud out;
  out.frame = cloud.frame;
  out.stamp = cloud.stamp;
  out.sensor_origin = cloud.sensor_origin;
  for (const Point3& p : cloud.points) {
    if (distance(p, center) > radius) out.points.push_back(p);
  }
  return out;
}

PointCloud passthrough_filter(const PointCloud& cloud, double z_min, double z_max,
                              YSign y_sign) {
  if (!(z_min < z_max)) throw std::invalid_argument("passthrough: z_min must be < z_max");
  PointCloud out;
  out.frame = cloud.frame;
  out.stamp = cloud.stamp;
  out.sensor_origin = cloud.sensor_origin;
  for (const Point3& p : cloud.points) {
    if (p.z < z_min || p.z > z_max) continue;
    if (y_sign == YSign::Pos && !(p.y > 0.0)) continue;
    if (y_sign == YSign::Neg && !(p.y < 0.0)) continue;
    out.points.push_back(p);
  }
  return out;
}

DustFilterResult dust_filter(const PointCloud& cloud, int window,
                             double variance_threshold) {
  if (window < 3) throw std::invalid_argument("dust_filter: window must be >= 3");

  DustFilterResult result;
  result.cloud.frame = cloud.frame;
  result.cloud.stamp = cloud.stamp;
  result.cloud.sensor_origin = cloud.sensor_origin;
  if (cloud.empty()) return result;

  const bool any_ring =
      std::any_of(cloud.points.begin(), cloud.points.end(),
                  [](const Point3& p) { return p.ring >= 0; });
  if (!any_ring) {
    result.cloud.points = cloud.points;
    result.rings_missing = true;
    return result;
  }

  struct RingPoint {
    double azimuth;
    double range;
    std::size_t index;
  };
  std::map<int, std::vector<RingPoint>> rings;
  const Eigen::Vector3d so = cloud.sensor_origin.vec();
  for (std::size_t i = 0; i < cloud.points.size(); ++i) {
    const Point3& p = cloud.points[i];
    if (p.ring < 0) continue;  // unringed points pass through untouched
    const Eigen::Vector3d d = p.vec() - so;
    rings[p.ring].push_back({std::atan2(d.y(), d.x()), d.norm(), i});
  }

  std::vector<bool> keep(cloud.points.size(), true);
  for (auto& [ring, pts] : rings) {
    std::sort(pts.begin(), pts.end(), [](const RingPoint& a, const RingPoint& b) {
      return a.azimuth < b.azimuth;
    });
    const int n = static_cast<int>(pts.size());
    if (n < 3) continue;
    const int w = std::min(window, n);
    const int half = w / 2;
    for (int i = 0; i < n; ++i) {
      int lo = std::max(0, i - half);
      int hi = std::min(n, lo + w);
      lo = std::max(0, hi - w);
      double mean = 0.0;
      for (int j = lo; j < hi; ++j) mean += pts[j].range;
      const int m = hi - lo;
      mean /= m;
      double var = 0.0;
      for (int j = lo; j < hi; ++j) {
        const double dr = pts[j].range - mean;
        var += dr * dr;
      }
      var /= (m - 1);  // sample variance
      if (var > variance_threshold) keep[pts[i].index] = false;
    }
  }

  for (std::size_t i = 0; i < cloud.points.size(); ++i) {
    if (keep[i]) result.cloud.points.push_back(cloud.points[i]);
  }
  return result;
}

std::optional<Plane> fit_plane_least_squares(const std::vector<Point3>& points) {
  if (points.size() < 3) return std::nullopt;
  Eigen::Vector3d centroid = Eigen::Vector3d::Zero();
  for (const Point3& p : points) centroid += p.vec();
  centroid /= static_cast<double>(points.size());

  Eigen::Matrix3d cov = Eigen::Matrix3d::Zero();
  for (const Point3& p : points) {
    const Eigen::Vector3d d = p.vec() - centroid;
    cov += d * d.transpose();
  }
  cov /= static_cast<double>(points.size());

  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(cov);
  if (es.info() != Eigen::Success) return std::nullopt;
  // Collinear input: two near-zero eigenvalues, no unique normal.
  if (es.eigenvalues()(1) < 1e-12) return std::nullopt;

  const Eigen::Vector3d n = es.eigenvectors().col(0).normalized();
  Plane plane;
  plane.a = n.x();
  plane.b = n.y();
  plane.c = n.z();
  plane.d = -n.dot(centroid);
  plane.inlier_count = static_cast<int>(points.size());
  return plane;
}

std::optional<Plane> fit_plane(const PointCloud& cloud, double inlier_tol,
                               int iterations, std::uint64_t rng_seed) {
  const auto& pts = cloud.points;
  const std::size_t n = pts.size();
  if (n < 3) return std::nullopt;

  std::mt19937_64 rng(rng_seed);
  std::uniform_int_distribution<std::size_t> pick(0, n - 1);

  int best_count = -1;
  Eigen::Vector3d best_n = Eigen::Vector3d::Zero();
  double best_d = 0.0;

  for (int it = 0; it < iterations; ++it) {
    const std::size_t i = pick(rng), j = pick(rng), k = pick(rng);
    if (i == j || j == k || i == k) continue;
    const Eigen::Vector3d p0 = pts[i].vec();
    const Eigen::Vector3d e1 = pts[j].vec() - p0;
    const Eigen::Vector3d e2 = pts[k].vec() - p0;
    Eigen::Vector3d nv = e1.cross(e2);
    const double len = nv.norm();
    if (len < 1e-12) continue;  // collinear sample
    nv /= len;
    const double d = -nv.dot(p0);

    int count = 0;
    for (const Point3& p : pts) {
      if (std::abs(nv.dot(p.vec()) + d) <= inlier_tol) ++count;
    }
    if (count > best_count) {
      best_count = count;
      best_n = nv;
      best_d = d;
    }
  }
  if (best_count < 3) return std::nullopt;

  std::vector<Point3> inliers;
  inliers.reserve(best_count);
  for (const Point3& p : pts) {
    if (std::abs(best_n.dot(p.vec()) + best_d) <= inlier_tol) inliers.push_back(p);
  }
  auto refined = fit_plane_least_squares(inliers);
  if (!refined) {
    Plane plane{best_n.x(), best_n.y(), best_n.z(), best_d, best_count};
    return plane;
  }
  refined->inlier_count = static_cast<int>(inliers.size());
  return refined;
}

void write_cloud(std::ostream& os, const PointCloud& cloud) {
  os << "cloudv1 " << cloud.points.size() << " " << frame_name(cloud.frame) << "\n";
  for (const Point3& p : cloud.points) {
    os << p.x << " " << p.y << " " << p.z;
    if (p.intensity != 0.0 || p.ring >= 0) os << " " << p.intensity;
    if (p.ring >= 0) os << " " << p.ring;
    os << "\n";
  }
}

std::optional<PointCloud> read_cloud(std::istream& is, std::string* error) {
  auto fail = [&](const std::string& msg) -> std::optional<PointCloud> {
    if (error) *error = msg;
    return std::nullopt;
  };

  std::string header;
  if (!std::getline(is, header)) return fail("empty cloud stream");
  std::istringstream hs(header);
  std::string magic, frame_word;
  std::size_t n = 0;
  if (!(hs >> magic >> n >> frame_word) || magic != "cloudv1") {
    return fail("bad cloud header: " + header);
  }
  const auto frame = frame_from_name(frame_word);
  if (!frame) return fail("unknown frame: " + frame_word);

  PointCloud cloud;
  cloud.frame = *frame;
  cloud.points.reserve(n);
  std::string line;
  for (std::size_t i = 0; i < n; ++i) {
    if (!std::getline(is, line)) return fail("truncated cloud: expected " + std::to_string(n) + " points");
    std::istringstream ls(line);
    Point3 p;
    if (!(ls >> p.x >> p.y >> p.z)) return fail("bad point line: " + line);
    double intensity;
    if (ls >> intensity) {
      p.intensity = intensity;
      int ring;
      if (ls >> ring) p.ring = ring;
    }
    cloud.points.push_back(p);
  }
  return cloud;
}

}  // namespace hybridnav
