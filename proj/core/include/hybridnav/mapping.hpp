#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <unordered_set>
#include <vector>

#include "hybridnav/cloud.hpp"

namespace hybridnav {

struct VoxelKey {
  int i = 0, j = 0, k = 0;
  bool operator==(const VoxelKey&) const = default;
};

struct VoxelKeyHash {
  std::size_t operator()(const VoxelKey& v) const {
    std::uint64_t h = 1469598103934665603ull;
    for (int c : {v.i, v.j, v.k}) {
      h ^= static_cast<std::uint64_t>(static_cast<std::uint32_t>(c));
      h *= 1099511628211ull;
    }
    return static_cast<std::size_t>(h);
  }
};

/// Radius-bounded voxel occupancy map around the vehicle.
class LocalMap {
 public:
  LocalMap() = default;
  LocalMap(double resolution, double retain_radius)
      : resolution_(resolution), retain_radius_(retain_radius) {}

  double resolution() const { return resolution_; }
  double retain_radius() const { return retain_radius_; }
  std::size_t occupied_count() const { return occupied_.size(); }

  VoxelKey voxel_of(const Point3& p) const;
  Point3 voxel_center(const VoxelKey& v) const;
  bool occupied(const VoxelKey& v) const { return occupied_.count(v) > 0; }

  void insert_cloud(const PointCloud& cloud);
  void insert_point(const Point3& p);
  void prune_radius(const Point3& center);
  void reset();

  const std::unordered_set<VoxelKey, VoxelKeyHash>& cells() const { return occupied_; }

  /// "mapv1 <resolution>" then one "i j k" line per occupied voxel, sorted.
  void dump(std::ostream& os) const;

 private:
  double resolution_ = 0.2;
  double retain_radius_ = 10.0;
  std::unordered_set<VoxelKey, VoxelKeyHash> occupied_;
};

enum class TravelMode { Ground, Air };

struct HybridNode {
  VoxelKey voxel;
  TravelMode mode = TravelMode::Ground;
  bool operator==(const HybridNode&) const = default;
};

struct PlanningCosts {
  double ground_cost = 1.0;
  double air_cost = 5.0;
  // Extra charge for a takeoff/landing edge, as a multiple of one step at the
  // destination mode's rate. Zero keeps path cost a pure sum of node costs.
  double mode_change_factor = 0.0;

  double mode_cost(TravelMode m) const {
    return m == TravelMode::Air ? air_cost : ground_cost;
  }
};

struct PlanningBounds {
  VoxelKey min;
  VoxelKey max;
  int ground_k = 0;  // the k level Ground nodes live on
};

struct PlanResult {
  std::vector<HybridNode> path;
  double total_cost = 0.0;
};

/// Cost-optimal search over 6-connected voxel moves plus Ground<->Air mode
/// changes at the same (i, j) on the ground level. Edge cost is step length
/// times the destination mode's rate; the Euclidean-distance heuristic is
/// scaled by the cheaper rate and so stays admissible. Ground cells can also
/// be vetoed by a terrain cost layer.
std::optional<PlanResult> astar_plan(
    const LocalMap& map, const HybridNode& start, const HybridNode& goal,
    const PlanningCosts& costs, const PlanningBounds& bounds,
    const std::function<bool(int, int)>& ground_blocked = nullptr);

/// World-space centers of a planned path.
std::vector<Point3> path_points(const LocalMap& map, const std::vector<HybridNode>& path);

/// Point at arc length `dist` along the polyline (path end if shorter).
Point3 extract_waypoint(const std::vector<Point3>& path, double dist);

struct ModeAnnotation {
  std::vector<std::pair<Point3, TravelMode>> points;
  std::vector<std::size_t> transitions;  // indices where the mode changes
};

/// Label each path point with its travel mode and mark mode transitions for
/// the mobility client.
ModeAnnotation annotate_modes(const LocalMap& map, const std::vector<HybridNode>& path);

}  // namespace hybridnav
